#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "decentsim/config.hpp"
#include "decentsim/csv.hpp"
#include "decentsim/dgp.hpp"
#include "decentsim/errors.hpp"
#include "decentsim/table.hpp"

using namespace decentsim;

namespace {

const char* kTinyPanel =
    "# decentsim-panel-csv 1\n"
    "pupil_id,school_id,municipality_id,period,post,public,anglophone,grade_high,"
    "age,girl,books,electricity,score_math,score_lit\n"
    "1,1,1,0,0,1,0,0,8,1,0,1,40.5,41\n"
    "2,2,1,0,0,0,0,0,9,0,1,1,50,52.5\n"
    "3,1,1,1,1,1,0,0,8,0,0,0,55,56\n"
    "4,2,1,1,1,0,0,0,7,1,1,0,51,53\n";

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("tiny handwritten panel parses") {
    PanelDataset panel = panel_from_csv(kTinyPanel, "tiny");
    CHECK(panel.n_rows() == 4);
    CHECK(panel.n_schools() == 2);
    CHECK(panel.n_periods() == 2);
    CHECK(panel.w_dim == 0);
    CHECK(panel.rows[0].score_math == 40.5);
    CHECK(panel.rows[3].girl);
    panel.validate();
}

TEST_CASE("malformed cells name line and column") {
    std::string bad = kTinyPanel;
    auto pos = bad.find("55,56");
    bad.replace(pos, 2, "oops");
    try {
        panel_from_csv(bad, "tiny");
        FAIL("expected parse error");
    } catch (const data_error& e) {
        std::string msg = e.what();
        CHECK(msg.find("tiny:5") != std::string::npos);
        CHECK(msg.find("score_math") != std::string::npos);
        CHECK(msg.find("oops") != std::string::npos);
    }
}

TEST_CASE("duplicate pupil within a period is rejected") {
    std::string dup = kTinyPanel;
    auto pos = dup.find("2,2,1,0");
    dup.replace(pos, 1, "1"); // pupil 1 twice in period 0
    CHECK_THROWS_WITH_AS(panel_from_csv(dup, "tiny"), doctest::Contains("duplicate pupil_id"),
                         data_error);
}

TEST_CASE("schema version gate") {
    std::string v2 = kTinyPanel;
    v2.replace(v2.find("csv 1"), 5, "csv 2");
    CHECK_THROWS_WITH_AS(panel_from_csv(v2, "tiny"), doctest::Contains("major version"),
                         data_error);
    CHECK_THROWS_AS(panel_from_csv("pupil_id\n", "tiny"), data_error);
}

TEST_CASE("missing column is named") {
    std::string csv =
        "# decentsim-panel-csv 1\n"
        "pupil_id,school_id,municipality_id,period,post,public,anglophone,grade_high,"
        "age,girl,books,torchlight,score_math,score_lit\n";
    CHECK_THROWS_WITH_AS(panel_from_csv(csv, "tiny"), doctest::Contains("electricity"),
                         data_error);
}

TEST_CASE("post flag must mark the last period") {
    std::string bad = kTinyPanel;
    auto pos = bad.find("3,1,1,1,1");
    bad.replace(pos, 9, "3,1,1,1,0");
    CHECK_THROWS_WITH_AS(panel_from_csv(bad, "tiny"), doctest::Contains("post flag"), data_error);
}

TEST_CASE("round trip is exact") {
    DGPConfig cfg;
    cfg.n_municipalities = 8;
    cfg.schools_per_municipality = 3;
    cfg.pupils_per_school = 5;
    PanelDataset panel = generate_panel(cfg);

    auto path = temp_file("decentsim_roundtrip.csv");
    write_panel_csv(panel, path.string());
    PanelDataset back = read_panel_csv(path.string());
    std::filesystem::remove(path);

    REQUIRE(back.n_rows() == panel.n_rows());
    REQUIRE(back.w_dim == panel.w_dim);
    for (std::size_t i = 0; i < panel.n_rows(); ++i) {
        const auto& a = panel.rows[i];
        const auto& b = back.rows[i];
        CHECK(a.pupil_id == b.pupil_id);
        CHECK(a.school_id == b.school_id);
        CHECK(a.municipality_id == b.municipality_id);
        CHECK(a.period == b.period);
        CHECK(a.is_post == b.is_post);
        CHECK(a.is_public == b.is_public);
        CHECK(a.is_anglophone == b.is_anglophone);
        CHECK(a.grade_high == b.grade_high);
        CHECK(a.age == b.age);
        CHECK(a.girl == b.girl);
        CHECK(a.books == b.books);
        CHECK(a.electricity == b.electricity);
        CHECK(a.w == b.w);
        CHECK(a.score_math == b.score_math);
        CHECK(a.score_lit == b.score_lit);
    }

    // writes are byte-deterministic
    CHECK(panel_to_csv(panel) == panel_to_csv(back));
}

TEST_CASE("empty dataset writes a header-only file") {
    PanelDataset empty;
    empty.w_dim = 2;
    std::string text = panel_to_csv(empty);
    CHECK(text.find("w1,w2") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2); // version + header
    PanelDataset back = panel_from_csv(text, "empty");
    CHECK(back.n_rows() == 0);
    CHECK(back.w_dim == 2);
}

TEST_CASE("schools csv") {
    auto schools = schools_from_csv("school_id,s,e,l0\n1,0.5,2,1\n2,-0.25,3,0\n", "s");
    REQUIRE(schools.size() == 2);
    CHECK(schools[0].s == 0.5);
    CHECK(schools[1].l0 == 0.0);
    CHECK_THROWS_WITH_AS(schools_from_csv("school_id,s,e\n1,1,1\n", "s"),
                         doctest::Contains("l0"), data_error);
    CHECK_THROWS_AS(schools_from_csv("school_id,s,e,l0\n1,0.5,2,-1\n", "s"), data_error);
}

TEST_CASE("config parse, render, unknown keys") {
    RunConfig cfg = RunConfig::defaults();
    std::string text = cfg.render();
    RunConfig back = RunConfig::from_text(text);
    CHECK(back.render() == text); // canonical form is a fixed point

    back.set("lambda0", "15.39");
    CHECK(back.dgp.lambda0 == 15.39);
    back.set("lambda0_grade2", "0");
    CHECK(back.dgp.lambda0_grade2.has_value());
    back.set("lambda0_grade2", "inherit");
    CHECK_FALSE(back.dgp.lambda0_grade2.has_value());
    back.set("theta1", "1, 2, 3, 4");
    CHECK(back.dgp.theta1 == std::vector<double>{1, 2, 3, 4});

    CHECK_THROWS_WITH_AS(back.set("lambda_zero", "1"), doctest::Contains("lambda_zero"),
                         usage_error);
    CHECK_THROWS_AS(back.set("lambda0", "ten"), usage_error);
    CHECK_THROWS_AS(RunConfig::from_text("lambda0\n"), usage_error);
    CHECK_THROWS_AS(RunConfig::from_text("gains_distribution = gamma(1)\n"), usage_error);
}

TEST_CASE("estimate cells render like the reference table") {
    CHECK(format_estimate(10.2) == "10.20");
    CHECK(format_estimate(0.825) == "0.825");
    CHECK(format_estimate(1.705) == "1.705");
    CHECK(format_estimate(15.39) == "15.39");
    CHECK(format_estimate(-4.163) == "-4.163");
    CHECK(format_estimate(-16.44) == "-16.44");
    CHECK(format_estimate(-0.0295) == "-0.0295");
    CHECK(format_estimate(0.56) == "0.560");
    CHECK(format_estimate(0.0) == "0.000");
    CHECK(format_estimate(0.99996) == "1.000");
    CHECK(format_estimate(123456.0) == "123456");

    CHECK(format_t(19.71) == "(19.71)");
    CHECK(format_t(0.94) == "(0.94)");
    CHECK(format_t(-53.68) == "(-53.68)");

    CHECK(significance_stars(19.71) == "***");
    CHECK(significance_stars(2.12) == "*");
    CHECK(significance_stars(0.94) == "");
    CHECK(significance_stars(-2.8) == "**");
}

TEST_CASE("rendered table carries star cells and footer") {
    FitResult fit;
    fit.names = {"post:public", "age"};
    fit.estimates = Eigen::Vector2d(10.2, 0.825);
    fit.vcov = Eigen::Matrix2d::Zero();
    fit.vcov(0, 0) = (10.2 / 19.71) * (10.2 / 19.71);
    fit.vcov(1, 1) = (0.825 / 0.94) * (0.825 / 0.94);
    fit.t_stats = Eigen::Vector2d(19.71, 0.94);
    fit.r_squared = 0.393;
    fit.n_obs = 10078;
    fit.n_clusters = 200;
    fit.fixed_effects = true;

    TableLayout layout;
    layout.column_titles = {"score_math"};
    RenderedTable table = render_table({fit}, layout);
    CHECK(table.text.find("10.20***") != std::string::npos);
    CHECK(table.text.find("(19.71)") != std::string::npos);
    CHECK(table.text.find("0.825 ") != std::string::npos);
    CHECK(table.text.find("0.825*") == std::string::npos);
    CHECK(table.text.find("0.393") != std::string::npos);
    CHECK(table.text.find("10078") != std::string::npos);
    CHECK(table.text.find("Yes") != std::string::npos);
    CHECK(table.csv.find("post:public,10.2,") != std::string::npos);
}
