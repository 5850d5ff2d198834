#include <doctest.h>

#include <cmath>
#include <map>

#include "decentsim/dgp.hpp"
#include "decentsim/errors.hpp"
#include "oracles.hpp"

using namespace decentsim;

namespace {

DGPConfig noiseless() {
    DGPConfig cfg;
    cfg.n_municipalities = 6;
    cfg.schools_per_municipality = 2;
    cfg.pupils_per_school = 4;
    cfg.theta1 = {0, 0, 0, 0};
    cfg.theta2 = {0, 0};
    cfg.theta_grade = 0;
    cfg.sd_eps0 = cfg.sd_eps1 = cfg.sd_eps2 = 0;
    cfg.lambda_spread = 0;
    cfg.pretrend_gap = 0;
    cfg.mu0 = cfg.mu1 = cfg.mu2 = 0;
    return cfg;
}

} // namespace

TEST_CASE("noiseless limit: cell means identify the effect exactly") {
    DGPConfig cfg = noiseless();
    PanelDataset panel = generate_panel(cfg);

    std::vector<double> y = panel.column("score_math");
    std::vector<bool> post(panel.n_rows()), pub(panel.n_rows());
    for (std::size_t i = 0; i < panel.n_rows(); ++i) {
        post[i] = panel.rows[i].is_post;
        pub[i] = panel.rows[i].is_public;
        double expect = cfg.theta0 + cfg.alpha0 * pub[i] + cfg.alpha1 * post[i] +
                        cfg.lambda0 * (post[i] && pub[i]);
        CHECK(y[i] == doctest::Approx(expect).epsilon(1e-14));
    }
    CHECK(oracles::group_means_did(y, post, pub) == doctest::Approx(cfg.lambda0).epsilon(1e-12));
}

TEST_CASE("determinism: identical configs give identical panels") {
    DGPConfig cfg;
    cfg.n_municipalities = 5;
    cfg.schools_per_municipality = 3;
    cfg.pupils_per_school = 6;
    PanelDataset a = generate_panel(cfg);
    PanelDataset b = generate_panel(cfg);
    REQUIRE(a.n_rows() == b.n_rows());
    for (std::size_t i = 0; i < a.n_rows(); ++i) {
        CHECK(a.rows[i].score_math == b.rows[i].score_math);
        CHECK(a.rows[i].score_lit == b.rows[i].score_lit);
        CHECK(a.rows[i].age == b.rows[i].age);
        CHECK(a.rows[i].w == b.rows[i].w);
    }
    cfg.seed = 43;
    PanelDataset c = generate_panel(cfg);
    CHECK(a.rows[0].score_math != c.rows[0].score_math);
}

TEST_CASE("outcomes are clustered within schools") {
    DGPConfig cfg;
    cfg.n_municipalities = 40;
    cfg.schools_per_municipality = 4;
    cfg.pupils_per_school = 12;
    cfg.theta1 = {0, 0, 0, 0};
    cfg.theta2 = {0, 0};
    cfg.theta_grade = 0;
    PanelDataset panel = generate_panel(cfg);

    // one-way ANOVA decomposition of score on school
    std::map<std::int64_t, std::pair<double, int>> groups;
    double grand = 0.0;
    for (const auto& r : panel.rows) {
        auto& g = groups[r.school_id];
        g.first += r.score_math;
        g.second += 1;
        grand += r.score_math;
    }
    grand /= double(panel.n_rows());
    double between = 0.0, total = 0.0;
    for (const auto& [id, g] : groups) {
        double mean = g.first / g.second;
        between += g.second * (mean - grand) * (mean - grand);
    }
    for (const auto& r : panel.rows) total += (r.score_math - grand) * (r.score_math - grand);
    double icc_proxy = between / total;
    // school effect is half the eps0 variance plus group-level terms
    CHECK(icc_proxy > 0.2);
}

TEST_CASE("public share is balanced") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        DGPConfig cfg;
        cfg.n_municipalities = 50;
        cfg.schools_per_municipality = 4;
        cfg.pupils_per_school = 2;
        cfg.seed = seed;
        PanelDataset panel = generate_panel(cfg);
        std::map<std::int64_t, bool> pub;
        for (const auto& r : panel.rows) pub[r.school_id] = r.is_public;
        double share = 0.0;
        for (const auto& [id, p] : pub) share += p ? 1.0 : 0.0;
        int n_schools = int(pub.size());
        share /= n_schools;
        double bound = 3.0 * std::sqrt(cfg.share_public * (1 - cfg.share_public) / n_schools);
        CHECK(std::fabs(share - cfg.share_public) <= bound);
    }
}

TEST_CASE("selection correlation shows up only in treated cells") {
    // with huge selection_corr the treated-cell mean of eps1*resources shifts;
    // verify the pre-period public cell is NOT shifted
    DGPConfig cfg = noiseless();
    cfg.n_municipalities = 400;
    cfg.schools_per_municipality = 2;
    cfg.pupils_per_school = 1;
    cfg.sd_eps1 = cfg.sd_eps2 = 1.0;
    cfg.selection_corr = 0.9;
    PanelDataset panel = generate_panel(cfg);

    double sums[2][2] = {{0, 0}, {0, 0}};
    double cnts[2][2] = {{0, 0}, {0, 0}};
    for (const auto& r : panel.rows) {
        double base = cfg.theta0 + cfg.alpha0 * r.is_public + cfg.alpha1 * r.is_post +
                      cfg.lambda0 * (r.is_post && r.is_public);
        sums[r.is_post][r.is_public] += r.score_math - base;
        cnts[r.is_post][r.is_public] += 1;
    }
    // mu = 0 so eps1*eps2 is the whole residual; its mean is corr in the
    // treated cell and ~0 elsewhere
    CHECK(sums[1][1] / cnts[1][1] == doctest::Approx(0.9).epsilon(0.25));
    CHECK(std::fabs(sums[0][1] / cnts[0][1]) < 0.2);
    CHECK(std::fabs(sums[0][0] / cnts[0][0]) < 0.2);
    CHECK(std::fabs(sums[1][0] / cnts[1][0]) < 0.2);
}

TEST_CASE("degenerate design is rejected") {
    DGPConfig cfg;
    cfg.n_municipalities = 1;
    cfg.schools_per_municipality = 2;
    cfg.share_public = 1.0;
    CHECK_THROWS_AS(generate_panel(cfg), data_error);
}

TEST_CASE("config validation") {
    DGPConfig cfg;
    cfg.n_periods = 1;
    CHECK_THROWS_AS(generate_panel(cfg), usage_error);
    cfg = DGPConfig{};
    cfg.selection_corr = 1.5;
    CHECK_THROWS_AS(generate_panel(cfg), usage_error);
    cfg = DGPConfig{};
    cfg.theta1 = {1.0};
    CHECK_THROWS_AS(generate_panel(cfg), usage_error);
}

TEST_CASE("true att is the configured effect") {
    DGPConfig cfg;
    cfg.lambda0 = 10.2;
    CHECK(true_att(cfg) == 10.2);
    cfg.lambda0 = 0.0;
    CHECK(true_att(cfg) == 0.0);
    cfg.lambda0 = 15.39;
    CHECK(true_att(cfg) == 15.39);
}

TEST_CASE("pre-trend gap bends only pre periods") {
    DGPConfig cfg = noiseless();
    cfg.n_periods = 3;
    cfg.pretrend_gap = 2.0;
    PanelDataset panel = generate_panel(cfg);
    for (const auto& r : panel.rows) {
        double expect = cfg.theta0 + cfg.alpha0 * r.is_public + cfg.alpha1 * r.is_post +
                        cfg.lambda0 * (r.is_post && r.is_public) +
                        (!r.is_post && r.is_public ? 2.0 * r.period : 0.0);
        CHECK(r.score_math == doctest::Approx(expect).epsilon(1e-14));
    }
}
