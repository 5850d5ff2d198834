#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "decentsim/dgp.hpp"
#include "decentsim/errors.hpp"
#include "decentsim/estimator.hpp"
#include "decentsim/rng.hpp"
#include "oracles.hpp"

using namespace decentsim;

namespace {

// small random panels for property tests
PanelDataset random_panel(std::uint64_t seed, int municipalities = 6, int schools = 3,
                          int pupils = 5, int periods = 2) {
    DGPConfig cfg;
    cfg.n_municipalities = municipalities;
    cfg.schools_per_municipality = schools;
    cfg.pupils_per_school = pupils;
    cfg.n_periods = periods;
    cfg.seed = seed;
    cfg.share_public = 0.5; // keep both groups present in small designs
    cfg.lambda_spread = 1.0;
    cfg.sd_eps0 = 5.0;
    return generate_panel(cfg);
}

RegressionSpec fe_spec(const std::string& outcome = "score_math") {
    RegressionSpec spec;
    spec.outcome = outcome;
    spec.covariates = {"age", "girl", "books", "electricity", "grade_high", "post", "public"};
    spec.interactions = {{"post", "public"}};
    spec.fixed_effect = "school_id";
    spec.include_intercept = false;
    return spec;
}

} // namespace

TEST_CASE("exact fit and mean") {
    Eigen::MatrixXd X(3, 1);
    X << 1, 2, 3;
    Eigen::VectorXd y(3);
    y << 1, 2, 3;
    auto sol = solve_least_squares(X, y);
    CHECK(sol.coef[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sol.residuals.cwiseAbs().maxCoeff() < 1e-14);

    Eigen::MatrixXd ones(2, 1);
    ones << 1, 1;
    Eigen::VectorXd y2(2);
    y2 << 1, 1;
    CHECK(solve_least_squares(ones, y2).coef[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("solver matches the normal-equations oracle") {
    rng::Stream gen(555);
    Eigen::MatrixXd X(200, 5);
    Eigen::VectorXd y(200);
    std::vector<std::vector<double>> Xv(200, std::vector<double>(5));
    std::vector<double> yv(200);
    for (int i = 0; i < 200; ++i) {
        Xv[std::size_t(i)][0] = 1.0;
        X(i, 0) = 1.0;
        for (int j = 1; j < 5; ++j) {
            double v = gen.uniform(-2.0, 2.0);
            X(i, j) = v;
            Xv[std::size_t(i)][std::size_t(j)] = v;
        }
        double noise = gen.normal();
        y[i] = 1.0 + 0.5 * X(i, 1) - 2.0 * X(i, 2) + 0.1 * X(i, 3) + noise;
        yv[std::size_t(i)] = y[i];
    }
    auto sol = solve_least_squares(X, y);
    auto ref = oracles::normal_equations(Xv, yv);
    for (int j = 0; j < 5; ++j)
        CHECK(sol.coef[j] == doctest::Approx(ref[std::size_t(j)]).epsilon(1e-7));
    // residual orthogonality
    CHECK((X.transpose() * sol.residuals).cwiseAbs().maxCoeff() <
          1e-8 * (1.0 + y.cwiseAbs().maxCoeff()));
}

TEST_CASE("rank deficiency names the offending column") {
    PanelDataset panel = random_panel(10);
    RegressionSpec spec;
    spec.outcome = "score_math";
    spec.covariates = {"age", "age"}; // duplicate column
    spec.include_intercept = true;
    try {
        fit(panel, spec);
        FAIL("expected rank-deficiency error");
    } catch (const data_error& e) {
        CHECK(std::string(e.what()).find("age") != std::string::npos);
        CHECK(std::string(e.what()).find("rank deficient") != std::string::npos);
    }
}

TEST_CASE("within transform demeans per group") {
    PanelDataset panel;
    panel.w_dim = 0;
    auto add = [&](std::int64_t school, double y) {
        PanelRow r;
        r.pupil_id = std::int64_t(panel.rows.size() + 1);
        r.school_id = school;
        r.period = int(panel.rows.size() % 2);
        r.is_post = r.period == 1;
        r.is_public = school == 1;
        r.score_math = y;
        panel.rows.push_back(r);
    };
    // groups {1,3} and {2,4}
    add(1, 1.0);
    add(1, 3.0);
    add(2, 2.0);
    add(2, 4.0);

    RegressionSpec spec;
    spec.outcome = "score_math";
    spec.covariates = {"post", "public"};
    spec.fixed_effect = "school_id";
    spec.include_intercept = false;
    auto wt = within_transform(panel, spec);
    CHECK(wt.design.y[0] == doctest::Approx(-1.0));
    CHECK(wt.design.y[1] == doctest::Approx(1.0));
    CHECK(wt.design.y[2] == doctest::Approx(-1.0));
    CHECK(wt.design.y[3] == doctest::Approx(1.0));
    // public is constant within school -> absorbed
    REQUIRE(wt.absorbed.size() == 1);
    CHECK(wt.absorbed[0] == "public");
    REQUIRE(wt.design.names.size() == 1);
    CHECK(wt.design.names[0] == "post");
}

TEST_CASE("FE equals dummy-variable least squares") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        PanelDataset panel = random_panel(seed, 4 + int(seed % 3), 2 + int(seed % 2), 4, 2);
        RegressionSpec spec = fe_spec();
        FitResult fe = fit(panel, spec);

        // LSDV: same slopes plus one dummy per school, no intercept
        DesignMatrix d = build_design(panel, [&] {
            RegressionSpec s = spec;
            s.fixed_effect.reset();
            s.include_intercept = false;
            return s;
        }());
        std::vector<std::string> keep_names;
        std::vector<Eigen::Index> keep_cols;
        for (Eigen::Index j = 0; j < d.X.cols(); ++j) {
            if (std::find(fe.names.begin(), fe.names.end(), d.names[std::size_t(j)]) !=
                fe.names.end()) {
                keep_names.push_back(d.names[std::size_t(j)]);
                keep_cols.push_back(j);
            }
        }
        std::vector<std::int64_t> ids;
        for (const auto& r : panel.rows) ids.push_back(r.school_id);
        std::vector<std::int64_t> uniq = ids;
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

        Eigen::MatrixXd X(d.X.rows(), Eigen::Index(keep_cols.size() + uniq.size()));
        for (std::size_t j = 0; j < keep_cols.size(); ++j) X.col(Eigen::Index(j)) = d.X.col(keep_cols[j]);
        for (std::size_t g = 0; g < uniq.size(); ++g)
            for (Eigen::Index i = 0; i < X.rows(); ++i)
                X(i, Eigen::Index(keep_cols.size() + g)) = ids[std::size_t(i)] == uniq[g] ? 1.0 : 0.0;

        auto lsdv = solve_least_squares(X, d.y);
        for (std::size_t j = 0; j < keep_names.size(); ++j) {
            double fe_est = fe.estimate(keep_names[j]);
            CHECK(lsdv.coef[Eigen::Index(j)] == doctest::Approx(fe_est).epsilon(1e-8));
        }
    }
}

TEST_CASE("saturated regression reproduces the cell-means contrast") {
    for (std::uint64_t seed : {3ULL, 17ULL, 90ULL}) {
        PanelDataset panel = random_panel(seed);
        RegressionSpec spec;
        spec.outcome = "score_math";
        spec.covariates = {"post", "public"};
        spec.interactions = {{"post", "public"}};
        spec.include_intercept = true;
        FitResult f = fit(panel, spec);

        std::vector<bool> post, pub;
        for (const auto& r : panel.rows) {
            post.push_back(r.is_post);
            pub.push_back(r.is_public);
        }
        double did = oracles::group_means_did(panel.column("score_math"), post, pub);
        CHECK(f.estimate("post:public") == doctest::Approx(did).epsilon(1e-10));
    }
}

TEST_CASE("cluster vcov: singleton clusters reduce to HC1") {
    rng::Stream gen(42);
    const int n = 60;
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    std::vector<std::int64_t> ids(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = gen.uniform(0.0, 4.0);
        y[i] = 2.0 - X(i, 1) + gen.normal() * (1.0 + 0.3 * X(i, 1));
        ids[std::size_t(i)] = i;
    }
    auto sol = solve_least_squares(X, y);
    Eigen::MatrixXd cr = cluster_robust_vcov(X, sol.residuals, ids);

    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(2, 2);
    for (int i = 0; i < n; ++i)
        meat += X.row(i).transpose() * X.row(i) * sol.residuals[i] * sol.residuals[i];
    Eigen::MatrixXd bread = (X.transpose() * X).inverse();
    Eigen::MatrixXd hc1 = (double(n) / (n - 2)) * bread * meat * bread;
    CHECK((cr - hc1).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("cluster vcov: hand-computed two-cluster fixtures") {
    // intercept only: y = (1,2,4), clusters (a,a,b)
    Eigen::MatrixXd X1 = Eigen::MatrixXd::Ones(3, 1);
    Eigen::VectorXd y(3);
    y << 1, 2, 4;
    auto sol1 = solve_least_squares(X1, y);
    Eigen::MatrixXd v1 = cluster_robust_vcov(X1, sol1.residuals, {7, 7, 9});
    CHECK(v1(0, 0) == doctest::Approx(100.0 / 81.0).epsilon(1e-12));
    CHECK(sol1.coef[0] / std::sqrt(v1(0, 0)) == doctest::Approx(2.1).epsilon(1e-12));

    // intercept + slope on x = (0,1,2)
    Eigen::MatrixXd X2(3, 2);
    X2 << 1, 0, 1, 1, 1, 2;
    auto sol2 = solve_least_squares(X2, y);
    Eigen::MatrixXd v2 = cluster_robust_vcov(X2, sol2.residuals, {7, 7, 9});
    CHECK(v2(0, 0) == doctest::Approx(1.0 / 162.0).epsilon(1e-12));
    CHECK(v2(0, 1) == doctest::Approx(-1.0 / 54.0).epsilon(1e-12));
    CHECK(v2(1, 1) == doctest::Approx(1.0 / 18.0).epsilon(1e-12));

    CHECK_THROWS_AS(cluster_robust_vcov(X1, sol1.residuals, {7, 7, 7}), data_error);
}

TEST_CASE("cluster vcov tracks the classical variance under iid errors") {
    rng::Stream gen(2024);
    const int n = 4000, g = 400;
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    std::vector<std::int64_t> ids(n);
    const double sigma = 1.5;
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = gen.normal();
        y[i] = 1.0 + 2.0 * X(i, 1) + sigma * gen.normal();
        ids[std::size_t(i)] = i % g;
    }
    auto sol = solve_least_squares(X, y);
    Eigen::MatrixXd cr = cluster_robust_vcov(X, sol.residuals, ids);
    Eigen::MatrixXd classical =
        sol.residuals.squaredNorm() / (n - 2) * (X.transpose() * X).inverse();
    for (int j = 0; j < 2; ++j)
        CHECK(cr(j, j) == doctest::Approx(classical(j, j)).epsilon(0.2));
}

TEST_CASE("fit invariants on random panels") {
    PanelDataset panel = random_panel(77, 5, 3, 6, 2);
    RegressionSpec spec = fe_spec();
    FitResult f = fit(panel, spec);

    // t = estimate / se
    for (Eigen::Index j = 0; j < f.estimates.size(); ++j) {
        double se = std::sqrt(f.vcov(j, j));
        if (se > 0) CHECK(f.t_stats[j] == doctest::Approx(f.estimates[j] / se).epsilon(1e-12));
    }
    CHECK(f.r_squared >= 0.0);
    CHECK(f.r_squared <= 1.0);

    // vcov symmetric PSD
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f.vcov);
    CHECK(eig.eigenvalues().minCoeff() > -1e-8);
    CHECK((f.vcov - f.vcov.transpose()).cwiseAbs().maxCoeff() < 1e-12);

    // permutation invariance
    PanelDataset shuffled = panel;
    std::mt19937 perm(99);
    std::shuffle(shuffled.rows.begin(), shuffled.rows.end(), perm);
    FitResult f2 = fit(shuffled, spec);
    for (const auto& name : f.names)
        CHECK(f.estimate(name) == doctest::Approx(f2.estimate(name)).epsilon(1e-10));

    // affine covariate transform leaves the interaction untouched
    PanelDataset scaled = panel;
    for (auto& r : scaled.rows) r.age = r.age * 3 + 7;
    FitResult f3 = fit(scaled, spec);
    CHECK(f3.estimate("post:public") == doctest::Approx(f.estimate("post:public")).epsilon(1e-8));
    CHECK(f3.t("post:public") == doctest::Approx(f.t("post:public")).epsilon(1e-8));
}

TEST_CASE("noiseless panel identifies the effect to machine precision") {
    DGPConfig cfg;
    cfg.n_municipalities = 6;
    cfg.schools_per_municipality = 2;
    cfg.pupils_per_school = 4;
    cfg.theta1 = {0, 0, 0, 0};
    cfg.theta2 = {0, 0};
    cfg.theta_grade = 0;
    cfg.sd_eps0 = cfg.sd_eps1 = cfg.sd_eps2 = 0;
    cfg.lambda_spread = 0;
    cfg.mu0 = cfg.mu1 = cfg.mu2 = 0;
    PanelDataset panel = generate_panel(cfg);
    FitResult f = fit(panel, fe_spec());
    CHECK(f.estimate("post:public") == doctest::Approx(cfg.lambda0).epsilon(1e-9));
}

TEST_CASE("spec validation") {
    PanelDataset panel = random_panel(5);
    RegressionSpec spec = fe_spec();
    spec.include_intercept = true; // conflicts with fixed effect
    CHECK_THROWS_AS(fit(panel, spec), usage_error);

    spec = fe_spec();
    spec.covariates.push_back("no_such_column");
    try {
        fit(panel, spec);
        FAIL("expected missing-column error");
    } catch (const data_error& e) {
        CHECK(std::string(e.what()).find("no_such_column") != std::string::npos);
    }
}
