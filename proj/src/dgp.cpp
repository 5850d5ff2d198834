#include "decentsim/dgp.hpp"

#include <cmath>
#include <string>

#include "decentsim/errors.hpp"
#include "decentsim/rng.hpp"

namespace decentsim {

namespace {

constexpr std::uint64_t kSchoolTag = 1;
constexpr std::uint64_t kSchoolPeriodTag = 2;
constexpr std::uint64_t kPupilTag = 3;

void require(bool ok, const std::string& what) {
    if (!ok) throw usage_error("dgp config: " + what);
}

} // namespace

void DGPConfig::validate() const {
    require(n_municipalities >= 1, "n_municipalities must be >= 1");
    require(schools_per_municipality >= 1, "schools_per_municipality must be >= 1");
    require(pupils_per_school >= 1, "pupils_per_school must be >= 1");
    require(n_periods >= 2, "n_periods must be >= 2");
    require(share_public >= 0.0 && share_public <= 1.0, "share_public must be in [0,1]");
    require(share_anglophone >= 0.0 && share_anglophone <= 1.0, "share_anglophone must be in [0,1]");
    require(theta1.size() == 4, "theta1 must have 4 entries (age, girl, books, electricity)");
    require(lambda_spread >= 0.0, "lambda_spread must be >= 0");
    require(sd_eps0 >= 0.0 && sd_eps1 >= 0.0 && sd_eps2 >= 0.0, "error scales must be >= 0");
    require(selection_corr >= -1.0 && selection_corr <= 1.0, "selection_corr must be in [-1,1]");
}

PanelDataset generate_panel(const DGPConfig& cfg) {
    cfg.validate();

    const int n_schools = cfg.n_municipalities * cfg.schools_per_municipality;
    const int post_period = cfg.n_periods - 1;
    const int w_dim = static_cast<int>(cfg.theta2.size());
    const double sd_component = cfg.sd_eps0 / std::sqrt(2.0);

    struct SchoolDraw {
        bool is_public, is_anglophone;
        double effect;       // school effect level around lambda0 (+ anglophone gap)
        double effect_shift; // z-score, reused for the grade-2 override
        std::vector<double> w;
        double u_math, u_lit; // time-invariant school error components
    };

    std::vector<SchoolDraw> schools(static_cast<std::size_t>(n_schools));
    int n_public = 0;
    for (int g = 0; g < n_schools; ++g) {
        auto stream = rng::substream(cfg.seed, {kSchoolTag, std::uint64_t(g)});
        SchoolDraw& sc = schools[std::size_t(g)];
        sc.is_public = stream.bernoulli(cfg.share_public);
        sc.is_anglophone = stream.bernoulli(cfg.share_anglophone);
        sc.effect_shift = stream.normal();
        double center = cfg.lambda0 + (sc.is_anglophone ? cfg.lambda_gap_anglophone : 0.0);
        sc.effect = center + cfg.lambda_spread * sc.effect_shift;
        sc.w.resize(std::size_t(w_dim));
        for (double& wk : sc.w) wk = stream.normal();
        sc.u_math = sd_component * stream.normal();
        sc.u_lit = sd_component * stream.normal();
        n_public += sc.is_public ? 1 : 0;
    }
    if (n_public == 0 || n_public == n_schools)
        throw data_error("degenerate design: all schools drawn " +
                         std::string(n_public == 0 ? "private" : "public") +
                         "; adjust share_public or the seed");

    const double grade2_offset =
        cfg.lambda0_grade2 ? (*cfg.lambda0_grade2 - cfg.lambda0) : 0.0;
    const double corr = cfg.selection_corr;

    PanelDataset panel;
    panel.w_dim = w_dim;
    panel.rows.reserve(std::size_t(n_schools) * std::size_t(cfg.n_periods) *
                       std::size_t(cfg.pupils_per_school));

    std::int64_t next_pupil_id = 1;
    for (int g = 0; g < n_schools; ++g) {
        const SchoolDraw& sc = schools[std::size_t(g)];
        for (int t = 0; t < cfg.n_periods; ++t) {
            const bool post = (t == post_period);
            auto sp_stream =
                rng::substream(cfg.seed, {kSchoolPeriodTag, std::uint64_t(g), std::uint64_t(t)});
            double z1 = sp_stream.normal();
            double z2 = sp_stream.normal();
            double eps1 = cfg.sd_eps1 * z1;
            // Selection on unobservables: the post-period allocation to public
            // schools tracks the compatibility shock. A correlation common to
            // all four cells would only shift the intercept.
            double eps2 = (post && sc.is_public && corr != 0.0)
                              ? cfg.sd_eps2 * (corr * z1 + std::sqrt(1.0 - corr * corr) * z2)
                              : cfg.sd_eps2 * z2;
            double resources = cfg.mu0 + cfg.mu1 * (post ? 1.0 : 0.0) +
                               cfg.mu2 * (sc.is_public ? 1.0 : 0.0) + eps2;
            double shock_common = eps1 * resources;

            double base = cfg.theta0 + cfg.alpha0 * (sc.is_public ? 1.0 : 0.0) +
                          cfg.alpha1 * (post ? 1.0 : 0.0);
            for (int k = 0; k < w_dim; ++k) base += cfg.theta2[std::size_t(k)] * sc.w[std::size_t(k)];
            if (!post && sc.is_public) base += cfg.pretrend_gap * t;

            for (int p = 0; p < cfg.pupils_per_school; ++p) {
                auto pu = rng::substream(cfg.seed, {kPupilTag, std::uint64_t(g),
                                                    std::uint64_t(t), std::uint64_t(p)});
                PanelRow row;
                row.pupil_id = next_pupil_id++;
                row.school_id = g + 1;
                row.municipality_id = g / cfg.schools_per_municipality + 1;
                row.period = t;
                row.is_post = post;
                row.is_public = sc.is_public;
                row.is_anglophone = sc.is_anglophone;
                row.grade_high = (p % 2 == 1);
                // grade ranges overlap at age 10 (repeaters)
                row.age = row.grade_high ? int(pu.uniform_int(10, 13)) : int(pu.uniform_int(7, 10));
                row.girl = pu.bernoulli(0.5);
                row.books = pu.bernoulli(sc.is_public ? 0.35 : 0.55);
                row.electricity = pu.bernoulli(sc.is_public ? 0.40 : 0.65);
                row.w = sc.w;

                double zi = cfg.theta1[0] * row.age + cfg.theta1[1] * (row.girl ? 1.0 : 0.0) +
                            cfg.theta1[2] * (row.books ? 1.0 : 0.0) +
                            cfg.theta1[3] * (row.electricity ? 1.0 : 0.0) +
                            cfg.theta_grade * (row.grade_high ? 1.0 : 0.0);
                double effect = sc.effect + (row.grade_high ? 0.0 : grade2_offset);
                double treated = (post && sc.is_public) ? effect : 0.0;

                double e_math = sd_component * pu.normal();
                double e_lit = sd_component * pu.normal();
                row.score_math = base + zi + treated + sc.u_math + e_math + shock_common;
                row.score_lit = base + zi + treated + sc.u_lit + e_lit + shock_common;
                panel.rows.push_back(std::move(row));
            }
        }
    }

    panel.validate();
    return panel;
}

double true_att(const DGPConfig& config) { return config.lambda0; }

} // namespace decentsim
