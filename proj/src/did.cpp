#include "decentsim/did.hpp"

#include <cmath>
#include <set>

#include "decentsim/errors.hpp"

namespace decentsim {

namespace {

constexpr const char* kAttTerm = "post:public";

std::array<std::array<double, 2>, 2> cell_means_of(const PanelDataset& dataset,
                                                   const std::string& outcome) {
    auto y = dataset.column(outcome);
    std::array<std::array<double, 2>, 2> sums{}, counts{};
    for (std::size_t i = 0; i < dataset.rows.size(); ++i) {
        const auto& r = dataset.rows[i];
        sums[r.is_post][r.is_public] += y[i];
        counts[r.is_post][r.is_public] += 1.0;
    }
    std::array<std::array<double, 2>, 2> means{};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            if (counts[a][b] == 0.0)
                throw data_error(std::string("empty DiD cell: ") +
                                 (a ? "post" : "pre") + " x " + (b ? "public" : "private"));
            means[a][b] = sums[a][b] / counts[a][b];
        }
    return means;
}

DiDSummary summarize(FitResult fit_result, std::string label,
                     const std::array<std::array<double, 2>, 2>& cells) {
    DiDSummary s;
    s.att_estimate = fit_result.estimate(kAttTerm);
    s.se = fit_result.se(kAttTerm);
    s.t_stat = fit_result.t(kAttTerm);
    s.cell_means = cells;
    s.specification = std::move(label);
    s.fit = std::move(fit_result);
    return s;
}

} // namespace

DiDSummary two_by_two(const PanelDataset& dataset, const std::string& outcome) {
    auto cells = cell_means_of(dataset, outcome);
    double att_cells = (cells[1][1] - cells[0][1]) - (cells[1][0] - cells[0][0]);

    RegressionSpec spec;
    spec.outcome = outcome;
    spec.covariates = {"post", "public"};
    spec.interactions = {{"post", "public"}};
    spec.include_intercept = true;

    DiDSummary s = summarize(fit(dataset, spec), "2x2", cells);
    if (std::fabs(s.att_estimate - att_cells) > 1e-9 * (1.0 + std::fabs(att_cells)))
        throw std::logic_error("two_by_two: saturated regression disagrees with cell means");
    s.att_estimate = att_cells; // exact cell arithmetic
    return s;
}

DiDSummary fit_paper_spec(const PanelDataset& dataset, const std::string& outcome,
                          bool with_fe, bool grade2_only) {
    const PanelDataset* data = &dataset;
    PanelDataset subset;
    if (grade2_only) {
        subset = dataset.filter_grade2();
        data = &subset;
    }

    RegressionSpec spec;
    spec.outcome = outcome;
    spec.covariates = {"age", "girl", "books", "electricity", "anglophone", "post", "public"};
    if (!grade2_only) spec.covariates.insert(spec.covariates.begin() + 4, "grade_high");
    spec.interactions = {{"post", "public"}};
    if (with_fe) {
        spec.fixed_effect = "school_id";
        spec.include_intercept = false;
    }

    auto cells = cell_means_of(*data, outcome);
    std::string label = std::string(with_fe ? "fe" : "ols") + (grade2_only ? "-grade2" : "");
    return summarize(fit(*data, spec), std::move(label), cells);
}

DiDSummary fit_heterogeneity(const PanelDataset& dataset, const std::string& outcome,
                             const std::string& moderator) {
    auto mod = dataset.column(moderator);
    bool saw0 = false, saw1 = false;
    for (double v : mod) {
        if (v == 0.0) saw0 = true;
        else if (v == 1.0) saw1 = true;
        else throw data_error("moderator '" + moderator + "' is not binary (value " +
                              std::to_string(v) + ")");
    }
    if (!saw0 || !saw1)
        throw data_error("moderator '" + moderator + "' is constant; interaction unidentified");

    RegressionSpec spec;
    spec.outcome = outcome;
    spec.covariates = {"age", "girl", "books", "electricity", "grade_high", "post", "public"};
    if (moderator != "anglophone") spec.covariates.push_back("anglophone");
    spec.covariates.push_back(moderator);
    spec.interactions = {{"post", "public"},
                         {"post", moderator},
                         {"public", moderator},
                         {"post", "public", moderator}};
    spec.fixed_effect = "school_id";
    spec.include_intercept = false;

    auto cells = cell_means_of(dataset, outcome);
    DiDSummary s = summarize(fit(dataset, spec), "fe-heterogeneity", cells);

    std::string triple = RegressionSpec::interaction_name({"post", "public", moderator});
    HeterogeneityTerm term;
    term.estimate = s.fit.estimate(triple);
    term.se = s.fit.se(triple);
    term.t = s.fit.t(triple);
    s.heterogeneity[triple] = term;
    return s;
}

PlaceboResult placebo_pretrend(const PanelDataset& dataset, const std::string& outcome) {
    if (dataset.n_periods() < 3)
        throw data_error("placebo needs at least 3 periods (insufficient pre-periods)");

    PanelDataset pre = dataset.filter_pre_periods();
    std::set<int> periods;
    for (const auto& r : pre.rows) periods.insert(r.period);
    const int fake_post = *periods.rbegin();
    for (auto& r : pre.rows) r.is_post = (r.period == fake_post);

    RegressionSpec spec;
    spec.outcome = outcome;
    spec.covariates = {"age", "girl", "books", "electricity", "grade_high", "post", "public"};
    spec.interactions = {{"post", "public"}};
    spec.fixed_effect = "school_id";
    spec.include_intercept = false;

    FitResult f = fit(pre, spec);
    PlaceboResult r;
    r.estimate = f.estimate(kAttTerm);
    r.se = f.se(kAttTerm);
    r.t_stat = f.t(kAttTerm);
    r.p_value = p_value_normal(r.t_stat);
    return r;
}

} // namespace decentsim
