#pragma once

#include <array>
#include <map>
#include <string>

#include "decentsim/estimator.hpp"
#include "decentsim/panel.hpp"

namespace decentsim {

struct HeterogeneityTerm {
    double estimate = 0.0;
    double se = 0.0;
    double t = 0.0;
};

// Summary of one difference-in-differences estimate. cell_means is indexed
// [post][public].
struct DiDSummary {
    double att_estimate = 0.0;
    double se = 0.0;
    double t_stat = 0.0;
    std::array<std::array<double, 2>, 2> cell_means{};
    std::string specification;
    std::map<std::string, HeterogeneityTerm> heterogeneity;
    FitResult fit;
};

// Canonical 2x2 estimator: difference of group-mean differences. The point
// estimate comes straight from the cell means; the cluster-robust SE comes
// from the equivalent saturated regression, and the two routes are checked
// against each other. Throws data_error on an empty cell.
DiDSummary two_by_two(const PanelDataset& dataset, const std::string& outcome);

// The headline specification: pupil and school covariates, post, public and
// their product, with or without school fixed effects, optionally restricted
// to the grade-2 subsample (which drops the grade dummy).
DiDSummary fit_paper_spec(const PanelDataset& dataset, const std::string& outcome,
                          bool with_fe, bool grade2_only);

// Fixed-effects specification with a binary moderator: adds post:moderator
// and the triple product post:public:moderator. Group-level terms absorbed
// by the fixed effects are reported, not refit.
DiDSummary fit_heterogeneity(const PanelDataset& dataset, const std::string& outcome,
                             const std::string& moderator);

struct PlaceboResult {
    double estimate = 0.0;
    double se = 0.0;
    double t_stat = 0.0;
    double p_value = 1.0;
};

// Parallel-trends diagnostic: re-estimates the design on pre-treatment rows
// only, pretending treatment started at the last pre-treatment period.
// Needs at least three periods (two pre periods).
PlaceboResult placebo_pretrend(const PanelDataset& dataset, const std::string& outcome);

} // namespace decentsim
