#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "decentsim/panel.hpp"

namespace decentsim {

// Parameters of the synthetic pupil-panel generator. Outcomes follow
//
//   score = theta0 + Z'theta1 + W'theta2 + theta_grade*grade_high
//         + alpha0*P + alpha1*dT + effect_i*dT*P
//         + pretrend_gap*P*t  (pre periods only)
//         + eps0 + eps1*(mu0 + mu1*dT + mu2*P + eps2)
//
// with Z = (age, girl, books, electricity) at the pupil level, W Gaussian
// school covariates, and effect_i drawn once per school around lambda0.
// eps0 splits evenly between a time-invariant school component and a pupil
// component; eps1 and eps2 are school-period shocks shared by every pupil in
// the school-period. eps1 and eps2 are correlated (selection_corr) only in
// post-period public rows, where the informed allocation is the one doing
// the selecting; everywhere else they are independent, which is the
// no-selection identifying condition.
struct DGPConfig {
    int n_municipalities = 50;
    int schools_per_municipality = 4;
    int pupils_per_school = 15;
    int n_periods = 2;
    double share_public = 0.75;
    double share_anglophone = 0.284;
    std::uint64_t seed = 42;

    double theta0 = 60.0;
    std::vector<double> theta1 = {-0.5, -0.5, 3.0, 2.0}; // age, girl, books, electricity
    std::vector<double> theta2 = {1.0, -1.0};            // school covariates w1..wK
    double theta_grade = -5.0;
    double alpha0 = -6.0;
    double alpha1 = -3.0;
    double lambda0 = 10.2;
    std::optional<double> lambda0_grade2; // defaults to lambda0
    double lambda_spread = 2.0;
    double lambda_gap_anglophone = 0.0;

    double mu0 = 1.0;
    double mu1 = 0.5;
    double mu2 = 1.0;

    double sd_eps0 = 10.0;
    double sd_eps1 = 1.0;
    double sd_eps2 = 1.0;
    double selection_corr = 0.0;
    double pretrend_gap = 0.0;

    void validate() const; // throws usage_error on out-of-range fields
};

// Generates the panel. Deterministic for a fixed config: school, school-period
// and pupil draws each use substreams keyed by their indices, so output does
// not depend on generation order. Throws data_error when the realized design
// is degenerate (all schools in one group).
PanelDataset generate_panel(const DGPConfig& config);

// The planted average effect for treated (public) pupils.
double true_att(const DGPConfig& config);

} // namespace decentsim
