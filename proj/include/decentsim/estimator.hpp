#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "decentsim/panel.hpp"

namespace decentsim {

// A regression specification over panel columns. Interactions are lists of
// column names realized as product columns (so {"post","public","anglophone"}
// is the triple interaction). fixed_effect and include_intercept are
// mutually exclusive: demeaning absorbs the intercept.
struct RegressionSpec {
    std::string outcome;
    std::vector<std::string> covariates;
    std::vector<std::vector<std::string>> interactions;
    std::optional<std::string> fixed_effect;
    std::string cluster = "school_id";
    bool include_intercept = true;

    static std::string interaction_name(const std::vector<std::string>& parts);
};

// Design matrix with named columns, plus the grouping vectors needed
// downstream.
struct DesignMatrix {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<std::string> names;
    std::vector<std::int64_t> cluster_ids;
    std::vector<std::int64_t> fe_ids; // empty when no fixed effect
};

struct FitResult {
    std::vector<std::string> names;
    Eigen::VectorXd estimates;
    Eigen::MatrixXd vcov; // cluster-robust (CR1)
    Eigen::VectorXd t_stats;
    double r_squared = 0.0; // within-R^2 under fixed effects
    std::int64_t n_obs = 0;
    std::int64_t n_clusters = 0;
    Eigen::VectorXd residuals;
    std::vector<std::string> absorbed; // columns removed by demeaning
    bool fixed_effects = false;

    int index_of(const std::string& name) const; // -1 when absent
    double estimate(const std::string& name) const;
    double se(const std::string& name) const;
    double t(const std::string& name) const;
};

struct LeastSquaresSolution {
    Eigen::VectorXd coef;
    Eigen::VectorXd residuals;
};

// Minimizes ||y - X b|| via a column-pivoted Householder QR. Throws
// data_error on rank deficiency, naming the dependent column indices.
LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd& X,
                                         const Eigen::VectorXd& y);

// Builds the (un-demeaned) design from a spec: covariate columns, product
// columns for interactions, and an intercept when requested.
DesignMatrix build_design(const PanelDataset& dataset, const RegressionSpec& spec);

struct WithinTransformed {
    DesignMatrix design;                 // demeaned, absorbed columns dropped
    std::vector<std::string> absorbed;   // names of columns constant within groups
};

// Subtracts group means (per fixed-effect group) from the outcome and every
// regressor. Columns that are constant within every group demean to zero and
// are reported as absorbed rather than kept.
WithinTransformed within_transform(const PanelDataset& dataset, const RegressionSpec& spec);

// CR1 cluster-robust sandwich:
//   [G/(G-1)] * [(N-1)/(N-K)] * (X'X)^-1 (sum_g X_g'u_g u_g'X_g) (X'X)^-1
// Throws data_error with fewer than two clusters.
Eigen::MatrixXd cluster_robust_vcov(const Eigen::MatrixXd& X,
                                    const Eigen::VectorXd& residuals,
                                    const std::vector<std::int64_t>& cluster_ids);

// Full pipeline: build design, demean under fixed effects, solve, CR1
// variance, within- or plain R^2.
FitResult fit(const PanelDataset& dataset, const RegressionSpec& spec);

// Two-sided p-value from the normal approximation.
double p_value_normal(double t_stat);

} // namespace decentsim
