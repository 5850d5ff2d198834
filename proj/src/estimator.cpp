#include "decentsim/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "decentsim/errors.hpp"

namespace decentsim {

std::string RegressionSpec::interaction_name(const std::vector<std::string>& parts) {
    std::string name;
    for (const auto& p : parts) {
        if (!name.empty()) name += ":";
        name += p;
    }
    return name;
}

int FitResult::index_of(const std::string& name) const {
    for (std::size_t j = 0; j < names.size(); ++j)
        if (names[j] == name) return static_cast<int>(j);
    return -1;
}

double FitResult::estimate(const std::string& name) const {
    int j = index_of(name);
    if (j < 0) throw data_error("fit has no coefficient '" + name + "'");
    return estimates[j];
}

double FitResult::se(const std::string& name) const {
    int j = index_of(name);
    if (j < 0) throw data_error("fit has no coefficient '" + name + "'");
    return std::sqrt(vcov(j, j));
}

double FitResult::t(const std::string& name) const {
    int j = index_of(name);
    if (j < 0) throw data_error("fit has no coefficient '" + name + "'");
    return t_stats[j];
}

namespace {

// Trailing permuted columns of a rank-deficient QR are the dependent ones.
std::vector<Eigen::Index> dependent_columns(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr,
                                            Eigen::Index n_cols) {
    std::vector<Eigen::Index> out;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index j = qr.rank(); j < n_cols; ++j) out.push_back(perm[j]);
    std::sort(out.begin(), out.end());
    return out;
}

LeastSquaresSolution solve_with_names(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                      const std::vector<std::string>* names) {
    if (X.rows() < X.cols())
        throw data_error("least squares: fewer rows than columns");
    if (X.rows() != y.rows())
        throw data_error("least squares: design and outcome lengths differ");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < X.cols()) {
        std::string cols;
        for (Eigen::Index j : dependent_columns(qr, X.cols())) {
            if (!cols.empty()) cols += ", ";
            cols += names ? (*names)[std::size_t(j)] : std::to_string(j);
        }
        throw data_error("least squares: design is rank deficient (dependent column(s): " +
                         cols + ")");
    }

    LeastSquaresSolution sol;
    sol.coef = qr.solve(y);
    sol.residuals = y - X * sol.coef;
    return sol;
}

} // namespace

LeastSquaresSolution solve_least_squares(const Eigen::MatrixXd& X,
                                         const Eigen::VectorXd& y) {
    return solve_with_names(X, y, nullptr);
}

DesignMatrix build_design(const PanelDataset& dataset, const RegressionSpec& spec) {
    if (dataset.rows.empty()) throw data_error("cannot build a design from an empty panel");
    if (spec.fixed_effect && spec.include_intercept)
        throw usage_error("fixed effect and intercept are mutually exclusive");

    std::vector<std::string> missing;
    auto check = [&](const std::string& name) {
        if (!dataset.has_column(name)) missing.push_back(name);
    };
    check(spec.outcome);
    for (const auto& c : spec.covariates) check(c);
    for (const auto& parts : spec.interactions)
        for (const auto& c : parts) check(c);
    if (spec.fixed_effect) check(*spec.fixed_effect);
    check(spec.cluster);
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw data_error("missing column(s): " + list);
    }

    const auto n = static_cast<Eigen::Index>(dataset.n_rows());
    DesignMatrix d;
    std::vector<std::pair<std::string, std::vector<double>>> cols;
    if (spec.include_intercept) cols.emplace_back("const", std::vector<double>(std::size_t(n), 1.0));
    for (const auto& c : spec.covariates) cols.emplace_back(c, dataset.column(c));
    for (const auto& parts : spec.interactions) {
        std::vector<double> prod(std::size_t(n), 1.0);
        for (const auto& c : parts) {
            auto v = dataset.column(c);
            for (std::size_t i = 0; i < prod.size(); ++i) prod[i] *= v[i];
        }
        cols.emplace_back(RegressionSpec::interaction_name(parts), std::move(prod));
    }

    d.X.resize(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        d.names.push_back(cols[j].first);
        for (Eigen::Index i = 0; i < n; ++i) d.X(i, Eigen::Index(j)) = cols[j].second[std::size_t(i)];
    }
    auto yv = dataset.column(spec.outcome);
    d.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) d.y[i] = yv[std::size_t(i)];

    auto cl = dataset.column(spec.cluster);
    d.cluster_ids.resize(std::size_t(n));
    for (std::size_t i = 0; i < std::size_t(n); ++i)
        d.cluster_ids[i] = static_cast<std::int64_t>(cl[i]);
    std::set<std::int64_t> distinct(d.cluster_ids.begin(), d.cluster_ids.end());
    if (distinct.size() < 2)
        throw data_error("cluster column '" + spec.cluster + "' has fewer than 2 distinct values");

    if (spec.fixed_effect) {
        auto fe = dataset.column(*spec.fixed_effect);
        d.fe_ids.resize(std::size_t(n));
        for (std::size_t i = 0; i < std::size_t(n); ++i)
            d.fe_ids[i] = static_cast<std::int64_t>(fe[i]);
    }
    return d;
}

namespace {

// Demean a column in place per group; returns max |value| after demeaning.
double demean_by_group(Eigen::Ref<Eigen::VectorXd> v, const std::vector<std::int64_t>& groups) {
    std::map<std::int64_t, std::pair<double, std::int64_t>> acc; // sum, count
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        auto& a = acc[groups[std::size_t(i)]];
        a.first += v[i];
        a.second += 1;
    }
    double max_abs = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const auto& a = acc[groups[std::size_t(i)]];
        v[i] -= a.first / double(a.second);
        max_abs = std::max(max_abs, std::fabs(v[i]));
    }
    return max_abs;
}

} // namespace

WithinTransformed within_transform(const PanelDataset& dataset, const RegressionSpec& spec) {
    if (!spec.fixed_effect)
        throw usage_error("within_transform requires a fixed_effect column");
    DesignMatrix d = build_design(dataset, spec);

    WithinTransformed out;
    demean_by_group(d.y, d.fe_ids);

    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < d.X.cols(); ++j) {
        double scale = d.X.col(j).cwiseAbs().maxCoeff();
        double after = demean_by_group(d.X.col(j), d.fe_ids);
        if (after <= 1e-9 * (1.0 + scale))
            out.absorbed.push_back(d.names[std::size_t(j)]);
        else
            keep.push_back(j);
    }

    out.design.y = d.y;
    out.design.cluster_ids = d.cluster_ids;
    out.design.fe_ids = d.fe_ids;
    out.design.X.resize(d.X.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        out.design.X.col(Eigen::Index(j)) = d.X.col(keep[j]);
        out.design.names.push_back(d.names[std::size_t(keep[j])]);
    }
    return out;
}

Eigen::MatrixXd cluster_robust_vcov(const Eigen::MatrixXd& X,
                                    const Eigen::VectorXd& residuals,
                                    const std::vector<std::int64_t>& cluster_ids) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    if (residuals.size() != n || static_cast<Eigen::Index>(cluster_ids.size()) != n)
        throw data_error("cluster vcov: length mismatch");

    // scores per cluster, accumulated in cluster-id order for determinism
    std::map<std::int64_t, Eigen::VectorXd> scores;
    for (Eigen::Index i = 0; i < n; ++i) {
        auto [it, inserted] = scores.try_emplace(cluster_ids[std::size_t(i)],
                                                 Eigen::VectorXd::Zero(k));
        it->second += X.row(i).transpose() * residuals[i];
    }
    const auto g = static_cast<std::int64_t>(scores.size());
    if (g < 2) throw data_error("cluster vcov: variance unidentified with a single cluster");

    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
    for (const auto& [id, s] : scores) meat += s * s.transpose();

    Eigen::MatrixXd xtx = X.transpose() * X;
    Eigen::MatrixXd bread = xtx.ldlt().solve(Eigen::MatrixXd::Identity(k, k));

    const double nn = double(n);
    const double correction = (double(g) / double(g - 1)) * ((nn - 1.0) / (nn - double(k)));
    Eigen::MatrixXd v = correction * bread * meat * bread;
    return 0.5 * (v + v.transpose()); // symmetrize fp noise
}

FitResult fit(const PanelDataset& dataset, const RegressionSpec& spec) {
    FitResult result;
    DesignMatrix d;
    double total_ss = 0.0;

    if (spec.fixed_effect) {
        WithinTransformed wt = within_transform(dataset, spec);
        d = std::move(wt.design);
        result.absorbed = std::move(wt.absorbed);
        result.fixed_effects = true;
        total_ss = d.y.squaredNorm(); // within variation
    } else {
        d = build_design(dataset, spec);
        if (spec.include_intercept) {
            double mean = d.y.mean();
            total_ss = (d.y.array() - mean).matrix().squaredNorm();
        } else {
            total_ss = d.y.squaredNorm();
        }
    }
    if (d.X.cols() == 0)
        throw data_error("no regressors left after absorption");

    LeastSquaresSolution sol = solve_with_names(d.X, d.y, &d.names);

    result.names = d.names;
    result.estimates = sol.coef;
    result.residuals = sol.residuals;
    result.vcov = cluster_robust_vcov(d.X, sol.residuals, d.cluster_ids);
    result.n_obs = d.X.rows();
    std::set<std::int64_t> distinct(d.cluster_ids.begin(), d.cluster_ids.end());
    result.n_clusters = static_cast<std::int64_t>(distinct.size());

    result.t_stats.resize(sol.coef.size());
    for (Eigen::Index j = 0; j < sol.coef.size(); ++j) {
        double v = result.vcov(j, j);
        result.t_stats[j] = v > 0.0 ? sol.coef[j] / std::sqrt(v) : 0.0;
    }

    double ssr = sol.residuals.squaredNorm();
    result.r_squared = total_ss > 0.0 ? 1.0 - ssr / total_ss : (ssr <= 1e-12 ? 1.0 : 0.0);
    result.r_squared = std::clamp(result.r_squared, 0.0, 1.0);
    return result;
}

double p_value_normal(double t_stat) {
    return std::erfc(std::fabs(t_stat) / std::sqrt(2.0));
}

} // namespace decentsim
