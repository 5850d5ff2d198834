#include "decentsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace decentsim {

namespace {

bool all_finite(const School& sc) {
    return std::isfinite(sc.s) && std::isfinite(sc.e) && std::isfinite(sc.l0);
}

std::string school_label(const School& sc, std::size_t index) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "school %lld (index %zu)",
                  static_cast<long long>(sc.id), index);
    return buf;
}

} // namespace

double produce_human_capital(const School& school, double delta_l) {
    if (!all_finite(school) || !std::isfinite(delta_l))
        throw std::domain_error("produce_human_capital: non-finite input");
    if (delta_l < 0.0)
        throw std::domain_error("produce_human_capital: delta_l must be >= 0");
    return school.e + school.s * school.l0 + school.s * delta_l;
}

AllocationPlan uniform_allocation(int n_schools, double per_school_budget) {
    if (n_schools < 1)
        throw std::domain_error("uniform_allocation: need at least one school");
    if (!(per_school_budget > 0.0) || !std::isfinite(per_school_budget))
        throw std::domain_error("uniform_allocation: per-school budget must be > 0");
    AllocationPlan plan;
    plan.increments.assign(static_cast<std::size_t>(n_schools), per_school_budget);
    plan.per_school_budget = per_school_budget;
    plan.total_budget = n_schools * per_school_budget;
    return plan;
}

AllocationPlan informed_allocation(const std::vector<School>& schools,
                                   double per_school_budget, double cap) {
    const std::size_t n = schools.size();
    if (n == 0)
        throw std::domain_error("informed_allocation: need at least one school");
    if (!(per_school_budget > 0.0) || !std::isfinite(per_school_budget))
        throw std::domain_error("informed_allocation: per-school budget must be > 0");
    if (cap < per_school_budget)
        throw std::domain_error("informed_allocation: cap below per-school budget makes the budget unspendable");
    for (std::size_t i = 0; i < n; ++i)
        if (!all_finite(schools[i]))
            throw std::domain_error("informed_allocation: non-finite field in " + school_label(schools[i], i));

    AllocationPlan plan;
    plan.per_school_budget = per_school_budget;
    plan.total_budget = static_cast<double>(n) * per_school_budget;

    // Degenerate objective: every feasible plan is equally good, return the
    // uniform split for determinism.
    bool all_equal = std::all_of(schools.begin(), schools.end(),
                                 [&](const School& sc) { return sc.s == schools.front().s; });
    if (all_equal) {
        plan.increments.assign(n, per_school_budget);
        return plan;
    }

    // Box bounds implied by the per-school condition s_i*dl_i >= s_i*budget:
    // positive s forces dl_i >= budget, negative s forces dl_i <= budget.
    std::vector<double> lo(n, 0.0), hi(n, cap);
    for (std::size_t i = 0; i < n; ++i) {
        if (schools[i].s > 0.0) lo[i] = per_school_budget;
        if (schools[i].s < 0.0) hi[i] = per_school_budget;
    }

    plan.increments = lo;
    double remaining = plan.total_budget - std::accumulate(lo.begin(), lo.end(), 0.0);

    // Spend what the lower bounds leave over on the highest-s schools first.
    // For a linear objective over a box intersected with one budget equality
    // this greedy is the exact optimum.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (schools[a].s != schools[b].s) return schools[a].s > schools[b].s;
        return schools[a].id < schools[b].id;
    });

    for (std::size_t idx : order) {
        if (remaining <= 0.0) break;
        double room = hi[idx] - lo[idx];
        double add = std::min(remaining, room);
        plan.increments[idx] += add;
        remaining -= add;
    }
    return plan;
}

double realized_gain(const std::vector<School>& schools, const AllocationPlan& plan) {
    if (schools.size() != plan.increments.size())
        throw std::domain_error("realized_gain: plan and school list differ in length");
    double total = 0.0;
    for (std::size_t i = 0; i < schools.size(); ++i)
        total += schools[i].s * plan.increments[i];
    return total / static_cast<double>(schools.size());
}

FeasibilityReport check_feasibility(const AllocationPlan& plan,
                                    const std::vector<School>& schools) {
    constexpr double tol = 1e-9;
    const std::size_t n = schools.size();
    if (plan.increments.size() != n)
        throw std::domain_error("check_feasibility: plan and school list differ in length");

    FeasibilityReport report;
    double sum = std::accumulate(plan.increments.begin(), plan.increments.end(), 0.0);
    if (std::fabs(sum - plan.total_budget) > tol) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "budget not exhausted: sum %.12g vs total %.12g",
                      sum, plan.total_budget);
        report.violations.emplace_back(buf);
    }
    double mean = sum / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (plan.increments[i] < -tol)
            report.violations.push_back(school_label(schools[i], i) + ": negative increment");
        if (schools[i].s * plan.increments[i] < schools[i].s * mean - tol) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s: s*dl = %.12g below s*mean = %.12g",
                          school_label(schools[i], i).c_str(),
                          schools[i].s * plan.increments[i], schools[i].s * mean);
            report.violations.emplace_back(buf);
        }
    }
    report.feasible = report.violations.empty();
    return report;
}

GainReport expected_gains(const DistributionSpec& s_distribution, int n_schools,
                          double per_school_budget, double cap, int n_draws,
                          std::uint64_t seed) {
    if (n_draws < 1)
        throw std::domain_error("expected_gains: n_draws must be >= 1");
    if (n_schools < 1)
        throw std::domain_error("expected_gains: need at least one school");

    const AllocationPlan uniform = uniform_allocation(n_schools, per_school_budget);
    std::vector<School> schools(static_cast<std::size_t>(n_schools));
    for (int i = 0; i < n_schools; ++i) schools[static_cast<std::size_t>(i)].id = i;

    double sum_delta = 0.0, sum_rho = 0.0, sum_lambda = 0.0, sum_lambda_sq = 0.0;
    for (int d = 0; d < n_draws; ++d) {
        rng::Stream stream = rng::substream(seed, {static_cast<std::uint64_t>(d)});
        for (auto& sc : schools) sc.s = s_distribution.sample(stream);

        AllocationPlan informed = informed_allocation(schools, per_school_budget, cap);
        // Both regimes evaluated through the same objective path so the
        // degenerate case compares bit-identical plans.
        double delta_d = realized_gain(schools, uniform);
        double rho_d = realized_gain(schools, informed);
        if (rho_d < delta_d - 1e-12)
            throw std::logic_error("expected_gains: informed plan lost to the uniform plan");

        double lambda_d = rho_d - delta_d;
        sum_delta += delta_d;
        sum_rho += rho_d;
        sum_lambda += lambda_d;
        sum_lambda_sq += lambda_d * lambda_d;
    }

    GainReport report;
    report.n_draws = n_draws;
    report.delta_centralized = sum_delta / n_draws;
    report.rho_decentralized = sum_rho / n_draws;
    report.lambda_gain = report.rho_decentralized - report.delta_centralized;
    if (n_draws > 1) {
        double mean = sum_lambda / n_draws;
        double var = (sum_lambda_sq - n_draws * mean * mean) / (n_draws - 1);
        report.standard_error = std::sqrt(std::max(var, 0.0) / n_draws);
    }
    return report;
}

} // namespace decentsim
