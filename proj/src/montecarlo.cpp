#include "decentsim/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "decentsim/errors.hpp"
#include "decentsim/rng.hpp"

namespace decentsim {

namespace {
constexpr double kZ95 = 1.959963984540054;
}

MCResult run_mc(const DGPConfig& config, const RegressionSpec& spec, int n_reps,
                std::uint64_t base_seed, int n_threads) {
    if (n_reps < 1) throw usage_error("run_mc: n_reps must be >= 1");
    if (n_threads < 1) n_threads = 1;

    const double truth = true_att(config);
    std::vector<MCRep> reps(static_cast<std::size_t>(n_reps));
    std::atomic<int> next{0};
    std::string first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            int r = next.fetch_add(1);
            if (r >= n_reps) return;
            std::uint64_t seed = rng::mix(base_seed, static_cast<std::uint64_t>(r));
            try {
                DGPConfig cfg = config;
                cfg.seed = seed;
                PanelDataset panel = generate_panel(cfg);
                FitResult f = fit(panel, spec);
                MCRep rep;
                rep.rep = r;
                rep.seed = seed;
                rep.estimate = f.estimate("post:public");
                rep.se = f.se("post:public");
                rep.ci_covers = std::fabs(rep.estimate - truth) <= kZ95 * rep.se;
                rep.rejects_true = std::fabs((rep.estimate - truth) / rep.se) > kZ95;
                reps[static_cast<std::size_t>(r)] = rep;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error.empty())
                    first_error = "replication " + std::to_string(r) + " (seed " +
                                  std::to_string(seed) + ") failed: " + e.what();
                next.store(n_reps);
                return;
            }
        }
    };

    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (!first_error.empty()) throw data_error(first_error);

    // aggregate in fixed index order
    MCResult out;
    out.n_reps = n_reps;
    out.true_att = truth;
    double sum = 0.0, sum_se = 0.0, sum_sq_err = 0.0;
    int covered = 0, rejected = 0;
    for (const auto& rep : reps) {
        sum += rep.estimate;
        sum_se += rep.se;
        sum_sq_err += (rep.estimate - truth) * (rep.estimate - truth);
        covered += rep.ci_covers ? 1 : 0;
        rejected += rep.rejects_true ? 1 : 0;
    }
    out.mean_estimate = sum / n_reps;
    out.bias = out.mean_estimate - truth;
    out.rmse = std::sqrt(sum_sq_err / n_reps);
    out.mean_se = sum_se / n_reps;
    out.ci_coverage_95 = double(covered) / n_reps;
    out.rejection_rate_5pct = double(rejected) / n_reps;
    if (n_reps > 1) {
        double ss = 0.0;
        for (const auto& rep : reps) ss += (rep.estimate - out.mean_estimate) *
                                          (rep.estimate - out.mean_estimate);
        out.sd_estimates = std::sqrt(ss / (n_reps - 1));
    }
    out.reps = std::move(reps);
    return out;
}

std::vector<GainCell> run_model_mc(const std::vector<DistributionSpec>& distributions,
                                   int n_schools, const std::vector<double>& budgets,
                                   const std::vector<double>& cap_factors, int n_draws,
                                   std::uint64_t seed) {
    if (distributions.empty() || budgets.empty() || cap_factors.empty())
        throw usage_error("run_model_mc: empty grid");
    for (double f : cap_factors)
        if (f < 1.0) throw usage_error("run_model_mc: cap factor below 1 leaves the budget unspendable");

    std::vector<GainCell> cells;
    for (const auto& dist : distributions)
        for (double budget : budgets)
            for (double factor : cap_factors) {
                GainCell cell;
                cell.distribution = dist;
                cell.n_schools = n_schools;
                cell.budget = budget;
                cell.cap = factor * budget;
                cell.report = expected_gains(dist, n_schools, budget, cell.cap, n_draws, seed);
                cells.push_back(cell);
            }
    return cells;
}

} // namespace decentsim
