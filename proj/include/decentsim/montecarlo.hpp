#pragma once

#include <cstdint>
#include <vector>

#include "decentsim/dgp.hpp"
#include "decentsim/distribution.hpp"
#include "decentsim/estimator.hpp"
#include "decentsim/model.hpp"

namespace decentsim {

struct MCRep {
    int rep = 0;
    std::uint64_t seed = 0;
    double estimate = 0.0;
    double se = 0.0;
    bool ci_covers = false;   // 95% normal CI contains the true effect
    bool rejects_true = false; // 5% t-test rejects the true-value null
};

struct MCResult {
    int n_reps = 0;
    double true_att = 0.0;
    double mean_estimate = 0.0;
    double bias = 0.0; // mean_estimate - true_att
    double rmse = 0.0;
    double ci_coverage_95 = 0.0;
    double rejection_rate_5pct = 0.0;
    double mean_se = 0.0;
    double sd_estimates = 0.0; // sample sd (n-1)
    std::vector<MCRep> reps;
};

// Replicates generate -> fit n_reps times; replication r runs on a seed
// derived from (base_seed, r), so the result is identical at any thread
// count. A failing replication aborts with its index and seed in the
// message. The estimate tracked is the spec's "post:public" coefficient.
MCResult run_mc(const DGPConfig& config, const RegressionSpec& spec, int n_reps,
                std::uint64_t base_seed, int n_threads = 1);

struct GainCell {
    DistributionSpec distribution;
    int n_schools = 0;
    double budget = 0.0;
    double cap = 0.0;
    GainReport report;
};

// One expected-gains run per (distribution, budget, cap-factor) grid cell,
// all sharing the same seed so cells are comparable draw-for-draw.
std::vector<GainCell> run_model_mc(const std::vector<DistributionSpec>& distributions,
                                   int n_schools, const std::vector<double>& budgets,
                                   const std::vector<double>& cap_factors, int n_draws,
                                   std::uint64_t seed);

} // namespace decentsim
