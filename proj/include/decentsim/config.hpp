#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "decentsim/dgp.hpp"
#include "decentsim/distribution.hpp"

namespace decentsim {

// Settings for the `mc` subcommand.
struct MCSettings {
    int reps = 500;
    std::uint64_t base_seed = 1000;
    int threads = 1;
    bool fe = true;
    std::string outcome = "score_math";
};

// Settings for the `gains` subcommand grid.
struct GainsSettings {
    DistributionSpec distribution = DistributionSpec::uniform(-1.0, 1.0);
    int n_schools = 10;
    std::vector<double> budgets = {0.5, 1.0, 2.0};
    std::vector<double> cap_factors = {3.0};
    int draws = 2000;
    std::uint64_t seed = 7;
};

// The full run configuration: a flat key-value file, keys globally unique,
// section headers cosmetic. Unknown keys are rejected by name.
struct RunConfig {
    DGPConfig dgp;
    MCSettings mc;
    GainsSettings gains;

    static RunConfig defaults() { return {}; }
    static RunConfig from_file(const std::string& path);
    static RunConfig from_text(const std::string& text);

    void set(const std::string& key, const std::string& value);
    std::string render() const; // canonical printable form, re-parseable
};

} // namespace decentsim
