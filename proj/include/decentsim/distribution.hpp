#pragma once

#include <string>

#include "decentsim/rng.hpp"

namespace decentsim {

// Distribution of the school compatibility parameter s. Three families:
// a point mass, uniform(a, b), and normal(mu, sigma) truncated to
// mu +/- 4 sigma so every family has bounded support.
struct DistributionSpec {
    enum class Family { point_mass, uniform, truncated_normal };

    Family family = Family::point_mass;
    double a = 0.0; // point: value; uniform: lower; normal: mu
    double b = 0.0; // uniform: upper; normal: sigma

    static DistributionSpec point(double c);
    static DistributionSpec uniform(double lo, double hi);
    static DistributionSpec truncated_normal(double mu, double sigma);

    // Parse "point(c)", "uniform(a,b)", "normal(mu,sigma)".
    static DistributionSpec parse(const std::string& text);

    double sample(rng::Stream& stream) const;
    std::string label() const;
};

} // namespace decentsim
