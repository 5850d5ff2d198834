#include "decentsim/distribution.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "decentsim/errors.hpp"

namespace decentsim {

DistributionSpec DistributionSpec::point(double c) {
    return {Family::point_mass, c, 0.0};
}

DistributionSpec DistributionSpec::uniform(double lo, double hi) {
    if (hi < lo) throw usage_error("uniform distribution needs a <= b");
    return {Family::uniform, lo, hi};
}

DistributionSpec DistributionSpec::truncated_normal(double mu, double sigma) {
    if (sigma < 0.0) throw usage_error("normal distribution needs sigma >= 0");
    return {Family::truncated_normal, mu, sigma};
}

DistributionSpec DistributionSpec::parse(const std::string& text) {
    auto open = text.find('(');
    auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw usage_error("cannot parse distribution '" + text + "'; expected family(args)");
    std::string family = text.substr(0, open);
    std::string args = text.substr(open + 1, close - open - 1);

    double p1 = 0.0, p2 = 0.0;
    int n = std::sscanf(args.c_str(), "%lf , %lf", &p1, &p2);
    if (family == "point") {
        if (n < 1) throw usage_error("point distribution needs one argument");
        return point(p1);
    }
    if (family == "uniform") {
        if (n != 2) throw usage_error("uniform distribution needs two arguments");
        return uniform(p1, p2);
    }
    if (family == "normal") {
        if (n != 2) throw usage_error("normal distribution needs two arguments");
        return truncated_normal(p1, p2);
    }
    throw usage_error("unsupported distribution family '" + family + "'");
}

double DistributionSpec::sample(rng::Stream& stream) const {
    switch (family) {
    case Family::point_mass:
        return a;
    case Family::uniform:
        return a + (b - a) * stream.uniform01();
    case Family::truncated_normal: {
        double z;
        do {
            z = stream.normal();
        } while (std::fabs(z) > 4.0);
        return a + b * z;
    }
    }
    throw usage_error("unsupported distribution family");
}

std::string DistributionSpec::label() const {
    char buf[64];
    switch (family) {
    case Family::point_mass:
        std::snprintf(buf, sizeof buf, "point(%g)", a);
        break;
    case Family::uniform:
        std::snprintf(buf, sizeof buf, "uniform(%g,%g)", a, b);
        break;
    case Family::truncated_normal:
        std::snprintf(buf, sizeof buf, "normal(%g,%g)", a, b);
        break;
    }
    return buf;
}

} // namespace decentsim
