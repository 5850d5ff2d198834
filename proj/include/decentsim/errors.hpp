#pragma once

#include <stdexcept>
#include <string>

namespace decentsim {

// Bad flags, bad config keys, nonsense parameter values. Maps to exit code 1.
class usage_error : public std::runtime_error {
public:
    explicit usage_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Problems with input data: malformed files, degenerate datasets,
// unidentifiable designs. Maps to exit code 2.
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace decentsim
