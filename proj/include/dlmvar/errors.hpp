#pragma once

#include <stdexcept>
#include <string>

namespace dlmvar {

/// A prior specification or run configuration violates its constraints.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Observed data is unusable (too short, missing, non-numeric).
struct data_error : std::runtime_error {
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numerical contract was violated (dimension mismatch, asymmetry, ...).
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dlmvar
