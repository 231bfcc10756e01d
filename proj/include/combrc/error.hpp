#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace combrc {

/// Invalid or inconsistent experiment configuration. The message starts with
/// the offending field path, e.g. "comb.n_lines: must be >= 1".
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or insufficient input data (dataset files, short sequences).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A reservoir state left the finite, bounded regime.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t layer, std::size_t timestep)
        : std::runtime_error("reservoir diverged in layer " + std::to_string(layer + 1)
                             + " at timestep " + std::to_string(timestep)),
          layer_(layer),
          timestep_(timestep)
    {
    }

    std::size_t layer() const noexcept { return layer_; }
    std::size_t timestep() const noexcept { return timestep_; }

private:
    std::size_t layer_;
    std::size_t timestep_;
};

}  // namespace combrc
