#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace taraarch {

/// Invalid or unusable input data (bad prices, unparsable rows, too-short series).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A simulated path left the representable range.
class ExplosivePathError : public std::runtime_error {
public:
    ExplosivePathError(std::size_t index, const std::string& what)
        : std::runtime_error(what), index_(index) {}

    [[nodiscard]] std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// An estimation routine did not meet its convergence criterion.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-convergence that still carries the best iterate reached.
template <class T>
class BestIterateError : public ConvergenceError {
public:
    BestIterateError(const std::string& what, T best)
        : ConvergenceError(what), best_(std::move(best)) {}

    [[nodiscard]] const T& best() const noexcept { return best_; }

private:
    T best_;
};

/// The estimating equations cannot be solved (empty regime, rank-deficient design,
/// singular Hessian).
class IdentificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace taraarch
