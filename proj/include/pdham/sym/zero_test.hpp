#pragma once

#include <cstdint>
#include <string>

#include "pdham/sym/expr.hpp"

namespace pdham::sym {

struct ZeroTestConfig {
    int samples = 16;
    double zero_tolerance = 1e-9;
    double nonzero_tolerance = 1e-6;
    std::uint64_t seed = 0;
};

enum class Decision { Zero, Nonzero, Unknown };

struct ZeroVerdict {
    Decision decision = Decision::Unknown;
    bool probabilistic = false;

    bool zero() const { return decision == Decision::Zero; }
    bool nonzero() const { return decision == Decision::Nonzero; }
    /// "zero", "zero (probabilistic)", "nonzero", "nonzero (numeric)", "unknown".
    std::string str() const;
};

/// Exact decision for the rational-function class; otherwise numeric
/// sampling at random points.
ZeroVerdict is_zero(const Expr& e, const ZeroTestConfig& cfg = {});

}  // namespace pdham::sym
