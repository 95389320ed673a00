#pragma once

// Gaussian elimination over the field of rational functions in the atoms.

#include <functional>
#include <vector>

#include "pdham/sym/expr.hpp"
#include "pdham/sym/zero_test.hpp"

namespace pdham::sym {

using Matrix = std::vector<std::vector<Expr>>;
/// Normal form modulo side conditions; identity when there are none.
using Reducer = std::function<Expr(const Expr&)>;

struct LinearSolution {
    int rank = 0;
    std::vector<int> pivot_columns;
    /// Pivots in elimination order; their product is nonzero off the
    /// excluded locus.
    std::vector<Expr> pivots;
    /// One solution when consistent (free variables set to zero).
    std::vector<Expr> particular;
    std::vector<std::vector<Expr>> nullspace;
    /// Right-hand sides left on zero rows after elimination. Every entry
    /// must vanish for the system to be solvable.
    std::vector<Expr> conditions;

    bool consistent() const { return conditions.empty(); }
    Expr certificate() const;
};

/// Solves A x = b. Pivot decisions go through is_zero; an undecidable pivot
/// candidate throws an Unknown error naming it.
LinearSolution solve_linear(const Matrix& a, const std::vector<Expr>& b, const Reducer& reduce = {},
                            const ZeroTestConfig& cfg = {});

}  // namespace pdham::sym
