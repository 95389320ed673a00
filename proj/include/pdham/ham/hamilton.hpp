#pragma once

// PD-Hamilton equations, kernels, connection solving, the constraint
// algorithm and the variational correspondence.

#include <optional>
#include <string>
#include <vector>

#include "pdham/sym/linalg.hpp"
#include "pdham/sysdef/model.hpp"

namespace pdham::ham {

using sym::Expr;
using sysdef::ConstraintSet;
using sysdef::Form1;
using sysdef::Form2;
using sysdef::PDSystem;
using sysdef::VerticalField;

/// R_b = 2ω^i_{ab} D[i][a] - ω_b
PDSystem hamilton_residuals(const Form2& w);

/// Normal form modulo a constraint set: constraints linear in some
/// coordinate with constant coefficient are solved for it, the others act by
/// polynomial division of the numerator.
sym::Reducer make_reducer(const ConstraintSet* c);

struct KernelResult {
    std::vector<VerticalField> basis;
    int rank = 0;
    std::vector<Expr> pivots;
    Expr certificate;  // product of pivots; kernel dimension is constant where it is nonzero
};

/// Basis of {Y : ω^i_{ab} Y^a = 0 for all i, b}.
KernelResult kernel_vertical(const Form2& w, const ConstraintSet* c = nullptr, const sym::ZeroTestConfig& cfg = {});

struct FullKernel {
    KernelResult vertical;
    /// Generic basis of ker ω: elements of ker ω̱ also annihilated by ω_a.
    std::vector<VerticalField> basis;
    /// Values ω_a K^a on the vertical kernel basis that are not zero; where
    /// they all vanish, ker ω grows back to ker ω̱.
    std::vector<Expr> strata;
};

FullKernel kernel_full(const Form2& w, const ConstraintSet* c = nullptr, const sym::ZeroTestConfig& cfg = {});

enum class HamiltonianKind { Hamiltonian, Degenerate };

struct HamiltonianReport {
    HamiltonianKind kind = HamiltonianKind::Degenerate;
    KernelResult kernel;
};

HamiltonianReport is_hamiltonian(const Form2& w, const sym::ZeroTestConfig& cfg = {});

struct ConnectionSolution {
    bool solvable = false;
    sysdef::Connection particular;
    int homogeneous_dim = 0;
    std::vector<Expr> conditions;  // normalized solvability conditions
    Expr certificate;
};

/// Solves 2ω^i_{ab}∇^a_i = ω_b modulo the constraints.
ConnectionSolution solve_connection(const Form2& w, const ConstraintSet* c = nullptr,
                                    const sym::ZeroTestConfig& cfg = {});

/// Numerator of e with positive leading coefficient; nonzero constants
/// become 1.
Expr normalize_condition(const Expr& e);

/// One step of the constraint recursion. Returns c itself (same equations)
/// at a fixed point.
ConstraintSet constraint_step(const Form2& w, const ConstraintSet& c, const sym::ZeroTestConfig& cfg = {});

struct ConstraintRun {
    std::vector<ConstraintSet> stages;
    bool terminated = false;
    bool empty = false;  // some stage contains a nonzero constant
};

ConstraintRun constraint_algorithm(const Form2& w, int max_steps, const sym::ZeroTestConfig& cfg = {});

/// θ^i_a D[i][a] - H
Expr lagrangian_of(const Form1& theta);

/// δL/δy^b = ∂_b L - (∂_i + D[i][a] ∂_a)(∂L/∂D[i][b]); L must be affine in
/// the jet placeholders.
PDSystem euler_lagrange(const Expr& L, const sysdef::ChartPtr& chart);

}  // namespace pdham::ham
