#pragma once

// Component calculus of affine forms: the restricted differential, insertions
// of vertical fields and connections, and a fiber-radial homotopy.

#include <string>
#include <vector>

#include "pdham/sym/zero_test.hpp"
#include "pdham/sysdef/model.hpp"

namespace pdham::affcalc {

using sym::Expr;
using sysdef::Connection;
using sysdef::Form0;
using sysdef::Form1;
using sysdef::Form2;
using sysdef::VerticalField;

/// θ^i_a = ∂_a f^i, H = -∂_i f^i
Form1 delta0(const Form0& f);
/// ω^i_{ab} = ½(∂_a θ^i_b - ∂_b θ^i_a), ω_a = -(∂_a H + ∂_i θ^i_a)
Form2 delta1(const Form1& theta);

struct Residual {
    std::string name;
    Expr expr;
    sym::ZeroVerdict verdict;
};

struct ClosednessReport {
    std::vector<Residual> residuals;  // every R1^i_{abc} (a<b<c) and R2_{ab} (a<b)

    bool closed() const;
    bool undecided() const;
};

ClosednessReport closedness_residuals(const Form2& w, const sym::ZeroTestConfig& cfg = {});

/// θ^i_b = 2ω^i_{ab} Y^a, H = -ω_a Y^a
Form1 insert_vertical(const VerticalField& y, const Form2& w);

/// Full skew family ω^i_{ab}, indexed [i][a][b].
std::vector<std::vector<std::vector<Expr>>> linear_part(const Form2& w);

/// c_b d^V y^b ⊗ d^n x
struct CoForm {
    sysdef::ChartPtr chart;
    std::vector<Expr> c;
};

/// c_b = ω_b - 2ω^i_{ab} ∇^a_i
CoForm insert_connection(const Connection& nabla, const Form2& w);
/// θ^i_a ∇^a_i - H
Expr insert_connection1(const Connection& nabla, const Form1& theta);

/// Y^a ∂_a f^i
Form0 lie_derivative_current(const VerticalField& y, const Form0& f);
/// Y1^a ∂_a Y2^b - Y2^a ∂_a Y1^b
VerticalField field_bracket(const VerticalField& y1, const VerticalField& y2);

/// A θ with delta1(θ) = ω by the homotopy to the fiber origin. Throws a
/// Falsified error when ω is not closed and an Unsupported error when some
/// component is not polynomial in the fiber coordinates.
Form1 potential(const Form2& w, const sym::ZeroTestConfig& cfg = {});

}  // namespace pdham::affcalc
