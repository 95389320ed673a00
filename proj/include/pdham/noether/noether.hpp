#pragma once

// Noether symmetries and currents: verification, determining systems and the
// Poisson bracket of currents.

#include <string>
#include <vector>

#include "pdham/affcalc/calculus.hpp"

namespace pdham::noether {

using affcalc::Residual;
using sym::Expr;
using sysdef::Form0;
using sysdef::Form2;
using sysdef::VerticalField;

/// i_Y ω - δf in components.
struct NoetherResidual {
    std::vector<std::vector<Expr>> a;  // A^i_b = 2ω^i_{ab} Y^a - ∂_b f^i, [i][b]
    Expr b;                            // B = ω_a Y^a - ∂_i f^i
};

NoetherResidual noether_residual(const Form2& w, const VerticalField& y, const Form0& f);

enum class Status { Verified, Falsified, Unknown };
const char* status_name(Status s);

struct Verdict {
    Status status = Status::Unknown;
    std::vector<Residual> components;  // every component, in order A[i; b]..., B
};

/// Decides i_Y ω = δf after rewriting with the relations.
Verdict is_noether_pair(const Form2& w, const VerticalField& y, const Form0& f, const std::vector<sym::Rule>& relations = {},
                        const sym::ZeroTestConfig& cfg = {});

struct DeterminingOptions {
    std::vector<std::string> split;  // split the residuals into coefficients of these symbols
    bool square = false;             // rationalize a square root before splitting
    std::vector<sym::Rule> relations;
};

struct Equation {
    std::string name;
    Expr expr;
};

/// Nonzero components of the Noether residual with the ansatz unknowns kept
/// formal, optionally split coefficient-wise.
std::vector<Equation> determining_system(const Form2& w, const VerticalField& y, const Form0& f,
                                         const DeterminingOptions& opt = {});

struct Pair {
    VerticalField y;
    Form0 f;
};

/// L_{Y1} f2, cross-checked against the contraction of Y1 and Y2 with ω.
/// Throws a Falsified error naming the pair that does not verify; a
/// disagreement of the two representations is an internal error.
Form0 poisson_bracket(const Form2& w, const Pair& p1, const Pair& p2, const std::vector<sym::Rule>& relations = {},
                      const sym::ZeroTestConfig& cfg = {});

/// Y1^b 2ω^i_{ab} Y2^a
Form0 contraction(const Form2& w, const VerticalField& y1, const VerticalField& y2);

/// f is base-only and ∂_i f^i vanishes, after rewriting with the relations.
Verdict is_trivial_current(const Form0& f, const std::vector<sym::Rule>& relations = {},
                           const sym::ZeroTestConfig& cfg = {});

}  // namespace pdham::noether
