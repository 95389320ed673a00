#pragma once

// Gauge reduction by verification: pull a candidate reduced system back
// along a projection and check the identities that characterize it.

#include "pdham/noether/noether.hpp"
#include "pdham/sysdef/model.hpp"

namespace pdham::reduce {

using sysdef::BundleMap;
using sysdef::Form0;
using sysdef::Form2;

/// (p*ω̃)^i_{ab} = ω̃^i_{AB}∂_a p^A ∂_b p^B,
/// (p*ω̃)_a = ω̃_A ∂_a p^A + 2ω̃^i_{AB}∂_a p^A ∂_i p^B, components composed with p.
Form2 pullback_form2(const BundleMap& p, const Form2& wt);
Form0 pullback_form0(const BundleMap& p, const Form0& ft);

/// D[i][A] ↦ ∂_i p^A + D[i][a]∂_a p^A on top of composition with p.
sym::Expr pullback_jet_expr(const BundleMap& p, const sym::Expr& e);

struct ReductionReport {
    noether::Verdict pullback;       // p*ω̃ = ω
    noether::Verdict vertical;       // V^a ∂_a p^A = 0 for V in ker ω
    noether::Verdict nondegenerate;  // ker of the linear part of ω̃ is trivial
    noether::Status status() const;
};

ReductionReport verify_reduction(const Form2& w, const BundleMap& p, const Form2& wt,
                                 const sym::ZeroTestConfig& cfg = {});

}  // namespace pdham::reduce
