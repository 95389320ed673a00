#include "pdham/reduce/reduce.hpp"

#include "pdham/ham/hamilton.hpp"

namespace pdham::reduce {

using noether::Status;
using noether::Verdict;
using sym::diff;
using sym::Expr;
using sysdef::Chart;

namespace {

std::size_t z(int k) { return static_cast<std::size_t>(k); }

std::map<std::string, Expr> composition(const BundleMap& p) {
    std::map<std::string, Expr> sub;
    for (int A = 0; A < p.target->m(); ++A) sub[p.target->fiber[z(A)]] = p.p[z(A)];
    return sub;
}

void check_target(const BundleMap& p, const sysdef::ChartPtr& c) { sysdef::require_same_chart(p.target, c, "map target"); }

Status combine(const std::vector<affcalc::Residual>& rs) {
    bool unknown = false;
    for (const auto& r : rs) {
        if (r.verdict.nonzero()) return Status::Falsified;
        if (!r.verdict.zero()) unknown = true;
    }
    return unknown ? Status::Unknown : Status::Verified;
}

}  // namespace

Form2 pullback_form2(const BundleMap& p, const Form2& wt) {
    check_target(p, wt.chart());
    const Chart& s = *p.source;
    const Chart& t = *p.target;
    const auto sub = composition(p);
    // dp[A][a] = ∂_a p^A, bp[A][i] = ∂_i p^A
    std::vector<std::vector<Expr>> dp(z(t.m())), bp(z(t.m()));
    for (int A = 0; A < t.m(); ++A) {
        for (int a = 0; a < s.m(); ++a) dp[z(A)].push_back(diff(p.p[z(A)], s.fiber[z(a)]));
        for (int i = 0; i < s.n(); ++i) bp[z(A)].push_back(diff(p.p[z(A)], s.base[z(i)]));
    }
    Form2 out(p.source);
    std::vector<Expr> v(z(s.m()));
    for (int i = 0; i < t.n(); ++i) {
        std::vector<std::vector<Expr>> w(z(s.m()), std::vector<Expr>(z(s.m())));
        for (int A = 0; A < t.m(); ++A)
            for (int B = A + 1; B < t.m(); ++B) {
                const Expr wab = wt.w(i, A, B);
                if (wab.is_zero()) continue;
                const Expr c = sym::substitute(wab, sub);
                for (int a = 0; a < s.m(); ++a) {
                    // ω̃_{AB} and ω̃_{BA} = -ω̃_{AB} both contribute
                    const Expr cross_a = dp[z(A)][z(a)] * bp[z(B)][z(i)] - dp[z(B)][z(a)] * bp[z(A)][z(i)];
                    if (!cross_a.is_zero()) v[z(a)] += 2 * c * cross_a;
                    for (int b = a + 1; b < s.m(); ++b) {
                        const Expr m = dp[z(A)][z(a)] * dp[z(B)][z(b)] - dp[z(B)][z(a)] * dp[z(A)][z(b)];
                        if (!m.is_zero()) w[z(a)][z(b)] += c * m;
                    }
                }
            }
        for (int a = 0; a < s.m(); ++a)
            for (int b = a + 1; b < s.m(); ++b) out.set_w(i, a, b, w[z(a)][z(b)]);
    }
    for (int A = 0; A < t.m(); ++A) {
        if (wt.v(A).is_zero()) continue;
        const Expr c = sym::substitute(wt.v(A), sub);
        for (int a = 0; a < s.m(); ++a) v[z(a)] += c * dp[z(A)][z(a)];
    }
    for (int a = 0; a < s.m(); ++a) out.set_v(a, v[z(a)]);
    return out;
}

Form0 pullback_form0(const BundleMap& p, const Form0& ft) {
    check_target(p, ft.chart);
    const auto sub = composition(p);
    Form0 out{p.source, {}};
    for (const auto& e : ft.f) out.f.push_back(sym::substitute(e, sub));
    return out;
}

Expr pullback_jet_expr(const BundleMap& p, const Expr& e) {
    const Chart& s = *p.source;
    const Chart& t = *p.target;
    auto sub = composition(p);
    for (int i = 0; i < t.n(); ++i)
        for (int A = 0; A < t.m(); ++A) {
            Expr d = diff(p.p[z(A)], s.base[z(i)]);
            for (int a = 0; a < s.m(); ++a) d += sysdef::jet(s, i, a) * diff(p.p[z(A)], s.fiber[z(a)]);
            sub[sysdef::jet_name(t.base[z(i)], t.fiber[z(A)])] = d;
        }
    return sym::substitute(e, sub);
}

Status ReductionReport::status() const {
    Status worst = Status::Verified;
    for (const Verdict* v : {&pullback, &vertical, &nondegenerate}) {
        if (v->status == Status::Falsified) return Status::Falsified;
        if (v->status == Status::Unknown) worst = Status::Unknown;
    }
    return worst;
}

ReductionReport verify_reduction(const Form2& w, const BundleMap& p, const Form2& wt, const sym::ZeroTestConfig& cfg) {
    sysdef::require_same_chart(p.source, w.chart(), "map source");
    check_target(p, wt.chart());
    const Chart& s = *p.source;
    const Chart& t = *p.target;
    ReductionReport r;

    const Form2 pb = pullback_form2(p, wt);
    auto add = [&](Verdict& v, std::string name, const Expr& e) {
        v.components.push_back({std::move(name), e, sym::is_zero(e, cfg)});
    };
    for (int i = 0; i < s.n(); ++i)
        for (int a = 0; a < s.m(); ++a)
            for (int b = a + 1; b < s.m(); ++b)
                add(r.pullback, "w[" + s.base[z(i)] + "; " + s.fiber[z(a)] + ", " + s.fiber[z(b)] + "]",
                    pb.w(i, a, b) - w.w(i, a, b));
    for (int a = 0; a < s.m(); ++a) add(r.pullback, "v[" + s.fiber[z(a)] + "]", pb.v(a) - w.v(a));
    r.pullback.status = combine(r.pullback.components);

    const auto ker = ham::kernel_full(w, nullptr, cfg);
    for (std::size_t k = 0; k < ker.basis.size(); ++k)
        for (int A = 0; A < t.m(); ++A) {
            Expr e;
            for (int a = 0; a < s.m(); ++a) e += ker.basis[k].y[z(a)] * diff(p.p[z(A)], s.fiber[z(a)]);
            add(r.vertical, "V" + std::to_string(k + 1) + "(" + t.fiber[z(A)] + ")", e);
        }
    r.vertical.status = combine(r.vertical.components);

    const auto kt = ham::kernel_vertical(wt, nullptr, cfg);
    r.nondegenerate.components.push_back(
        {"dim ker", Expr(static_cast<long>(kt.basis.size())),
         kt.basis.empty() ? sym::ZeroVerdict{sym::Decision::Zero, false} : sym::ZeroVerdict{sym::Decision::Nonzero, false}});
    r.nondegenerate.status = combine(r.nondegenerate.components);
    return r;
}

}  // namespace pdham::reduce
