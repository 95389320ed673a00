#include "pdham/noether/noether.hpp"

#include <stdexcept>

#include "pdham/error.hpp"

namespace pdham::noether {

using sym::diff;
using sysdef::Chart;

namespace {

std::size_t z(int k) { return static_cast<std::size_t>(k); }

std::string a_name(const Chart& c, int i, int b) { return "A[" + c.base[z(i)] + "; " + c.fiber[z(b)] + "]"; }

Status combine(const std::vector<Residual>& rs) {
    bool unknown = false;
    for (const auto& r : rs) {
        if (r.verdict.nonzero()) return Status::Falsified;
        if (!r.verdict.zero()) unknown = true;
    }
    return unknown ? Status::Unknown : Status::Verified;
}

Residual judge(std::string name, const Expr& e, const std::vector<sym::Rule>& rel, const sym::ZeroTestConfig& cfg) {
    const Expr r = sym::apply_rules(e, rel);
    return {std::move(name), r, sym::is_zero(r, cfg)};
}

bool depends_on_fiber(const Expr& e, const Chart& c) {
    for (const auto& y : c.fiber)
        if (e.depends_on(y)) return true;
    return false;
}

std::string monomial_label(const sym::Monomial& m) {
    if (m.empty()) return "1";
    std::string s;
    for (const auto& [atom, k] : m) {
        if (!s.empty()) s += "*";
        s += atom->str();
        if (k != 1) s += "^" + std::to_string(k);
    }
    return s;
}

}  // namespace

const char* status_name(Status s) {
    switch (s) {
        case Status::Verified: return "verified";
        case Status::Falsified: return "falsified";
        case Status::Unknown: return "unknown";
    }
    return "unknown";
}

NoetherResidual noether_residual(const Form2& w, const VerticalField& y, const Form0& f) {
    sysdef::require_same_chart(w.chart(), y.chart, "field");
    sysdef::require_same_chart(w.chart(), f.chart, "current");
    const Chart& c = *w.chart();
    const sysdef::Form1 iy = affcalc::insert_vertical(y, w);
    const sysdef::Form1 df = affcalc::delta0(f);
    NoetherResidual r;
    r.a.assign(z(c.n()), std::vector<Expr>(z(c.m())));
    for (int i = 0; i < c.n(); ++i)
        for (int b = 0; b < c.m(); ++b) r.a[z(i)][z(b)] = iy.th[z(i)][z(b)] - df.th[z(i)][z(b)];
    // H-slots enter with a minus sign: B = -(H_iy - H_df)
    r.b = df.h - iy.h;
    return r;
}

Verdict is_noether_pair(const Form2& w, const VerticalField& y, const Form0& f, const std::vector<sym::Rule>& relations,
                        const sym::ZeroTestConfig& cfg) {
    const Chart& c = *w.chart();
    const NoetherResidual r = noether_residual(w, y, f);
    Verdict v;
    for (int i = 0; i < c.n(); ++i)
        for (int b = 0; b < c.m(); ++b) v.components.push_back(judge(a_name(c, i, b), r.a[z(i)][z(b)], relations, cfg));
    v.components.push_back(judge("B", r.b, relations, cfg));
    v.status = combine(v.components);
    return v;
}

std::vector<Equation> determining_system(const Form2& w, const VerticalField& y, const Form0& f,
                                         const DeterminingOptions& opt) {
    const Chart& c = *w.chart();
    const NoetherResidual r = noether_residual(w, y, f);
    std::vector<Equation> raw;
    for (int i = 0; i < c.n(); ++i)
        for (int b = 0; b < c.m(); ++b) raw.push_back({a_name(c, i, b), r.a[z(i)][z(b)]});
    raw.push_back({"B", r.b});
    std::vector<Equation> out;
    for (auto& [name, e0] : raw) {
        Expr e = sym::apply_rules(e0, opt.relations);
        if (e.is_zero()) continue;
        if (opt.square) e = sym::rationalize_square_root(e);
        if (opt.split.empty()) {
            out.push_back({name, e});
            continue;
        }
        // a common denominator does not affect which coefficients vanish
        const Expr numer(e.num(), sym::Poly(sym::Rational(1)));
        for (const auto& [mono, coeff] : sym::poly_coefficients(numer, opt.split))
            out.push_back({name + "[" + monomial_label(mono) + "]", coeff});
    }
    return out;
}

Form0 contraction(const Form2& w, const VerticalField& y1, const VerticalField& y2) {
    const Chart& c = *w.chart();
    Form0 out = Form0::zero(w.chart());
    for (int i = 0; i < c.n(); ++i)
        for (int a = 0; a < c.m(); ++a)
            for (int b = 0; b < c.m(); ++b) {
                const Expr wab = w.w(i, a, b);
                if (!wab.is_zero()) out.f[z(i)] += 2 * wab * y2.y[z(a)] * y1.y[z(b)];
            }
    return out;
}

Form0 poisson_bracket(const Form2& w, const Pair& p1, const Pair& p2, const std::vector<sym::Rule>& relations,
                      const sym::ZeroTestConfig& cfg) {
    for (const Pair* p : {&p1, &p2}) {
        const Verdict v = is_noether_pair(w, p->y, p->f, relations, cfg);
        if (v.status == Status::Falsified) throw falsified_error("bracket of a pair that is not a Noether pair");
        if (v.status == Status::Unknown) throw unknown_error("cannot verify a Noether pair of the bracket");
    }
    Form0 lie = affcalc::lie_derivative_current(p1.y, p2.f);
    const Form0 ctr = contraction(w, p1.y, p2.y);
    for (std::size_t i = 0; i < lie.f.size(); ++i) {
        lie.f[i] = sym::apply_rules(lie.f[i], relations);
        const auto d = sym::is_zero(sym::apply_rules(lie.f[i] - ctr.f[i], relations), cfg);
        if (d.nonzero()) throw std::logic_error("bracket representations disagree");
    }
    return lie;
}

Verdict is_trivial_current(const Form0& f, const std::vector<sym::Rule>& relations, const sym::ZeroTestConfig& cfg) {
    const Chart& c = *f.chart;
    Verdict v;
    Expr div;
    for (int i = 0; i < c.n(); ++i) {
        const Expr fi = sym::apply_rules(f.f[z(i)], relations);
        const bool fiber = depends_on_fiber(fi, c);
        v.components.push_back({"fiber dependence of f[" + c.base[z(i)] + "]", fiber ? Expr(1) : Expr(0),
                                fiber ? sym::ZeroVerdict{sym::Decision::Nonzero, false}
                                      : sym::ZeroVerdict{sym::Decision::Zero, false}});
        div += diff(fi, c.base[z(i)]);
    }
    v.components.push_back(judge("divergence", div, relations, cfg));
    v.status = combine(v.components);
    return v;
}

}  // namespace pdham::noether
