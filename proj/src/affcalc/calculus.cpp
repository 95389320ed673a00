#include "pdham/affcalc/calculus.hpp"

#include "pdham/error.hpp"

namespace pdham::affcalc {

using sym::diff;
using sysdef::Chart;

namespace {

const std::string& base(const Chart& c, int i) { return c.base[static_cast<std::size_t>(i)]; }
const std::string& fiber(const Chart& c, int a) { return c.fiber[static_cast<std::size_t>(a)]; }
std::size_t z(int k) { return static_cast<std::size_t>(k); }

// Σ coeff·mono/(deg + shift) over the monomials of e in the fiber
// coordinates: the value of ∫₀¹ t^{shift-1} e(x, t y) dt.
Expr radial_integral(const Expr& e, const Chart& c, int shift) {
    if (e.is_zero()) return e;
    Expr out;
    for (const auto& [mono, coeff] : sym::poly_coefficients(e, c.fiber))
        out += coeff * sym::from_monomial(mono) / Expr(sym::total_degree(mono) + shift);
    return out;
}

}  // namespace

Form1 delta0(const Form0& f) {
    const Chart& c = *f.chart;
    Form1 t = Form1::zero(f.chart);
    for (int i = 0; i < c.n(); ++i) {
        for (int a = 0; a < c.m(); ++a) t.th[z(i)][z(a)] = diff(f.f[z(i)], fiber(c, a));
        t.h -= diff(f.f[z(i)], base(c, i));
    }
    return t;
}

Form2 delta1(const Form1& theta) {
    const Chart& c = *theta.chart;
    Form2 w(theta.chart);
    for (int i = 0; i < c.n(); ++i)
        for (int a = 0; a < c.m(); ++a)
            for (int b = a + 1; b < c.m(); ++b)
                w.set_w(i, a, b,
                        Expr::rational(1, 2) *
                            (diff(theta.th[z(i)][z(b)], fiber(c, a)) - diff(theta.th[z(i)][z(a)], fiber(c, b))));
    for (int a = 0; a < c.m(); ++a) {
        Expr v = diff(theta.h, fiber(c, a));
        for (int i = 0; i < c.n(); ++i) v += diff(theta.th[z(i)][z(a)], base(c, i));
        w.set_v(a, -v);
    }
    return w;
}

bool ClosednessReport::closed() const {
    for (const auto& r : residuals)
        if (!r.verdict.zero()) return false;
    return true;
}

bool ClosednessReport::undecided() const {
    for (const auto& r : residuals)
        if (r.verdict.decision == sym::Decision::Unknown) return true;
    return false;
}

ClosednessReport closedness_residuals(const Form2& w, const sym::ZeroTestConfig& cfg) {
    const Chart& c = *w.chart();
    ClosednessReport rep;
    for (int i = 0; i < c.n(); ++i)
        for (int a = 0; a < c.m(); ++a)
            for (int b = a + 1; b < c.m(); ++b)
                for (int d = b + 1; d < c.m(); ++d) {
                    const Expr r = Expr::rational(1, 3) * (diff(w.w(i, b, d), fiber(c, a)) +
                                                           diff(w.w(i, d, a), fiber(c, b)) +
                                                           diff(w.w(i, a, b), fiber(c, d)));
                    rep.residuals.push_back({"R1[" + base(c, i) + "; " + fiber(c, a) + ", " + fiber(c, b) + ", " +
                                                 fiber(c, d) + "]",
                                             r, sym::is_zero(r, cfg)});
                }
    for (int a = 0; a < c.m(); ++a)
        for (int b = a + 1; b < c.m(); ++b) {
            Expr r = Expr::rational(1, 2) * (diff(w.v(b), fiber(c, a)) - diff(w.v(a), fiber(c, b)));
            for (int i = 0; i < c.n(); ++i) r += diff(w.w(i, a, b), base(c, i));
            rep.residuals.push_back({"R2[" + fiber(c, a) + ", " + fiber(c, b) + "]", r, sym::is_zero(r, cfg)});
        }
    return rep;
}

Form1 insert_vertical(const VerticalField& y, const Form2& w) {
    sysdef::require_same_chart(y.chart, w.chart(), "insert_vertical");
    const Chart& c = *w.chart();
    Form1 t = Form1::zero(w.chart());
    for (int a = 0; a < c.m(); ++a) {
        const Expr& ya = y.y[z(a)];
        if (ya.is_zero()) continue;
        for (int i = 0; i < c.n(); ++i)
            for (int b = 0; b < c.m(); ++b) t.th[z(i)][z(b)] += 2 * w.w(i, a, b) * ya;
        t.h -= w.v(a) * ya;
    }
    return t;
}

std::vector<std::vector<std::vector<Expr>>> linear_part(const Form2& w) {
    const Chart& c = *w.chart();
    std::vector<std::vector<std::vector<Expr>>> out(
        z(c.n()), std::vector<std::vector<Expr>>(z(c.m()), std::vector<Expr>(z(c.m()))));
    for (int i = 0; i < c.n(); ++i)
        for (int a = 0; a < c.m(); ++a)
            for (int b = 0; b < c.m(); ++b) out[z(i)][z(a)][z(b)] = w.w(i, a, b);
    return out;
}

CoForm insert_connection(const Connection& nabla, const Form2& w) {
    sysdef::require_same_chart(nabla.chart, w.chart(), "insert_connection");
    const Chart& c = *w.chart();
    CoForm out{w.chart(), {}};
    for (int b = 0; b < c.m(); ++b) {
        Expr cb = w.v(b);
        for (int i = 0; i < c.n(); ++i)
            for (int a = 0; a < c.m(); ++a) {
                const Expr& na = nabla.c[z(i)][z(a)];
                if (!na.is_zero()) cb -= 2 * w.w(i, a, b) * na;
            }
        out.c.push_back(cb);
    }
    return out;
}

Expr insert_connection1(const Connection& nabla, const Form1& theta) {
    sysdef::require_same_chart(nabla.chart, theta.chart, "insert_connection");
    const Chart& c = *theta.chart;
    Expr out = -theta.h;
    for (int i = 0; i < c.n(); ++i)
        for (int a = 0; a < c.m(); ++a) out += theta.th[z(i)][z(a)] * nabla.c[z(i)][z(a)];
    return out;
}

Form0 lie_derivative_current(const VerticalField& y, const Form0& f) {
    sysdef::require_same_chart(y.chart, f.chart, "lie_derivative_current");
    const Chart& c = *f.chart;
    Form0 out = Form0::zero(f.chart);
    for (int i = 0; i < c.n(); ++i)
        for (int a = 0; a < c.m(); ++a)
            if (!y.y[z(a)].is_zero()) out.f[z(i)] += y.y[z(a)] * diff(f.f[z(i)], fiber(c, a));
    return out;
}

VerticalField field_bracket(const VerticalField& y1, const VerticalField& y2) {
    sysdef::require_same_chart(y1.chart, y2.chart, "field_bracket");
    const Chart& c = *y1.chart;
    VerticalField out = VerticalField::zero(y1.chart);
    for (int b = 0; b < c.m(); ++b)
        for (int a = 0; a < c.m(); ++a)
            out.y[z(b)] += y1.y[z(a)] * diff(y2.y[z(b)], fiber(c, a)) - y2.y[z(a)] * diff(y1.y[z(b)], fiber(c, a));
    return out;
}

Form1 potential(const Form2& w, const sym::ZeroTestConfig& cfg) {
    const ClosednessReport rep = closedness_residuals(w, cfg);
    for (const auto& r : rep.residuals) {
        if (r.verdict.decision == sym::Decision::Unknown) throw unknown_error("closedness undecided at " + r.name);
        if (!r.verdict.zero()) throw falsified_error("form is not closed: " + r.name + " = " + r.expr.str());
    }
    const Chart& c = *w.chart();
    Form1 t = Form1::zero(w.chart());
    for (int i = 0; i < c.n(); ++i)
        for (int a = 0; a < c.m(); ++a)
            for (int b = 0; b < c.m(); ++b) {
                const Expr wba = w.w(i, b, a);
                if (wba.is_zero()) continue;
                t.th[z(i)][z(a)] += 2 * radial_integral(wba, c, 2) * Expr::symbol(fiber(c, b));
            }
    for (int a = 0; a < c.m(); ++a) {
        Expr g = -w.v(a);
        for (int i = 0; i < c.n(); ++i) g -= diff(t.th[z(i)][z(a)], base(c, i));
        t.h += radial_integral(g, c, 1) * Expr::symbol(fiber(c, a));
    }
    return t;
}

}  // namespace pdham::affcalc
