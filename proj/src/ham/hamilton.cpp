#include "pdham/ham/hamilton.hpp"

#include "pdham/affcalc/calculus.hpp"
#include "pdham/error.hpp"

namespace pdham::ham {

using sym::diff;
using sysdef::Chart;
using sysdef::ChartPtr;

namespace {

std::size_t z(int k) { return static_cast<std::size_t>(k); }
const std::string& base(const Chart& c, int i) { return c.base[z(i)]; }
const std::string& fiber(const Chart& c, int a) { return c.fiber[z(a)]; }

}  // namespace

PDSystem hamilton_residuals(const Form2& w) {
    const Chart& c = *w.chart();
    PDSystem s;
    s.chart = w.chart();
    for (int b = 0; b < c.m(); ++b) {
        Expr r = -w.v(b);
        for (int i = 0; i < c.n(); ++i)
            for (int a = 0; a < c.m(); ++a) {
                const Expr wab = w.w(i, a, b);
                if (!wab.is_zero()) r += 2 * wab * sysdef::jet(c, i, a);
            }
        s.residuals.push_back(r);
        s.labels.push_back(fiber(c, b));
    }
    return s;
}

sym::Reducer make_reducer(const ConstraintSet* cs) {
    if (cs == nullptr || cs->eqs.empty()) return {};
    std::map<std::string, Expr> solved;
    std::vector<sym::Poly> divisors;
    for (const auto& phi : cs->eqs) {
        if (phi.is_zero()) continue;
        bool done = false;
        if (phi.is_polynomial()) {
            for (const auto& a : phi.num().atoms()) {
                if (a->kind != sym::AtomKind::Symbol || !cs->chart->is_coordinate(a->name)) continue;
                if (phi.num().degree_in(a) != 1) continue;
                const auto parts = phi.num().coefficients_in(a);
                const sym::Poly& lead = parts.at(1);
                if (!lead.is_constant()) continue;
                const sym::Poly rest = parts.count(0) != 0U ? parts.at(0) : sym::Poly();
                solved[a->name] = -Expr(rest, sym::Poly(sym::Rational(1))) / Expr(lead.constant_value());
                done = true;
                break;
            }
        }
        if (!done) divisors.push_back(phi.num());
    }
    return [solved, divisors](const Expr& e) {
        Expr out = solved.empty() ? e : sym::substitute(e, solved);
        if (divisors.empty() || out.is_zero()) return out;
        sym::Poly n = out.num();
        for (const auto& d : divisors) n = sym::reduce_by(n, d);
        return Expr(n, out.den());
    };
}

namespace {

// Rows (i, b), columns a: ω^i_{ab}.
sym::Matrix kernel_matrix(const Form2& w) {
    const Chart& c = *w.chart();
    sym::Matrix m;
    for (int i = 0; i < c.n(); ++i)
        for (int b = 0; b < c.m(); ++b) {
            std::vector<Expr> row;
            for (int a = 0; a < c.m(); ++a) row.push_back(w.w(i, a, b));
            m.push_back(row);
        }
    return m;
}

VerticalField field_from(const ChartPtr& chart, const std::vector<Expr>& comps) {
    VerticalField y;
    y.chart = chart;
    y.y = comps;
    return y;
}

}  // namespace

KernelResult kernel_vertical(const Form2& w, const ConstraintSet* c, const sym::ZeroTestConfig& cfg) {
    const sym::Matrix m = kernel_matrix(w);
    const sym::LinearSolution s = sym::solve_linear(m, std::vector<Expr>(m.size()), make_reducer(c), cfg);
    KernelResult k;
    k.rank = s.rank;
    k.pivots = s.pivots;
    k.certificate = s.certificate();
    for (const auto& v : s.nullspace) k.basis.push_back(field_from(w.chart(), v));
    return k;
}

FullKernel kernel_full(const Form2& w, const ConstraintSet* c, const sym::ZeroTestConfig& cfg) {
    FullKernel out;
    out.vertical = kernel_vertical(w, c, cfg);
    const Chart& ch = *w.chart();
    const auto red = make_reducer(c);
    std::vector<Expr> row;
    for (const auto& kv : out.vertical.basis) {
        Expr r;
        for (int a = 0; a < ch.m(); ++a) r += w.v(a) * kv.y[z(a)];
        row.push_back(red ? red(r) : r);
    }
    if (row.empty()) return out;
    const sym::LinearSolution s = sym::solve_linear({row}, {Expr()}, red, cfg);
    for (const auto& r : row)
        if (!sym::is_zero(r, cfg).zero()) out.strata.push_back(r);
    for (const auto& lam : s.nullspace) {
        std::vector<Expr> comps(z(ch.m()));
        for (std::size_t k = 0; k < lam.size(); ++k)
            for (int a = 0; a < ch.m(); ++a) comps[z(a)] += lam[k] * out.vertical.basis[k].y[z(a)];
        out.basis.push_back(field_from(w.chart(), comps));
    }
    return out;
}

HamiltonianReport is_hamiltonian(const Form2& w, const sym::ZeroTestConfig& cfg) {
    HamiltonianReport r;
    r.kernel = kernel_vertical(w, nullptr, cfg);
    r.kind = r.kernel.basis.empty() ? HamiltonianKind::Hamiltonian : HamiltonianKind::Degenerate;
    return r;
}

Expr normalize_condition(const Expr& e) {
    if (e.is_zero()) return e;
    if (e.is_constant()) return 1;
    sym::Poly n = e.num();
    if (n.leading_coefficient() < 0) n = -n;
    return {n, sym::Poly(sym::Rational(1))};
}

namespace {

struct ConnectionSystem {
    sym::Matrix a;
    std::vector<Expr> b;
};

// Unknown ∇^a_i sits in column i*m + a.
ConnectionSystem connection_system(const Form2& w) {
    const Chart& c = *w.chart();
    ConnectionSystem s;
    for (int b = 0; b < c.m(); ++b) {
        std::vector<Expr> row(z(c.n() * c.m()));
        for (int i = 0; i < c.n(); ++i)
            for (int a = 0; a < c.m(); ++a) row[z(i * c.m() + a)] = 2 * w.w(i, a, b);
        s.a.push_back(row);
        s.b.push_back(w.v(b));
    }
    return s;
}

ConnectionSolution solve_system(const Form2& w, const ConnectionSystem& sys, const sym::Reducer& red,
                                const sym::ZeroTestConfig& cfg) {
    const Chart& c = *w.chart();
    const sym::LinearSolution s = sym::solve_linear(sys.a, sys.b, red, cfg);
    ConnectionSolution out;
    out.solvable = s.consistent();
    out.homogeneous_dim = static_cast<int>(s.nullspace.size());
    out.certificate = s.certificate();
    for (const auto& e : s.conditions) out.conditions.push_back(normalize_condition(e));
    out.particular.chart = w.chart();
    out.particular.c.assign(z(c.n()), std::vector<Expr>(z(c.m())));
    for (int i = 0; i < c.n(); ++i)
        for (int a = 0; a < c.m(); ++a) out.particular.c[z(i)][z(a)] = s.particular[z(i * c.m() + a)];
    return out;
}

}  // namespace

ConnectionSolution solve_connection(const Form2& w, const ConstraintSet* c, const sym::ZeroTestConfig& cfg) {
    return solve_system(w, connection_system(w), make_reducer(c), cfg);
}

ConstraintSet constraint_step(const Form2& w, const ConstraintSet& cs, const sym::ZeroTestConfig& cfg) {
    const Chart& c = *w.chart();
    ConnectionSystem sys = connection_system(w);
    for (const auto& phi : cs.eqs) {
        for (int i = 0; i < c.n(); ++i) {
            std::vector<Expr> row(z(c.n() * c.m()));
            for (int a = 0; a < c.m(); ++a) row[z(i * c.m() + a)] = diff(phi, fiber(c, a));
            sys.a.push_back(row);
            sys.b.push_back(-diff(phi, base(c, i)));
        }
    }
    const sym::Reducer red = make_reducer(&cs);
    const ConnectionSolution sol = solve_system(w, sys, red, cfg);
    ConstraintSet next = cs;
    for (const auto& cond : sol.conditions) {
        const Expr r = red ? red(cond) : cond;
        if (sym::is_zero(r, cfg).zero()) continue;
        bool known = false;
        for (const auto& e : next.eqs) known = known || e == cond;
        if (!known) next.eqs.push_back(cond);
    }
    return next;
}

ConstraintRun constraint_algorithm(const Form2& w, int max_steps, const sym::ZeroTestConfig& cfg) {
    ConstraintRun run;
    ConstraintSet cur{w.chart(), {}};
    run.stages.push_back(cur);
    for (int step = 0; step < max_steps; ++step) {
        for (const auto& e : cur.eqs)
            if (e.is_constant()) {
                run.empty = true;
                run.terminated = true;
                return run;
            }
        ConstraintSet next = constraint_step(w, cur, cfg);
        if (next.eqs.size() == cur.eqs.size()) {
            run.terminated = true;
            return run;
        }
        run.stages.push_back(next);
        cur = next;
    }
    for (const auto& e : cur.eqs)
        if (e.is_constant()) {
            run.empty = true;
            run.terminated = true;
        }
    return run;
}

Expr lagrangian_of(const Form1& theta) {
    return affcalc::insert_connection1(sysdef::Connection::jets(theta.chart), theta);
}

PDSystem euler_lagrange(const Expr& L, const ChartPtr& chart) {
    const Chart& c = *chart;
    std::vector<std::string> jets;
    for (int i = 0; i < c.n(); ++i)
        for (int a = 0; a < c.m(); ++a) jets.push_back(sysdef::jet_name(base(c, i), fiber(c, a)));
    for (const auto& j : jets) {
        const Expr dj = diff(L, j);
        for (const auto& k : jets)
            if (!diff(dj, k).is_zero()) throw unsupported_error("Lagrangian is not affine in " + j);
    }
    PDSystem s;
    s.chart = chart;
    for (int b = 0; b < c.m(); ++b) {
        Expr r = diff(L, fiber(c, b));
        for (int i = 0; i < c.n(); ++i) {
            const Expr p = diff(L, sysdef::jet_name(base(c, i), fiber(c, b)));
            if (p.is_zero()) continue;
            r -= diff(p, base(c, i));
            for (int a = 0; a < c.m(); ++a) r -= sysdef::jet(c, i, a) * diff(p, fiber(c, a));
        }
        s.residuals.push_back(r);
        s.labels.push_back(fiber(c, b));
    }
    return s;
}

}  // namespace pdham::ham
