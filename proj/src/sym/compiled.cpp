#include "pdham/sym/compiled.hpp"

#include <cmath>
#include <stdexcept>

#include "pdham/error.hpp"

namespace pdham::sym {

namespace {

double ipow(double b, int e) {
    double r = 1.0;
    while (e > 0) {
        if ((e & 1) != 0) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

}  // namespace

CompiledExpr::CompiledExpr(const Expr& e, const std::vector<std::string>& vars) { top_ = compile_rat(e, vars); }

int CompiledExpr::compile_atom(const Atom& a, const std::vector<std::string>& vars) {
    for (const auto& [b, idx] : seen_)
        if (compare(a, b) == 0) return idx;
    Slot s{a->kind};
    switch (a->kind) {
        case AtomKind::Symbol:
            for (std::size_t k = 0; k < vars.size(); ++k)
                if (vars[k] == a->name) s.var = static_cast<int>(k);
            if (s.var < 0) throw input_error("unbound symbol " + a->name);
            break;
        case AtomKind::Function: throw input_error("unbound function " + a->str());
        case AtomKind::Root:
            s.rat = compile_rat(a->arg, vars);
            s.q = a->root_index;
            break;
        case AtomKind::Elementary:
            s.rat = compile_rat(a->arg, vars);
            s.fn = a->fn;
            break;
    }
    slots_.push_back(s);
    const int idx = static_cast<int>(slots_.size()) - 1;
    seen_.emplace_back(a, idx);
    return idx;
}

int CompiledExpr::compile_rat(const Expr& e, const std::vector<std::string>& vars) {
    Rat r;
    auto poly = [&](const Poly& p, std::vector<Term>& out) {
        for (const auto& [m, c] : p.terms()) {
            Term t{c.get_d(), {}};
            for (const auto& [a, k] : m) t.factors.emplace_back(compile_atom(a, vars), k);
            out.push_back(std::move(t));
        }
    };
    poly(e.num(), r.num);
    poly(e.den(), r.den);
    rats_.push_back(std::move(r));
    return static_cast<int>(rats_.size()) - 1;
}

double CompiledExpr::eval_rat(int r, const std::vector<double>& slots) const {
    auto poly = [&](const std::vector<Term>& ts) {
        double sum = 0.0;
        for (const auto& t : ts) {
            double v = t.c;
            for (const auto& [s, k] : t.factors) v *= ipow(slots[static_cast<std::size_t>(s)], k);
            sum += v;
        }
        return sum;
    };
    const Rat& q = rats_[static_cast<std::size_t>(r)];
    const double d = poly(q.den);
    if (d == 0.0) throw std::domain_error("division by zero");
    return poly(q.num) / d;
}

double CompiledExpr::operator()(const double* values) const {
    if (top_ < 0) return 0.0;
    // slots only depend on earlier slots, so one forward pass suffices
    std::vector<double> v(slots_.size());
    for (std::size_t k = 0; k < slots_.size(); ++k) {
        const Slot& s = slots_[k];
        switch (s.kind) {
            case AtomKind::Symbol: v[k] = values[s.var]; break;
            case AtomKind::Function: break;
            case AtomKind::Root: {
                const double b = eval_rat(s.rat, v);
                if (b < 0 && s.q % 2 == 0) throw std::domain_error("even root of negative value");
                v[k] = b < 0 ? -std::pow(-b, 1.0 / s.q) : std::pow(b, 1.0 / s.q);
                break;
            }
            case AtomKind::Elementary: {
                const double x = eval_rat(s.rat, v);
                switch (s.fn) {
                    case ElementaryFn::Exp: v[k] = std::exp(x); break;
                    case ElementaryFn::Ln:
                        if (x <= 0) throw std::domain_error("logarithm of non-positive value");
                        v[k] = std::log(x);
                        break;
                    case ElementaryFn::Sin: v[k] = std::sin(x); break;
                    case ElementaryFn::Cos: v[k] = std::cos(x); break;
                }
                break;
            }
        }
    }
    return eval_rat(top_, v);
}

}  // namespace pdham::sym
