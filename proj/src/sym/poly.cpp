#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "pdham/sym/expr.hpp"

namespace pdham::sym {

namespace {

// Orders embedded digit runs numerically so that u2 < u10.
int natural_compare(const std::string& a, const std::string& b) {
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
        const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
        if (da && db) {
            std::size_t i2 = i;
            std::size_t j2 = j;
            while (i2 < a.size() && std::isdigit(static_cast<unsigned char>(a[i2]))) ++i2;
            while (j2 < b.size() && std::isdigit(static_cast<unsigned char>(b[j2]))) ++j2;
            std::string na = a.substr(i, i2 - i);
            std::string nb = b.substr(j, j2 - j);
            na.erase(0, std::min(na.find_first_not_of('0'), na.size()));
            nb.erase(0, std::min(nb.find_first_not_of('0'), nb.size()));
            if (na.size() != nb.size()) return na.size() < nb.size() ? -1 : 1;
            if (int c = na.compare(nb); c != 0) return c < 0 ? -1 : 1;
            i = i2;
            j = j2;
            continue;
        }
        if (a[i] != b[j]) return a[i] < b[j] ? -1 : 1;
        ++i;
        ++j;
    }
    if (i < a.size()) return 1;
    if (j < b.size()) return -1;
    const int c = a.compare(b);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

}  // namespace

int compare(const Atom& a, const Atom& b) {
    if (a.get() == b.get()) return 0;
    if (a->kind != b->kind) return static_cast<int>(a->kind) < static_cast<int>(b->kind) ? -1 : 1;
    switch (a->kind) {
        case AtomKind::Symbol:
            return natural_compare(a->name, b->name);
        case AtomKind::Function: {
            if (int c = natural_compare(a->name, b->name); c != 0) return c;
            if (a->args != b->args) return a->args < b->args ? -1 : 1;
            int ta = 0;
            int tb = 0;
            for (int o : a->orders) ta += o;
            for (int o : b->orders) tb += o;
            if (ta != tb) return ta < tb ? -1 : 1;
            if (a->orders != b->orders) return a->orders > b->orders ? -1 : 1;
            return 0;
        }
        case AtomKind::Root:
            if (a->root_index != b->root_index) return a->root_index < b->root_index ? -1 : 1;
            return compare(a->arg, b->arg);
        case AtomKind::Elementary:
            if (a->fn != b->fn) return static_cast<int>(a->fn) < static_cast<int>(b->fn) ? -1 : 1;
            return compare(a->arg, b->arg);
    }
    return 0;
}

int total_degree(const Monomial& m) {
    int d = 0;
    for (const auto& [a, e] : m) d += e;
    return d;
}

int compare(const Monomial& a, const Monomial& b) {
    const int da = total_degree(a);
    const int db = total_degree(b);
    if (da != db) return da < db ? -1 : 1;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        const int c = compare(a[i].first, b[j].first);
        if (c == 0) {
            if (a[i].second != b[j].second) return a[i].second < b[j].second ? -1 : 1;
            ++i;
            ++j;
        } else {
            return c < 0 ? 1 : -1;
        }
    }
    if (i < a.size()) return 1;
    if (j < b.size()) return -1;
    return 0;
}

Monomial multiply(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size()) {
            out.push_back(a[i++]);
        } else if (i == a.size()) {
            out.push_back(b[j++]);
        } else {
            const int c = compare(a[i].first, b[j].first);
            if (c == 0) {
                out.emplace_back(a[i].first, a[i].second + b[j].second);
                ++i;
                ++j;
            } else if (c < 0) {
                out.push_back(a[i++]);
            } else {
                out.push_back(b[j++]);
            }
        }
    }
    return out;
}

std::optional<Monomial> divide(const Monomial& a, const Monomial& b) {
    Monomial out;
    std::size_t i = 0;
    for (const auto& [atom, e] : b) {
        while (i < a.size() && compare(a[i].first, atom) < 0) out.push_back(a[i++]);
        if (i == a.size() || compare(a[i].first, atom) != 0 || a[i].second < e) return std::nullopt;
        if (a[i].second > e) out.emplace_back(atom, a[i].second - e);
        ++i;
    }
    while (i < a.size()) out.push_back(a[i++]);
    return out;
}

namespace {

Monomial monomial_gcd(const Monomial& a, const Monomial& b) {
    Monomial out;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        const int c = compare(a[i].first, b[j].first);
        if (c == 0) {
            out.emplace_back(a[i].first, std::min(a[i].second, b[j].second));
            ++i;
            ++j;
        } else if (c < 0) {
            ++i;
        } else {
            ++j;
        }
    }
    return out;
}

}  // namespace

Poly::Poly(const Rational& c) {
    if (c != 0) terms_.emplace(Monomial{}, c);
}

Poly Poly::atom(const Atom& a, int exponent) {
    Poly p;
    if (exponent == 0) return Poly(Rational(1));
    p.terms_.emplace(Monomial{{a, exponent}}, Rational(1));
    return p;
}

Poly Poly::term(Monomial m, const Rational& c) {
    Poly p;
    if (c != 0) p.terms_.emplace(std::move(m), c);
    return p;
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }

Rational Poly::constant_value() const { return terms_.empty() ? Rational(0) : terms_.begin()->second; }

void Poly::add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Poly Poly::operator-() const {
    Poly p = *this;
    for (auto& [m, c] : p.terms_) c = -c;
    return p;
}

Poly operator+(const Poly& a, const Poly& b) {
    if (a.size() < b.size()) return b + a;
    Poly p = a;
    for (const auto& [m, c] : b.terms_) p.add_term(m, c);
    return p;
}

Poly operator-(const Poly& a, const Poly& b) {
    Poly p = a;
    for (const auto& [m, c] : b.terms_) p.add_term(m, -c);
    return p;
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly p;
    if (a.is_zero() || b.is_zero()) return p;
    if (a.is_constant()) return b.scaled(a.constant_value());
    if (b.is_constant()) return a.scaled(b.constant_value());
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) p.add_term(multiply(ma, mb), ca * cb);
    return p;
}

Poly Poly::scaled(const Rational& c) const {
    if (c == 0) return {};
    Poly p = *this;
    for (auto& [m, v] : p.terms_) v *= c;
    return p;
}

bool operator==(const Poly& a, const Poly& b) {
    if (a.size() != b.size()) return false;
    auto ia = a.terms_.begin();
    auto ib = b.terms_.begin();
    for (; ia != a.terms_.end(); ++ia, ++ib) {
        if (compare(ia->first, ib->first) != 0 || ia->second != ib->second) return false;
    }
    return true;
}

int compare(const Poly& a, const Poly& b) {
    auto ia = a.terms().begin();
    auto ib = b.terms().begin();
    for (; ia != a.terms().end() && ib != b.terms().end(); ++ia, ++ib) {
        if (int c = compare(ia->first, ib->first); c != 0) return c;
        if (ia->second != ib->second) return ia->second < ib->second ? -1 : 1;
    }
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

int Poly::degree_in(const Atom& x) const {
    int d = 0;
    for (const auto& [m, c] : terms_)
        for (const auto& [a, e] : m)
            if (compare(a, x) == 0) d = std::max(d, e);
    return d;
}

std::map<int, Poly> Poly::coefficients_in(const Atom& x) const {
    std::map<int, Poly> out;
    for (const auto& [m, c] : terms_) {
        int e = 0;
        Monomial rest;
        rest.reserve(m.size());
        for (const auto& pe : m) {
            if (compare(pe.first, x) == 0)
                e = pe.second;
            else
                rest.push_back(pe);
        }
        out[e].add_term(rest, c);
    }
    return out;
}

std::set<Atom, AtomLess> Poly::atoms() const {
    std::set<Atom, AtomLess> s;
    for (const auto& [m, c] : terms_)
        for (const auto& [a, e] : m) s.insert(a);
    return s;
}

Poly Poly::monic() const {
    if (is_zero()) return *this;
    return scaled(1 / leading_coefficient());
}

std::optional<Poly> divide_exact(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    if (b.is_constant()) return a.scaled(1 / b.constant_value());
    Poly q;
    Poly r = a;
    const Monomial& lb = b.leading_monomial();
    const Rational& cb = b.leading_coefficient();
    while (!r.is_zero()) {
        auto m = divide(r.leading_monomial(), lb);
        if (!m) return std::nullopt;
        const Rational c = r.leading_coefficient() / cb;
        q.add_term(*m, c);
        r = r - b * Poly::term(*m, c);
    }
    return q;
}

Poly reduce_by(const Poly& a, const Poly& g) {
    if (g.is_zero()) return a;
    if (g.is_constant()) return {};
    Poly rem;
    Poly p = a;
    const Monomial& lg = g.leading_monomial();
    const Rational& cg = g.leading_coefficient();
    while (!p.is_zero()) {
        const Monomial lm = p.leading_monomial();
        const Rational lc = p.leading_coefficient();
        if (auto m = divide(lm, lg)) {
            p = p - g * Poly::term(*m, lc / cg);
        } else {
            rem.add_term(lm, lc);
            p.add_term(lm, -lc);
        }
    }
    return rem;
}

namespace {

Poly pseudo_remainder(Poly a, const Poly& b, const Atom& x) {
    const int db = b.degree_in(x);
    const Poly lcb = b.coefficients_in(x).at(db);
    while (!a.is_zero()) {
        const int da = a.degree_in(x);
        if (da < db) break;
        const Poly lca = a.coefficients_in(x).at(da);
        a = lcb * a - lca * Poly::atom(x, da - db) * b;
    }
    return a;
}

Poly content_in(const Poly& p, const Atom& x) {
    Poly g;
    for (const auto& [e, c] : p.coefficients_in(x)) {
        g = gcd(g, c);
        if (g.is_constant() && !g.is_zero()) break;
    }
    return g;
}

Poly primitive_part(const Poly& p, const Atom& x) {
    const Poly c = content_in(p, x);
    if (c.is_zero()) return p;
    return *divide_exact(p, c);
}

}  // namespace

Poly gcd(const Poly& a, const Poly& b) {
    if (a.is_zero()) return b.monic();
    if (b.is_zero()) return a.monic();
    if (a.is_constant() || b.is_constant()) return Poly(Rational(1));
    if (a.size() == 1 || b.size() == 1) {
        const Poly& single = a.size() == 1 ? a : b;
        const Poly& other = a.size() == 1 ? b : a;
        Monomial g = single.leading_monomial();
        for (const auto& [m, c] : other.terms()) {
            g = monomial_gcd(g, m);
            if (g.empty()) break;
        }
        return Poly::term(g, 1);
    }
    const auto atoms_a = a.atoms();
    const auto atoms_b = b.atoms();
    std::optional<Atom> x;
    for (const auto& at : atoms_a) {
        if (atoms_b.count(at) != 0U) {
            x = at;
            break;
        }
    }
    if (!x) return Poly(Rational(1));

    const Poly ca = content_in(a, *x);
    const Poly cb = content_in(b, *x);
    const Poly c = gcd(ca, cb);
    Poly pa = *divide_exact(a, ca);
    Poly pb = *divide_exact(b, cb);
    if (pa.degree_in(*x) < pb.degree_in(*x)) std::swap(pa, pb);
    while (true) {
        if (pb.degree_in(*x) == 0) {
            pb = Poly(Rational(1));
            break;
        }
        Poly r = pseudo_remainder(pa, pb, *x);
        if (r.is_zero()) break;
        if (r.degree_in(*x) == 0) {
            pb = Poly(Rational(1));
            break;
        }
        pa = pb;
        pb = primitive_part(r, *x);
    }
    Poly g = pb.is_constant() ? Poly(Rational(1)) : primitive_part(pb, *x);
    return (c * g).monic();
}

}  // namespace pdham::sym
