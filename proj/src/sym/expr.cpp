#include "pdham/sym/expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pdham/error.hpp"

namespace pdham::sym {

namespace detail {
struct ExprData {
    Poly num;
    Poly den;
};
}  // namespace detail

namespace {

const std::shared_ptr<const detail::ExprData>& zero_data() {
    static const auto z = std::make_shared<const detail::ExprData>(detail::ExprData{Poly(), Poly(Rational(1))});
    return z;
}

// Largest k with r^k dividing every term of p (root atoms in denominators).
std::optional<std::pair<Atom, int>> common_root_factor(const Poly& p) {
    if (p.is_zero()) return std::nullopt;
    for (const auto& [a, e] : p.terms().begin()->first) {
        if (a->kind != AtomKind::Root) continue;
        int k = e;
        for (const auto& [m, c] : p.terms()) {
            int found = 0;
            for (const auto& [b, f] : m)
                if (compare(a, b) == 0) found = f;
            k = std::min(k, found);
        }
        if (k > 0) return std::make_pair(a, k);
    }
    return std::nullopt;
}

bool has_root_overflow(const Poly& p) {
    for (const auto& [m, c] : p.terms())
        for (const auto& [a, e] : m)
            if (a->kind == AtomKind::Root && e >= a->root_index) return true;
    return false;
}

// Rewrites r^e with e >= q as B^(e div q) r^(e mod q).
Expr reduce_root_powers(const Poly& p) {
    Expr out;
    for (const auto& [m, c] : p.terms()) {
        Monomial kept;
        Expr factor(c);
        for (const auto& [a, e] : m) {
            if (a->kind == AtomKind::Root && e >= a->root_index) {
                factor = factor * a->arg.pow(e / a->root_index);
                if (e % a->root_index != 0) kept.emplace_back(a, e % a->root_index);
            } else {
                kept.emplace_back(a, e);
            }
        }
        out = out + factor * Expr(Poly::term(kept, 1), Poly(Rational(1)));
    }
    return out;
}

}  // namespace

Expr::Expr() : d_(zero_data()) {}

Expr::Expr(long v) : Expr(Rational(v)) {}

Expr::Expr(const Rational& value) {
    Rational v = value;
    v.canonicalize();
    if (v == 0) {
        d_ = zero_data();
    } else {
        d_ = std::make_shared<const detail::ExprData>(detail::ExprData{Poly(v), Poly(Rational(1))});
    }
}

Expr::Expr(Poly num, Poly den) {
    if (den.is_zero()) throw std::domain_error("division by zero");
    if (num.is_zero()) {
        d_ = zero_data();
        return;
    }
    if (has_root_overflow(num) || has_root_overflow(den)) {
        const Expr n = reduce_root_powers(num);
        const Expr d = reduce_root_powers(den);
        *this = n / d;
        return;
    }
    if (auto rf = common_root_factor(den)) {
        const auto& [r, k] = *rf;
        const Poly lift = Poly::atom(r, r->root_index - k);
        *this = Expr(num * lift, Poly(Rational(1))) / Expr(den * lift, Poly(Rational(1)));
        return;
    }
    if (den.is_constant()) {
        num = num.scaled(1 / den.constant_value());
        den = Poly(Rational(1));
    } else {
        const Poly g = gcd(num, den);
        if (!g.is_constant()) {
            num = *divide_exact(num, g);
            den = *divide_exact(den, g);
        }
        const Rational lc = den.leading_coefficient();
        if (lc != 1) {
            num = num.scaled(1 / lc);
            den = den.scaled(1 / lc);
        }
    }
    d_ = std::make_shared<const detail::ExprData>(detail::ExprData{std::move(num), std::move(den)});
}

const Poly& Expr::num() const { return d_->num; }
const Poly& Expr::den() const { return d_->den; }

Atom make_symbol(const std::string& name) {
    auto a = std::make_shared<AtomNode>();
    a->kind = AtomKind::Symbol;
    a->name = name;
    return a;
}

Atom make_function(const std::string& name, const std::vector<std::string>& args, std::vector<int> orders) {
    auto a = std::make_shared<AtomNode>();
    a->kind = AtomKind::Function;
    a->name = name;
    a->args = args;
    if (orders.empty()) orders.assign(args.size(), 0);
    if (orders.size() != args.size()) throw std::invalid_argument("derivative orders do not match arguments");
    a->orders = std::move(orders);
    return a;
}

Expr Expr::symbol(const std::string& name) { return from_atom(make_symbol(name)); }

Expr Expr::function(const std::string& name, const std::vector<std::string>& args, std::vector<int> orders) {
    return from_atom(make_function(name, args, std::move(orders)));
}

Expr Expr::from_atom(const Atom& a) { return {Poly::atom(a), Poly(Rational(1))}; }

Expr Expr::elementary(ElementaryFn fn, const Expr& arg) {
    if (fn == ElementaryFn::Exp && arg.is_zero()) return 1;
    if (fn == ElementaryFn::Ln && arg == Expr(1)) return 0;
    if (fn == ElementaryFn::Sin && arg.is_zero()) return 0;
    if (fn == ElementaryFn::Cos && arg.is_zero()) return 1;
    auto a = std::make_shared<AtomNode>();
    a->kind = AtomKind::Elementary;
    a->fn = fn;
    a->arg = arg;
    switch (fn) {
        case ElementaryFn::Exp: a->name = "exp"; break;
        case ElementaryFn::Ln: a->name = "ln"; break;
        case ElementaryFn::Sin: a->name = "sin"; break;
        case ElementaryFn::Cos: a->name = "cos"; break;
    }
    return from_atom(a);
}

std::optional<Rational> Expr::constant_value() const {
    if (!is_constant()) return std::nullopt;
    return num().constant_value() / den().constant_value();
}

Expr Expr::operator-() const { return {-num(), den()}; }

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den() == b.den()) return {a.num() + b.num(), a.den()};
    return {a.num() * b.den() + b.num() * a.den(), a.den() * b.den()};
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_zero() || b.is_zero()) return {};
    if (a.den().is_constant() && b.den().is_constant()) return {a.num() * b.num(), Poly(Rational(1))};
    // Cross-cancel before multiplying to keep sizes down.
    Poly an = a.num();
    Poly ad = a.den();
    Poly bn = b.num();
    Poly bd = b.den();
    const Poly g1 = gcd(an, bd);
    if (!g1.is_constant()) {
        an = *divide_exact(an, g1);
        bd = *divide_exact(bd, g1);
    }
    const Poly g2 = gcd(bn, ad);
    if (!g2.is_constant()) {
        bn = *divide_exact(bn, g2);
        ad = *divide_exact(ad, g2);
    }
    return {an * bn, ad * bd};
}

Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_zero()) throw std::domain_error("division by zero");
    return a * Expr(b.den(), b.num());
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.d_ == b.d_) return true;
    return a.num() == b.num() && a.den() == b.den();
}

int compare(const Expr& a, const Expr& b) {
    if (int c = compare(a.num(), b.num()); c != 0) return c;
    return compare(a.den(), b.den());
}

namespace {

std::optional<mpz_class> exact_root(const mpz_class& v, unsigned long q) {
    if (v < 0) return std::nullopt;
    mpz_class r;
    if (mpz_root(r.get_mpz_t(), v.get_mpz_t(), q) == 0) return std::nullopt;
    return r;
}

Expr make_root(const Expr& base, int q) {
    auto a = std::make_shared<AtomNode>();
    a->kind = AtomKind::Root;
    a->arg = base;
    a->root_index = q;
    return Expr::from_atom(a);
}

Expr integer_power(const Expr& b, long k) {
    if (k < 0) {
        if (b.is_zero()) throw std::domain_error("division by zero");
        return integer_power(Expr(b.den(), b.num()), -k);
    }
    Expr result(1);
    Expr base = b;
    while (k > 0) {
        if ((k & 1) != 0) result = result * base;
        k >>= 1;
        if (k > 0) base = base * base;
    }
    return result;
}

}  // namespace

Expr Expr::pow(const Rational& exponent) const {
    Rational e = exponent;
    e.canonicalize();
    const long p = e.get_num().get_si();
    const long q = e.get_den().get_si();
    if (q == 1) return integer_power(*this, p);
    if (is_zero()) {
        if (p > 0) return {};
        throw std::domain_error("zero to a negative power");
    }
    if (auto c = constant_value()) {
        auto rn = exact_root(c->get_num(), static_cast<unsigned long>(q));
        auto rd = exact_root(c->get_den(), static_cast<unsigned long>(q));
        if (rn && rd) return integer_power(Expr(Rational(*rn, *rd)), p);
    }
    // A monomial with unit coefficient distributes the power over its atoms.
    if (num().size() == 1 && den().size() == 1 && num().leading_coefficient() == 1 &&
        den().leading_coefficient() == 1) {
        Expr out(1);
        auto apply = [&](const Monomial& m, int sgn) {
            for (const auto& [a, k] : m) {
                Rational r = Rational(k * sgn) * e;
                r.canonicalize();
                if (a->kind == AtomKind::Root) {
                    out = out * a->arg.pow(r / a->root_index);
                } else if (r.get_den() == 1) {
                    out = out * integer_power(from_atom(a), r.get_num().get_si());
                } else {
                    out = out * from_atom(a).pow(r);
                }
            }
        };
        const bool single_atom = num().leading_monomial().size() + den().leading_monomial().size() == 1 &&
                                 total_degree(num().leading_monomial()) + total_degree(den().leading_monomial()) == 1;
        if (!single_atom) {
            apply(num().leading_monomial(), 1);
            apply(den().leading_monomial(), -1);
            return out;
        }
        if (num().leading_monomial().empty()) return Expr(1) / Expr(den(), Poly(Rational(1))).pow(e);
        if (num().leading_monomial()[0].first->kind == AtomKind::Root) {
            const Atom& r = num().leading_monomial()[0].first;
            return r->arg.pow(e / r->root_index);
        }
    }
    long k = p / q;
    long rem = p % q;
    if (rem < 0) {
        rem += q;
        k -= 1;
    }
    return integer_power(*this, k) * integer_power(make_root(*this, static_cast<int>(q)), rem);
}

std::set<Atom, AtomLess> Expr::atoms() const {
    auto s = num().atoms();
    auto d = den().atoms();
    s.insert(d.begin(), d.end());
    return s;
}

bool Expr::has_transcendental() const {
    for (const auto& a : atoms())
        if (a->kind == AtomKind::Root || a->kind == AtomKind::Elementary) return true;
    return false;
}

namespace {

bool atom_depends_on(const Atom& a, const std::string& v) {
    switch (a->kind) {
        case AtomKind::Symbol: return a->name == v;
        case AtomKind::Function: return std::find(a->args.begin(), a->args.end(), v) != a->args.end();
        case AtomKind::Root:
        case AtomKind::Elementary: return a->arg.depends_on(v);
    }
    return false;
}

}  // namespace

bool Expr::depends_on(const std::string& symbol) const {
    for (const auto& a : atoms())
        if (atom_depends_on(a, symbol)) return true;
    return false;
}

// ---------------------------------------------------------------- printing

namespace {

std::string rational_str(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string atom_power_str(const Atom& a, int e) {
    if (a->kind == AtomKind::Root) {
        std::string s = "(" + a->arg.str() + ")^(" + std::to_string(e) + "/" + std::to_string(a->root_index) + ")";
        return s;
    }
    std::string s = a->str();
    if (e != 1) s += "^" + std::to_string(e);
    return s;
}

std::string monomial_str(const Monomial& m) {
    std::string s;
    for (const auto& [a, e] : m) {
        if (!s.empty()) s += "*";
        s += atom_power_str(a, e);
    }
    return s;
}

std::string poly_str(const Poly& p) {
    if (p.is_zero()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [m, c] : p.terms()) {
        Rational mag = abs(c);
        const bool neg = c < 0;
        if (first) {
            if (neg) s += "-";
        } else {
            s += neg ? " - " : " + ";
        }
        first = false;
        if (m.empty()) {
            s += rational_str(mag);
        } else if (mag == 1) {
            s += monomial_str(m);
        } else {
            s += rational_str(mag) + "*" + monomial_str(m);
        }
    }
    return s;
}

// Splits a trailing digit run into a subscript: u12 -> u_{12}.
std::string latex_name(const std::string& name) {
    std::size_t k = name.size();
    while (k > 0 && std::isdigit(static_cast<unsigned char>(name[k - 1]))) --k;
    std::string head = name.substr(0, k);
    std::string tail = name.substr(k);
    std::string out;
    for (char ch : head) {
        if (ch == '_') {
            out += "\\_";
        } else {
            out += ch;
        }
    }
    if (!tail.empty() && k > 0) out += "_{" + tail + "}";
    if (k == 0) out = name;
    return out;
}

std::string latex_rational(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return "\\tfrac{" + r.get_num().get_str() + "}{" + r.get_den().get_str() + "}";
}

std::string latex_atom_power(const Atom& a, int e) {
    if (a->kind == AtomKind::Root) {
        if (a->root_index == 2 && e == 1) return "\\sqrt{" + a->arg.latex() + "}";
        return "\\left(" + a->arg.latex() + "\\right)^{" + std::to_string(e) + "/" + std::to_string(a->root_index) +
               "}";
    }
    std::string s = a->latex();
    if (e != 1) {
        if (a->kind == AtomKind::Function && s.find("\\partial") != std::string::npos) s = "\\left(" + s + "\\right)";
        s += "^{" + std::to_string(e) + "}";
    }
    return s;
}

std::string latex_poly(const Poly& p) {
    if (p.is_zero()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [m, c] : p.terms()) {
        Rational mag = abs(c);
        const bool neg = c < 0;
        if (first) {
            if (neg) s += "-";
        } else {
            s += neg ? " - " : " + ";
        }
        first = false;
        std::string mono;
        for (const auto& [a, e] : m) {
            if (!mono.empty()) mono += " ";
            mono += latex_atom_power(a, e);
        }
        if (m.empty()) {
            s += latex_rational(mag);
        } else if (mag == 1) {
            s += mono;
        } else {
            s += latex_rational(mag) + " " + mono;
        }
    }
    return s;
}

}  // namespace

std::string AtomNode::str() const {
    switch (kind) {
        case AtomKind::Symbol: return name;
        case AtomKind::Function: {
            bool any = false;
            std::string s = "diff(" + name;
            for (std::size_t k = 0; k < args.size(); ++k) {
                for (int i = 0; i < orders[k]; ++i) {
                    s += "," + args[k];
                    any = true;
                }
            }
            return any ? s + ")" : name;
        }
        case AtomKind::Root:
            return "(" + arg.str() + ")^(1/" + std::to_string(root_index) + ")";
        case AtomKind::Elementary:
            return name + "(" + arg.str() + ")";
    }
    return name;
}

std::string AtomNode::latex() const {
    switch (kind) {
        case AtomKind::Symbol: {
            // Jet placeholder D[i][a] -> \partial_{i} a
            if (name.rfind("D[", 0) == 0) {
                const auto close = name.find(']');
                const std::string i = name.substr(2, close - 2);
                const std::string a = name.substr(close + 2, name.size() - close - 3);
                return "\\partial_{" + latex_name(i) + "} " + latex_name(a);
            }
            const auto br = name.find('[');
            if (br != std::string::npos) {
                std::string idx = name.substr(br + 1, name.size() - br - 2);
                std::replace(idx.begin(), idx.end(), ',', ' ');
                return latex_name(name.substr(0, br)) + "^{" + idx + "}";
            }
            return latex_name(name);
        }
        case AtomKind::Function: {
            std::string d;
            for (std::size_t k = 0; k < args.size(); ++k)
                for (int i = 0; i < orders[k]; ++i) d += (d.empty() ? "" : " ") + latex_name(args[k]);
            if (d.empty()) return latex_name(name);
            return "\\partial_{" + d + "} " + latex_name(name);
        }
        case AtomKind::Root:
            if (root_index == 2) return "\\sqrt{" + arg.latex() + "}";
            return "\\left(" + arg.latex() + "\\right)^{1/" + std::to_string(root_index) + "}";
        case AtomKind::Elementary: {
            const std::string fn = name == "ln" ? "\\ln" : "\\" + name;
            return fn + "\\left(" + arg.latex() + "\\right)";
        }
    }
    return name;
}

std::string Expr::str() const {
    if (den().is_constant()) return poly_str(num());
    return "(" + poly_str(num()) + ")/(" + poly_str(den()) + ")";
}

std::string Expr::latex() const {
    if (den().is_constant()) return latex_poly(num());
    return "\\frac{" + latex_poly(num()) + "}{" + latex_poly(den()) + "}";
}

// ---------------------------------------------------------- differentiation

namespace {

Expr diff_atom(const Atom& a, const std::string& v) {
    switch (a->kind) {
        case AtomKind::Symbol:
            return a->name == v ? Expr(1) : Expr(0);
        case AtomKind::Function: {
            auto it = std::find(a->args.begin(), a->args.end(), v);
            if (it == a->args.end()) return 0;
            std::vector<int> orders = a->orders;
            orders[static_cast<std::size_t>(it - a->args.begin())] += 1;
            return Expr::function(a->name, a->args, orders);
        }
        case AtomKind::Root: {
            const Expr db = diff(a->arg, v);
            if (db.is_zero()) return 0;
            return Expr::from_atom(a) * db / (Expr(a->root_index) * a->arg);
        }
        case AtomKind::Elementary: {
            const Expr da = diff(a->arg, v);
            if (da.is_zero()) return 0;
            switch (a->fn) {
                case ElementaryFn::Exp: return Expr::from_atom(a) * da;
                case ElementaryFn::Ln: return da / a->arg;
                case ElementaryFn::Sin: return Expr::elementary(ElementaryFn::Cos, a->arg) * da;
                case ElementaryFn::Cos: return -Expr::elementary(ElementaryFn::Sin, a->arg) * da;
            }
        }
    }
    return 0;
}

Expr diff_poly(const Poly& p, const std::string& v) {
    std::map<Atom, Expr, AtomLess> cache;
    Expr out;
    Poly plain;  // accumulate derivative terms whose atom derivative is 1
    for (const auto& [m, c] : p.terms()) {
        for (std::size_t k = 0; k < m.size(); ++k) {
            const Atom& a = m[k].first;
            auto it = cache.find(a);
            if (it == cache.end()) it = cache.emplace(a, atom_depends_on(a, v) ? diff_atom(a, v) : Expr(0)).first;
            const Expr& da = it->second;
            if (da.is_zero()) continue;
            Monomial rest = m;
            const int e = rest[k].second;
            if (e == 1) {
                rest.erase(rest.begin() + static_cast<long>(k));
            } else {
                rest[k].second -= 1;
            }
            const Rational coef = c * e;
            if (da == Expr(1)) {
                plain.add_term(rest, coef);
            } else {
                out = out + Expr(Poly::term(rest, coef), Poly(Rational(1))) * da;
            }
        }
    }
    return out + Expr(plain, Poly(Rational(1)));
}

}  // namespace

Expr diff(const Expr& e, const std::string& var) {
    if (!e.depends_on(var)) return 0;
    const Expr dn = diff_poly(e.num(), var);
    if (e.den().is_constant()) return dn;
    const Expr dd = diff_poly(e.den(), var);
    const Expr n(e.num(), Poly(Rational(1)));
    const Expr d(e.den(), Poly(Rational(1)));
    return (dn * d - n * dd) / (d * d);
}

Expr diff(const Expr& e, const std::vector<std::string>& vars) {
    Expr out = e;
    for (const auto& v : vars) out = diff(out, v);
    return out;
}

// ------------------------------------------------------------ substitution

namespace {

Expr eval_poly(const Poly& p, std::map<Atom, std::optional<Expr>, AtomLess>& values) {
    Expr out;
    Poly untouched;
    for (const auto& [m, c] : p.terms()) {
        Monomial kept;
        Expr factor(1);
        bool replaced = false;
        for (const auto& [a, e] : m) {
            const auto& v = values.at(a);
            if (v) {
                factor = factor * v->pow(e);
                replaced = true;
            } else {
                kept.emplace_back(a, e);
            }
        }
        if (replaced) {
            out = out + factor * Expr(Poly::term(kept, c), Poly(Rational(1)));
        } else {
            untouched.add_term(kept, c);
        }
    }
    return out + Expr(untouched, Poly(Rational(1)));
}

}  // namespace

Expr map_atoms(const Expr& e, const std::function<std::optional<Expr>(const Atom&)>& fn) {
    std::map<Atom, std::optional<Expr>, AtomLess> values;
    bool any = false;
    for (const auto& a : e.atoms()) {
        std::optional<Expr> v = fn(a);
        if (!v && a->kind == AtomKind::Root) {
            const Expr arg = map_atoms(a->arg, fn);
            if (arg != a->arg) v = arg.pow(Rational(1, a->root_index));
        } else if (!v && a->kind == AtomKind::Elementary) {
            const Expr arg = map_atoms(a->arg, fn);
            if (arg != a->arg) v = Expr::elementary(a->fn, arg);
        }
        any = any || v.has_value();
        values.emplace(a, std::move(v));
    }
    if (!any) return e;
    const Expr n = eval_poly(e.num(), values);
    if (e.den().is_constant()) return n * Expr(1 / e.den().constant_value());
    return n / eval_poly(e.den(), values);
}

Expr normalize(const Expr& e) {
    return map_atoms(e, [](const Atom&) { return std::optional<Expr>(); });
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings) {
    return map_atoms(e, [&](const Atom& a) -> std::optional<Expr> {
        if (a->kind == AtomKind::Symbol) {
            auto it = bindings.find(a->name);
            if (it != bindings.end()) return it->second;
        } else if (a->kind == AtomKind::Function) {
            for (const auto& arg : a->args) {
                auto it = bindings.find(arg);
                if (it != bindings.end() && it->second != Expr::symbol(arg))
                    throw unsupported_error("cannot substitute " + arg + " inside opaque function " + a->name);
            }
        }
        return std::nullopt;
    });
}

Expr apply_rules(const Expr& e, const std::vector<Rule>& rules) {
    if (rules.empty()) return e;
    Expr cur = e;
    for (int iter = 0; iter < 32; ++iter) {
        const Expr next = map_atoms(cur, [&](const Atom& a) -> std::optional<Expr> {
            for (const auto& r : rules) {
                if (r.lhs->kind == AtomKind::Symbol && a->kind == AtomKind::Symbol && a->name == r.lhs->name)
                    return r.rhs;
                if (r.lhs->kind == AtomKind::Function && a->kind == AtomKind::Function && a->name == r.lhs->name &&
                    a->args == r.lhs->args) {
                    bool dominates = true;
                    for (std::size_t k = 0; k < a->orders.size(); ++k)
                        dominates = dominates && a->orders[k] >= r.lhs->orders[k];
                    if (!dominates) continue;
                    Expr v = r.rhs;
                    for (std::size_t k = 0; k < a->orders.size(); ++k)
                        for (int i = r.lhs->orders[k]; i < a->orders[k]; ++i) v = diff(v, a->args[k]);
                    return v;
                }
            }
            return std::nullopt;
        });
        if (next == cur) return cur;
        cur = next;
    }
    throw unknown_error("relation rewriting did not terminate");
}

Expr from_monomial(const Monomial& m) { return {Poly::term(m, 1), Poly(Rational(1))}; }

std::map<Monomial, Expr, MonomialGreater> poly_coefficients(const Expr& e, const std::vector<std::string>& vars) {
    std::set<std::string> vs(vars.begin(), vars.end());
    for (const auto& a : e.den().atoms())
        for (const auto& v : vars)
            if (atom_depends_on(a, v)) throw unsupported_error("non-polynomial dependence on " + v + " (denominator)");
    for (const auto& a : e.num().atoms()) {
        if (a->kind == AtomKind::Symbol) continue;
        for (const auto& v : vars)
            if (atom_depends_on(a, v)) throw unsupported_error("non-polynomial dependence on " + v + " in " + a->str());
    }
    std::map<Monomial, Poly, MonomialGreater> split;
    for (const auto& [m, c] : e.num().terms()) {
        Monomial key;
        Monomial rest;
        for (const auto& pe : m) {
            if (pe.first->kind == AtomKind::Symbol && vs.count(pe.first->name) != 0U)
                key.push_back(pe);
            else
                rest.push_back(pe);
        }
        split[key].add_term(rest, c);
    }
    std::map<Monomial, Expr, MonomialGreater> out;
    for (auto& [k, p] : split) {
        if (p.is_zero()) continue;
        out.emplace(k, Expr(std::move(p), e.den()));
    }
    return out;
}

Expr rationalize_square_root(const Expr& e) {
    const Expr numer(e.num(), Poly(Rational(1)));
    std::optional<Atom> root;
    for (const auto& a : e.num().atoms()) {
        if (a->kind != AtomKind::Root) continue;
        if (root) throw unsupported_error("more than one radical in " + e.str());
        if (a->root_index != 2) throw unsupported_error("only square roots can be rationalized");
        root = a;
    }
    if (!root) return numer;
    const auto parts = e.num().coefficients_in(*root);
    const Poly p0 = parts.count(0) != 0U ? parts.at(0) : Poly();
    const Poly p1 = parts.count(1) != 0U ? parts.at(1) : Poly();
    const Expr e0(p0, Poly(Rational(1)));
    const Expr e1(p1, Poly(Rational(1)));
    Expr prod = e0 * e0 - e1 * e1 * (*root)->arg;
    Poly n = prod.num();
    const Poly radicand = (*root)->arg.num();
    if (!radicand.is_constant()) {
        while (!n.is_zero()) {
            auto q = divide_exact(n, radicand);
            if (!q) break;
            n = *q;
        }
    }
    return {n, Poly(Rational(1))};
}

// ---------------------------------------------------------------- numerics

namespace {

double eval_atom(const Atom& a, const std::map<std::string, double>& point);

double eval_poly_numeric(const Poly& p, const std::map<std::string, double>& point,
                         std::map<Atom, double, AtomLess>& cache) {
    double sum = 0.0;
    for (const auto& [m, c] : p.terms()) {
        double t = c.get_d();
        for (const auto& [a, e] : m) {
            auto it = cache.find(a);
            if (it == cache.end()) it = cache.emplace(a, eval_atom(a, point)).first;
            t *= std::pow(it->second, e);
        }
        sum += t;
    }
    return sum;
}

double eval_atom(const Atom& a, const std::map<std::string, double>& point) {
    switch (a->kind) {
        case AtomKind::Symbol:
        case AtomKind::Function: {
            const std::string key = a->str();
            auto it = point.find(key);
            if (it == point.end()) throw input_error("unbound atom " + key);
            return it->second;
        }
        case AtomKind::Root: {
            const double b = eval_numeric(a->arg, point);
            if (b < 0 && a->root_index % 2 == 0) throw std::domain_error("even root of negative value");
            if (b < 0) return -std::pow(-b, 1.0 / a->root_index);
            return std::pow(b, 1.0 / a->root_index);
        }
        case AtomKind::Elementary: {
            const double x = eval_numeric(a->arg, point);
            switch (a->fn) {
                case ElementaryFn::Exp: return std::exp(x);
                case ElementaryFn::Ln:
                    if (x <= 0) throw std::domain_error("logarithm of non-positive value");
                    return std::log(x);
                case ElementaryFn::Sin: return std::sin(x);
                case ElementaryFn::Cos: return std::cos(x);
            }
        }
    }
    return 0.0;
}

void collect_free(const Expr& e, std::set<Atom, AtomLess>& out) {
    for (const auto& a : e.atoms()) {
        if (a->kind == AtomKind::Symbol || a->kind == AtomKind::Function) {
            out.insert(a);
        } else {
            collect_free(a->arg, out);
        }
    }
}

}  // namespace

double eval_numeric(const Expr& e, const std::map<std::string, double>& point) {
    std::map<Atom, double, AtomLess> cache;
    const double n = eval_poly_numeric(e.num(), point, cache);
    const double d = eval_poly_numeric(e.den(), point, cache);
    if (d == 0.0) throw std::domain_error("division by zero");
    return n / d;
}

std::set<Atom, AtomLess> free_atoms(const Expr& e) {
    std::set<Atom, AtomLess> s;
    collect_free(e, s);
    return s;
}

}  // namespace pdham::sym
