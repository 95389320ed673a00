#pragma once

// Exact symbolic expressions.
//
// Every Expr is stored in canonical form: a ratio num/den of sparse
// multivariate polynomials with rational coefficients over "atoms", with
// gcd(num, den) = 1 and den having leading coefficient 1. Atoms are
// symbols (coordinates, constants, jet placeholders), opaque function
// applications together with their formal partial derivatives, roots
// B^(1/q) of canonical expressions, and elementary functions of canonical
// expressions. Values are immutable and share structure.

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace pdham::sym {

using Rational = mpq_class;

struct AtomNode;
using Atom = std::shared_ptr<const AtomNode>;

enum class AtomKind { Symbol, Function, Root, Elementary };
enum class ElementaryFn { Exp, Ln, Sin, Cos };

/// Total order on atoms; 0 means structurally equal.
int compare(const Atom& a, const Atom& b);

struct AtomLess {
    bool operator()(const Atom& a, const Atom& b) const { return compare(a, b) < 0; }
};

/// Atom powers sorted ascending by atom, exponents strictly positive.
using Monomial = std::vector<std::pair<Atom, int>>;

/// Graded-lexicographic comparison; the greater monomial leads.
int compare(const Monomial& a, const Monomial& b);
int total_degree(const Monomial& m);
Monomial multiply(const Monomial& a, const Monomial& b);
std::optional<Monomial> divide(const Monomial& a, const Monomial& b);

struct MonomialGreater {
    bool operator()(const Monomial& a, const Monomial& b) const { return compare(a, b) > 0; }
};

class Poly {
public:
    using Terms = std::map<Monomial, Rational, MonomialGreater>;

    Poly() = default;
    explicit Poly(const Rational& c);
    static Poly atom(const Atom& a, int exponent = 1);
    static Poly term(Monomial m, const Rational& c);

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Rational constant_value() const;  // only valid if is_constant()
    const Monomial& leading_monomial() const { return terms_.begin()->first; }
    const Rational& leading_coefficient() const { return terms_.begin()->second; }
    std::size_t size() const { return terms_.size(); }

    Poly operator-() const;
    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly scaled(const Rational& c) const;
    friend bool operator==(const Poly& a, const Poly& b);

    int degree_in(const Atom& x) const;
    /// Coefficients in x: exponent -> polynomial free of x.
    std::map<int, Poly> coefficients_in(const Atom& x) const;
    std::set<Atom, AtomLess> atoms() const;
    Poly monic() const;

    void add_term(const Monomial& m, const Rational& c);

private:
    Terms terms_;
};

int compare(const Poly& a, const Poly& b);

std::optional<Poly> divide_exact(const Poly& a, const Poly& b);
/// Remainder of multivariate division of a by a single divisor g (grlex).
Poly reduce_by(const Poly& a, const Poly& g);
/// Monic greatest common divisor over Q[atoms]; gcd(0, 0) = 0.
Poly gcd(const Poly& a, const Poly& b);

namespace detail {
struct ExprData;
}

class Expr {
public:
    Expr();
    Expr(long v);  // NOLINT(google-explicit-constructor)
    Expr(int v) : Expr(static_cast<long>(v)) {}  // NOLINT
    Expr(const Rational& v);  // NOLINT
    Expr(Poly num, Poly den);

    static Expr symbol(const std::string& name);
    /// Opaque function application, optionally differentiated:
    /// orders[k] counts derivatives in args[k].
    static Expr function(const std::string& name, const std::vector<std::string>& args,
                         std::vector<int> orders = {});
    static Expr elementary(ElementaryFn fn, const Expr& arg);
    static Expr from_atom(const Atom& a);
    static Expr rational(long p, long q) { return Expr(Rational(p, q)); }

    const Poly& num() const;
    const Poly& den() const;

    bool is_zero() const { return num().is_zero(); }
    bool is_constant() const { return num().is_constant() && den().is_constant(); }
    std::optional<Rational> constant_value() const;
    bool is_polynomial() const { return den().is_constant(); }

    Expr operator-() const;
    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    Expr& operator+=(const Expr& o) { return *this = *this + o; }
    Expr& operator-=(const Expr& o) { return *this = *this - o; }
    Expr& operator*=(const Expr& o) { return *this = *this * o; }
    Expr pow(const Rational& exponent) const;
    Expr pow(long exponent) const { return pow(Rational(exponent)); }

    friend bool operator==(const Expr& a, const Expr& b);
    friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

    /// Atoms appearing at top level (not inside roots / elementary args).
    std::set<Atom, AtomLess> atoms() const;
    /// True if any root or elementary-function atom occurs anywhere.
    bool has_transcendental() const;
    bool depends_on(const std::string& symbol) const;

    std::string str() const;
    std::string latex() const;

private:
    std::shared_ptr<const detail::ExprData> d_;
};

int compare(const Expr& a, const Expr& b);

struct AtomNode {
    AtomKind kind = AtomKind::Symbol;
    std::string name;
    std::vector<std::string> args;  // Function: declared arguments
    std::vector<int> orders;        // Function: derivative orders per argument
    Expr arg;                       // Root: base; Elementary: argument
    int root_index = 0;             // Root: q in B^(1/q)
    ElementaryFn fn = ElementaryFn::Exp;

    std::string str() const;
    std::string latex() const;
};

Atom make_symbol(const std::string& name);
Atom make_function(const std::string& name, const std::vector<std::string>& args,
                   std::vector<int> orders);

/// Exact partial derivative with respect to a symbol.
Expr diff(const Expr& e, const std::string& var);
Expr diff(const Expr& e, const std::vector<std::string>& vars);
inline Expr diff(const Expr& e, std::initializer_list<std::string> vars) {
    return diff(e, std::vector<std::string>(vars));
}

/// Rebuild e after replacing atoms; the callback returns nullopt to keep an
/// atom. Root and elementary arguments are rewritten recursively.
Expr map_atoms(const Expr& e, const std::function<std::optional<Expr>(const Atom&)>& fn);

/// Canonical form. Construction already canonicalizes, so this rebuilds e
/// from its atoms and is idempotent.
Expr normalize(const Expr& e);

/// Simultaneous substitution of symbols. Throws SubstitutionError when a
/// bound symbol is an argument of an opaque function present in e.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& bindings);

/// A rewrite "atom -> rhs". For opaque functions, any formal partial whose
/// derivative orders dominate those of lhs is rewritten to the matching
/// derivative of rhs.
struct Rule {
    Atom lhs;
    Expr rhs;
};
Expr apply_rules(const Expr& e, const std::vector<Rule>& rules);

/// Coefficients of e viewed as polynomial in the given symbols.
std::map<Monomial, Expr, MonomialGreater> poly_coefficients(const Expr& e,
                                                            const std::vector<std::string>& vars);
Expr from_monomial(const Monomial& m);

/// Multiply e by the conjugate of its single square-root atom (if any) and
/// strip powers of the radicand, giving a radical-free numerator whose zero
/// set contains that of e.
Expr rationalize_square_root(const Expr& e);

/// Numeric value with all free atoms bound by their text form (e.g. "u1",
/// "T[t,x]", "diff(U,t,t)").
double eval_numeric(const Expr& e, const std::map<std::string, double>& point);

/// Free atoms that need numeric values: symbols and opaque applications,
/// collected recursively through roots and elementary functions.
std::set<Atom, AtomLess> free_atoms(const Expr& e);

}  // namespace pdham::sym
