#pragma once

// Flat double-precision evaluator for an Expr over a fixed variable list.

#include <string>
#include <vector>

#include "pdham/sym/expr.hpp"

namespace pdham::sym {

class CompiledExpr {
public:
    CompiledExpr() = default;
    /// Every free atom of e must be one of vars; throws an Input error
    /// naming the first one that is not.
    CompiledExpr(const Expr& e, const std::vector<std::string>& vars);

    /// values[k] binds vars[k]. Throws std::domain_error on division by zero
    /// or a root/logarithm outside its domain.
    double operator()(const double* values) const;
    double operator()(const std::vector<double>& values) const { return (*this)(values.data()); }

private:
    struct Term {
        double c;
        std::vector<std::pair<int, int>> factors;  // slot, exponent
    };
    struct Rat {
        std::vector<Term> num, den;
    };
    struct Slot {
        AtomKind kind;
        int var = -1;  // Symbol
        int rat = -1;  // Root / Elementary argument
        int q = 1;
        ElementaryFn fn = ElementaryFn::Exp;
    };

    int compile_rat(const Expr& e, const std::vector<std::string>& vars);
    int compile_atom(const Atom& a, const std::vector<std::string>& vars);
    double eval_rat(int r, const std::vector<double>& slots) const;

    std::vector<Slot> slots_;
    std::vector<Rat> rats_;
    std::vector<std::pair<Atom, int>> seen_;
    int top_ = -1;
};

}  // namespace pdham::sym
