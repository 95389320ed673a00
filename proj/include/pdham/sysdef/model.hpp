#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pdham/sym/expr.hpp"

namespace pdham::sysdef {

using sym::Expr;

enum class Symmetry { None, Symmetric, Skew };

struct Chart {
    std::vector<std::string> base;
    std::vector<std::string> fiber;
    std::map<std::string, std::vector<std::string>> functions;
    std::map<std::string, Symmetry> constants;
    std::vector<std::string> function_order;
    std::vector<std::string> constant_order;

    int n() const { return static_cast<int>(base.size()); }
    int m() const { return static_cast<int>(fiber.size()); }
    int base_index(const std::string& s) const;   // -1 if absent
    int fiber_index(const std::string& s) const;  // -1 if absent
    bool is_coordinate(const std::string& s) const { return base_index(s) >= 0 || fiber_index(s) >= 0; }
    /// Position in (base..., fiber...) or -1.
    int coordinate_position(const std::string& s) const;
    /// True if every atom of e is a chart coordinate, declared constant,
    /// declared function (with its partials) or jet placeholder.
    bool admits(const Expr& e, std::string* offending = nullptr) const;
};

using ChartPtr = std::shared_ptr<const Chart>;

/// Same coordinates in the same order.
bool same_chart(const Chart& a, const Chart& b);
void require_same_chart(const ChartPtr& a, const ChartPtr& b, const char* what);

/// Placeholder for the jet coordinate standing for ∂_i y^a.
Expr jet(const Chart& c, int i, int a);
std::string jet_name(const std::string& base, const std::string& fiber);

/// f = f^i d^{n-1}x_i
struct Form0 {
    ChartPtr chart;
    std::vector<Expr> f;

    static Form0 zero(ChartPtr c);
    bool is_zero() const;
};

/// θ = θ^i_a dy^a d^{n-1}x_i - H d^n x
struct Form1 {
    ChartPtr chart;
    std::vector<std::vector<Expr>> th;  // [i][a]
    Expr h;

    static Form1 zero(ChartPtr c);
    bool is_zero() const;
};

/// ω = ω^i_{ab} dy^a dy^b d^{n-1}x_i + ω_a dy^a d^n x, summed over all a, b.
/// Only a < b is stored.
class Form2 {
public:
    Form2() = default;
    explicit Form2(ChartPtr c);

    const ChartPtr& chart() const { return chart_; }
    Expr w(int i, int a, int b) const;
    void set_w(int i, int a, int b, const Expr& e);
    const Expr& v(int a) const { return v_[static_cast<std::size_t>(a)]; }
    void set_v(int a, const Expr& e) { v_[static_cast<std::size_t>(a)] = e; }
    bool is_zero() const;

private:
    std::size_t slot(int i, int a, int b) const;

    ChartPtr chart_;
    std::vector<Expr> upper_;
    std::vector<Expr> v_;
};

struct VerticalField {
    ChartPtr chart;
    std::vector<Expr> y;

    static VerticalField zero(ChartPtr c);
};

struct Connection {
    ChartPtr chart;
    std::vector<std::vector<Expr>> c;  // [i][a]

    /// ∇^a_i = D[i][a]
    static Connection jets(ChartPtr ch);
};

/// Fiber-preserving map over the identity of the base.
struct BundleMap {
    ChartPtr source;
    ChartPtr target;
    std::vector<Expr> p;  // one per target fiber coordinate, in source symbols
};

struct ConstraintSet {
    ChartPtr chart;
    std::vector<Expr> eqs;
};

struct PDSystem {
    ChartPtr chart;
    std::vector<Expr> residuals;
    std::vector<std::string> labels;
};

/// A map as declared in a file, before its target chart is known.
struct MapDecl {
    std::string name;
    std::string target;
    std::vector<std::pair<std::string, Expr>> assignments;
};

struct FormEntry {
    int degree = 0;
    std::optional<Form0> f0;
    std::optional<Form1> f1;
    std::optional<Form2> f2;
};

struct SystemModel {
    ChartPtr chart;
    std::vector<sym::Rule> relations;
    std::map<std::string, FormEntry> forms;
    std::map<std::string, VerticalField> fields;
    std::map<std::string, Form0> currents;
    std::map<std::string, MapDecl> maps;
    std::optional<ConstraintSet> constraints;
    std::vector<std::pair<std::string, std::string>> simulate;  // key, expression text
    std::vector<std::string> order;  // declaration order of named objects

    const Form2& form2(const std::string& name) const;
    const Form1& form1(const std::string& name) const;
    const Form0& form0(const std::string& name) const;
    /// The unique degree-2 form, or the one named; throws when ambiguous.
    const Form2& main_form2() const;
    std::string main_form2_name() const;
};

/// Binds a declared map against its target chart.
BundleMap bind_map(const MapDecl& decl, const ChartPtr& source, const ChartPtr& target);

}  // namespace pdham::sysdef
