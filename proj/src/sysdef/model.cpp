#include "pdham/sysdef/model.hpp"

#include <algorithm>

#include "pdham/error.hpp"

namespace pdham::sysdef {

namespace {

int index_of(const std::vector<std::string>& v, const std::string& s) {
    auto it = std::find(v.begin(), v.end(), s);
    return it == v.end() ? -1 : static_cast<int>(it - v.begin());
}

}  // namespace

int Chart::base_index(const std::string& s) const { return index_of(base, s); }
int Chart::fiber_index(const std::string& s) const { return index_of(fiber, s); }

int Chart::coordinate_position(const std::string& s) const {
    const int i = base_index(s);
    if (i >= 0) return i;
    const int a = fiber_index(s);
    return a < 0 ? -1 : n() + a;
}

bool Chart::admits(const Expr& e, std::string* offending) const {
    for (const auto& a : e.atoms()) {
        bool ok = true;
        switch (a->kind) {
            case sym::AtomKind::Symbol: {
                const std::string& s = a->name;
                if (is_coordinate(s) || constants.count(s) != 0U) break;
                if (s.rfind("D[", 0) == 0) {
                    const auto close = s.find(']');
                    ok = close != std::string::npos && s.size() > close + 2 && s[close + 1] == '[' &&
                         base_index(s.substr(2, close - 2)) >= 0 &&
                         fiber_index(s.substr(close + 2, s.size() - close - 3)) >= 0;
                    break;
                }
                const auto br = s.find('[');
                ok = br != std::string::npos && constants.count(s.substr(0, br)) != 0U;
                break;
            }
            case sym::AtomKind::Function: {
                auto it = functions.find(a->name);
                ok = it != functions.end() && it->second == a->args;
                break;
            }
            case sym::AtomKind::Root:
            case sym::AtomKind::Elementary:
                ok = admits(a->arg, offending);
                if (!ok) return false;
                break;
        }
        if (!ok) {
            if (offending != nullptr) *offending = a->str();
            return false;
        }
    }
    return true;
}

bool same_chart(const Chart& a, const Chart& b) { return a.base == b.base && a.fiber == b.fiber; }

void require_same_chart(const ChartPtr& a, const ChartPtr& b, const char* what) {
    if (!a || !b) throw input_error(std::string(what) + ": missing chart");
    if (a != b && !same_chart(*a, *b)) throw input_error(std::string(what) + ": chart mismatch");
}

std::string jet_name(const std::string& base, const std::string& fiber) { return "D[" + base + "][" + fiber + "]"; }

Expr jet(const Chart& c, int i, int a) {
    return Expr::symbol(jet_name(c.base[static_cast<std::size_t>(i)], c.fiber[static_cast<std::size_t>(a)]));
}

Form0 Form0::zero(ChartPtr c) {
    Form0 f;
    f.f.assign(static_cast<std::size_t>(c->n()), Expr());
    f.chart = std::move(c);
    return f;
}

bool Form0::is_zero() const {
    return std::all_of(f.begin(), f.end(), [](const Expr& e) { return e.is_zero(); });
}

Form1 Form1::zero(ChartPtr c) {
    Form1 t;
    t.th.assign(static_cast<std::size_t>(c->n()), std::vector<Expr>(static_cast<std::size_t>(c->m())));
    t.chart = std::move(c);
    return t;
}

bool Form1::is_zero() const {
    for (const auto& row : th)
        for (const auto& e : row)
            if (!e.is_zero()) return false;
    return h.is_zero();
}

Form2::Form2(ChartPtr c) : chart_(std::move(c)) {
    const auto n = static_cast<std::size_t>(chart_->n());
    const auto m = static_cast<std::size_t>(chart_->m());
    upper_.assign(n * (m * (m - 1) / 2), Expr());
    v_.assign(m, Expr());
}

std::size_t Form2::slot(int i, int a, int b) const {
    const int m = chart_->m();
    // row-major index of (a, b), a < b, in the strict upper triangle
    const int idx = a * m - a * (a + 1) / 2 + (b - a - 1);
    return static_cast<std::size_t>(i * (m * (m - 1) / 2) + idx);
}

Expr Form2::w(int i, int a, int b) const {
    if (a == b) return {};
    if (a < b) return upper_[slot(i, a, b)];
    return -upper_[slot(i, b, a)];
}

void Form2::set_w(int i, int a, int b, const Expr& e) {
    if (a == b) {
        if (!e.is_zero()) throw input_error("repeated fiber index in skew slot");
        return;
    }
    if (a < b) {
        upper_[slot(i, a, b)] = e;
    } else {
        upper_[slot(i, b, a)] = -e;
    }
}

bool Form2::is_zero() const {
    return std::all_of(upper_.begin(), upper_.end(), [](const Expr& e) { return e.is_zero(); }) &&
           std::all_of(v_.begin(), v_.end(), [](const Expr& e) { return e.is_zero(); });
}

VerticalField VerticalField::zero(ChartPtr c) {
    VerticalField y;
    y.y.assign(static_cast<std::size_t>(c->m()), Expr());
    y.chart = std::move(c);
    return y;
}

Connection Connection::jets(ChartPtr ch) {
    Connection c;
    for (int i = 0; i < ch->n(); ++i) {
        c.c.emplace_back();
        for (int a = 0; a < ch->m(); ++a) c.c.back().push_back(jet(*ch, i, a));
    }
    c.chart = std::move(ch);
    return c;
}

const Form2& SystemModel::form2(const std::string& name) const {
    auto it = forms.find(name);
    if (it == forms.end()) throw input_error("unknown form " + name);
    if (it->second.degree != 2) throw input_error("form " + name + " is not of degree 2");
    return *it->second.f2;
}

const Form1& SystemModel::form1(const std::string& name) const {
    auto it = forms.find(name);
    if (it == forms.end()) throw input_error("unknown form " + name);
    if (it->second.degree != 1) throw input_error("form " + name + " is not of degree 1");
    return *it->second.f1;
}

const Form0& SystemModel::form0(const std::string& name) const {
    auto it = forms.find(name);
    if (it != forms.end() && it->second.degree == 0) return *it->second.f0;
    auto jt = currents.find(name);
    if (jt != currents.end()) return jt->second;
    throw input_error("unknown current " + name);
}

std::string SystemModel::main_form2_name() const {
    std::string found;
    for (const auto& name : order) {
        auto it = forms.find(name);
        if (it == forms.end() || it->second.degree != 2) continue;
        if (!found.empty()) throw input_error("several degree-2 forms; choose one with --form");
        found = name;
    }
    if (found.empty()) throw input_error("no degree-2 form declared");
    return found;
}

const Form2& SystemModel::main_form2() const { return form2(main_form2_name()); }

BundleMap bind_map(const MapDecl& decl, const ChartPtr& source, const ChartPtr& target) {
    if (source->base != target->base) throw input_error("map " + decl.name + ": base coordinates differ");
    BundleMap p;
    p.source = source;
    p.target = target;
    p.p.assign(static_cast<std::size_t>(target->m()), Expr());
    std::vector<bool> seen(static_cast<std::size_t>(target->m()), false);
    for (const auto& [name, e] : decl.assignments) {
        const int A = target->fiber_index(name);
        if (A < 0) throw input_error("map " + decl.name + ": " + name + " is not a fiber coordinate of the target");
        seen[static_cast<std::size_t>(A)] = true;
        p.p[static_cast<std::size_t>(A)] = e;
    }
    // unassigned coordinates shared with the source map to themselves
    for (int A = 0; A < target->m(); ++A) {
        const std::string& name = target->fiber[static_cast<std::size_t>(A)];
        if (seen[static_cast<std::size_t>(A)]) continue;
        if (source->fiber_index(name) >= 0) {
            p.p[static_cast<std::size_t>(A)] = Expr::symbol(name);
            continue;
        }
        throw input_error("map " + decl.name + ": no value for target coordinate " +
                              name);
    }
    return p;
}

}  // namespace pdham::sysdef
