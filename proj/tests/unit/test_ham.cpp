#include "doctest.h"
#include "pdham/affcalc/calculus.hpp"
#include "pdham/error.hpp"
#include "pdham/ham/hamilton.hpp"
#include "pdham/sysdef/parser.hpp"
#include "random_forms.hpp"

using namespace pdham;
using namespace pdham::ham;
using pdham::testing::make_chart;
using pdham::testing::RandomPoly;
using sym::diff;

namespace {

sysdef::SystemModel load(const std::string& name) {
    auto r = sysdef::parse_file(std::string(PDHAM_CORPUS_DIR) + "/" + name);
    REQUIRE(r.ok());
    return *r.model;
}

Expr sym_(const char* s) { return Expr::symbol(s); }
Expr jet(const sysdef::SystemModel& m, const char* x, const char* y) {
    return sysdef::jet(*m.chart, m.chart->base_index(x), m.chart->fiber_index(y));
}
const Expr& eq(const PDSystem& s, const char* label) {
    for (std::size_t k = 0; k < s.labels.size(); ++k)
        if (s.labels[k] == label) return s.residuals[k];
    FAIL("no equation " << label);
    static Expr none;
    return none;
}

}  // namespace

TEST_CASE("string equations") {
    const auto m = load("string.pdh");
    const PDSystem s = hamilton_residuals(m.main_form2());
    for (const char* a : {"1", "2"}) {
        const std::string q = std::string("q") + a, sa = std::string("s") + a, ta = std::string("t") + a;
        CHECK(eq(s, q.c_str()) == jet(m, "t", ta.c_str()) + jet(m, "s", sa.c_str()));
        CHECK(eq(s, sa.c_str()) == -(jet(m, "s", q.c_str()) + sym_(sa.c_str())));
        CHECK(eq(s, ta.c_str()) == -(jet(m, "t", q.c_str()) - sym_("e") * sym_(ta.c_str())));
    }
    CHECK(eq(s, "e") == Expr::rational(1, 2) * (sym_("t1") * sym_("t1") + sym_("t2") * sym_("t2") - 1));
}

TEST_CASE("de Donder-Weyl equations") {
    const auto m = load("dw.pdh");
    const PDSystem s = hamilton_residuals(m.main_form2());
    const Expr H = Expr::function("H", m.chart->functions.at("H"));
    CHECK(eq(s, "p11") == diff(H, "p11") - jet(m, "x1", "q1"));
    CHECK(eq(s, "q2") == jet(m, "x1", "p12") + jet(m, "x2", "p22") + diff(H, "q2"));
    const Expr L = lagrangian_of(m.form1("theta"));
    CHECK(L == sym_("p11") * jet(m, "x1", "q1") + sym_("p12") * jet(m, "x1", "q2") + sym_("p21") * jet(m, "x2", "q1") +
                   sym_("p22") * jet(m, "x2", "q2") - H);
}

TEST_CASE("vertical kernels") {
    SUBCASE("string") {
        const auto m = load("string.pdh");
        const auto k = kernel_vertical(m.main_form2());
        REQUIRE(k.basis.size() == 1);
        const int e = m.chart->fiber_index("e");
        for (int a = 0; a < m.chart->m(); ++a) CHECK(k.basis[0].y[a].is_zero() == (a != e));
        const auto full = kernel_full(m.main_form2());
        CHECK(full.basis.empty());
        REQUIRE(full.strata.size() == 1);
        CHECK(normalize_condition(full.strata[0]) == Expr::rational(1, 2) * (sym_("t1") * sym_("t1") + sym_("t2") * sym_("t2") - 1));
    }
    SUBCASE("wave") {
        const auto m = load("wave.pdh");
        const auto k = kernel_vertical(m.main_form2());
        CHECK(k.basis.empty());
        const Expr T = Expr::function("T", {"ut", "ux"});
        const Expr det = diff(T, {"ut", "ut"}) * diff(T, {"ux", "ux"}) - diff(T, {"ut", "ux"}).pow(2);
        CHECK(sym::divide_exact(k.certificate.num(), det.num()).has_value());
        CHECK(is_hamiltonian(m.main_form2()).kind == HamiltonianKind::Hamiltonian);
    }
    SUBCASE("maxwell") {
        for (int n : {2, 3, 4}) {
            const auto m = load("maxwell_n" + std::to_string(n) + ".pdh");
            const auto k = kernel_vertical(m.main_form2());
            CHECK(k.basis.size() == static_cast<std::size_t>(n * (n + 1) / 2));
            for (const auto& y : k.basis) {
                const auto th = affcalc::insert_vertical(y, m.main_form2());
                for (const auto& row : th.th)
                    for (const auto& c : row) CHECK(c.is_zero());
            }
            const auto full = kernel_full(m.main_form2());
            CHECK(full.basis.size() == k.basis.size());
        }
    }
    SUBCASE("zero linear part") {
        const auto ch = make_chart(2, 3);
        CHECK(kernel_vertical(sysdef::Form2(ch)).basis.size() == 3);
    }
}

TEST_CASE("connections") {
    SUBCASE("wave particular solution annihilates omega") {
        const auto m = load("wave.pdh");
        const auto sol = solve_connection(m.main_form2());
        REQUIRE(sol.solvable);
        const auto c = affcalc::insert_connection(sol.particular, m.main_form2());
        for (const auto& x : c.c) CHECK(sym::is_zero(x).zero());
        CHECK(sol.particular.c[0][0] == sym_("ut"));
        CHECK(sol.particular.c[1][0] == sym_("ux"));
    }
    SUBCASE("string needs the constraint") {
        const auto m = load("string.pdh");
        const auto sol = solve_connection(m.main_form2());
        CHECK_FALSE(sol.solvable);
        REQUIRE(sol.conditions.size() == 1);
        sysdef::ConstraintSet cs{m.chart, sol.conditions};
        const auto on = solve_connection(m.main_form2(), &cs);
        REQUIRE(on.solvable);
        const auto red = make_reducer(&cs);
        for (const auto& x : affcalc::insert_connection(on.particular, m.main_form2()).c) CHECK(red(x).is_zero());
    }
}

TEST_CASE("constraint algorithm") {
    const auto m = load("string.pdh");
    const auto run = constraint_algorithm(m.main_form2(), 8);
    CHECK(run.terminated);
    CHECK_FALSE(run.empty);
    REQUIRE(run.stages.size() == 2);
    CHECK(run.stages[0].eqs.empty());
    REQUIRE(run.stages[1].eqs.size() == 1);
    CHECK(run.stages[1].eqs[0] == Expr::rational(1, 2) * (sym_("t1") * sym_("t1") + sym_("t2") * sym_("t2") - 1));

    const auto bad = constraint_algorithm(load("inconsistent.pdh").main_form2(), 8);
    CHECK(bad.terminated);
    CHECK(bad.empty);
    CHECK(bad.stages.back().eqs == std::vector<Expr>{Expr(1)});

    const auto kg = constraint_algorithm(load("kg.pdh").main_form2(), 8);
    CHECK(kg.terminated);
    CHECK(kg.stages.size() == 1);
}

TEST_CASE("constraint step is monotone") {
    const auto m = load("string.pdh");
    sysdef::ConstraintSet c{m.chart, {}};
    for (int k = 0; k < 3; ++k) {
        const auto next = constraint_step(m.main_form2(), c);
        for (std::size_t j = 0; j < c.eqs.size(); ++j) CHECK(next.eqs[j] == c.eqs[j]);
        c = next;
    }
}

TEST_CASE("euler-lagrange of the lagrangian of a potential") {
    RandomPoly rp(21);
    int sign = 0;
    for (int k = 0; k < 100; ++k) {
        const auto ch = make_chart(rp.uniform(1, 2), rp.uniform(1, 3));
        const auto th = rp.form1(ch, 3);
        const PDSystem el = euler_lagrange(lagrangian_of(th), ch);
        const PDSystem hr = hamilton_residuals(affcalc::delta1(th));
        for (std::size_t b = 0; b < el.residuals.size(); ++b) {
            if (hr.residuals[b].is_zero()) {
                CHECK(el.residuals[b].is_zero());
                continue;
            }
            const int s = el.residuals[b] == hr.residuals[b] ? 1 : el.residuals[b] == -hr.residuals[b] ? -1 : 0;
            REQUIRE(s != 0);
            if (sign == 0) sign = s;
            CHECK(s == sign);
        }
    }
    CHECK(sign == -1);
}

TEST_CASE("divergence lagrangians have trivial equations") {
    RandomPoly rp(22);
    for (int k = 0; k < 50; ++k) {
        const auto ch = make_chart(rp.uniform(1, 2), rp.uniform(1, 3));
        const auto nu = rp.form0(ch, 3);
        const Expr L = lagrangian_of(affcalc::delta0(nu));
        for (const auto& r : euler_lagrange(L, ch).residuals) CHECK(r.is_zero());
    }
}

TEST_CASE("euler-lagrange rejects non-affine lagrangians") {
    const auto ch = make_chart(1, 1);
    const Expr d = sysdef::jet(*ch, 0, 0);
    try {
        (void)euler_lagrange(d * d, ch);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Unsupported);
    }
}
