#include "doctest.h"
#include "pdham/ham/hamilton.hpp"
#include "pdham/reduce/reduce.hpp"
#include "pdham/sysdef/parser.hpp"
#include "random_forms.hpp"

using namespace pdham;
using namespace pdham::reduce;
using noether::Status;
using sym::Expr;

namespace {

sysdef::SystemModel load(const std::string& name) {
    auto r = sysdef::parse_file(std::string(PDHAM_CORPUS_DIR) + "/" + name);
    REQUIRE(r.ok());
    return *r.model;
}

struct Maxwell {
    sysdef::SystemModel jet, red;
    BundleMap p;
};

Maxwell maxwell(int n) {
    Maxwell m{load("maxwell_n" + std::to_string(n) + ".pdh"), load("maxwell_reduced_n" + std::to_string(n) + ".pdh"), {}};
    m.p = sysdef::bind_map(m.jet.maps.at("p"), m.jet.chart, m.red.chart);
    return m;
}

BundleMap identity(const sysdef::ChartPtr& c) {
    BundleMap p{c, c, {}};
    for (const auto& y : c->fiber) p.p.push_back(Expr::symbol(y));
    return p;
}

}  // namespace

TEST_CASE("maxwell reduction") {
    for (int n : {2, 3, 4}) {
        CAPTURE(n);
        const Maxwell m = maxwell(n);
        const auto rep = verify_reduction(m.jet.main_form2(), m.p, m.red.main_form2());
        CHECK(rep.pullback.status == Status::Verified);
        CHECK(rep.vertical.status == Status::Verified);
        CHECK(rep.nondegenerate.status == Status::Verified);
        CHECK(rep.status() == Status::Verified);
    }
}

TEST_CASE("a wrong reduced form is caught") {
    const Maxwell m = maxwell(2);
    // flip the sign of the quadratic F term
    Form2 bad = m.red.main_form2();
    const int f01 = m.red.chart->fiber_index("F01");
    bad.set_v(f01, -bad.v(f01));
    const auto rep = verify_reduction(m.jet.main_form2(), m.p, bad);
    CHECK(rep.pullback.status == Status::Falsified);
    bool named = false;
    for (const auto& c : rep.pullback.components) named = named || (c.verdict.nonzero() && c.name.rfind("v[", 0) == 0);
    CHECK(named);
}

TEST_CASE("identity reduction of a hamiltonian form") {
    const auto kg = load("kg.pdh");
    const auto rep = verify_reduction(kg.main_form2(), identity(kg.chart), kg.main_form2());
    CHECK(rep.status() == Status::Verified);
    CHECK(rep.vertical.components.empty());
}

TEST_CASE("pullback along a linear map") {
    // source (x; y1, y2), target (x; z1, z2) with z1 = 2 y1, z2 = y1 + x y2
    auto src = testing::make_chart(1, 2);
    auto tgt = std::make_shared<sysdef::Chart>();
    tgt->base = {"x1"};
    tgt->fiber = {"z1", "z2"};
    const Expr x = Expr::symbol("x1"), y1 = Expr::symbol("y1"), y2 = Expr::symbol("y2");
    const Expr z1 = Expr::symbol("z1"), z2 = Expr::symbol("z2");
    BundleMap p{src, tgt, {2 * y1, y1 + x * y2}};
    Form2 wt(tgt);
    wt.set_w(0, 0, 1, z2);
    wt.set_v(0, z1 * z1);
    wt.set_v(1, Expr(3));
    const Form2 pb = pullback_form2(p, wt);
    // dz1 dz2 = 2x dy1 dy2 + 2 y2 dy1 dx; ω̃^1_{12} = z2 composed with p
    CHECK(pb.w(0, 0, 1) == (y1 + x * y2) * 2 * x);
    // ω_a = ω̃_A ∂_a p^A + 2ω̃_{AB}∂_a p^A ∂_x p^B
    CHECK(pb.v(0) == 4 * y1 * y1 * 2 + 3 + 2 * (y1 + x * y2) * (2 * y2));
    CHECK(pb.v(1) == 3 * x);
    const Form0 f = pullback_form0(p, Form0{tgt, {z1 * z2}});
    CHECK(f.f[0] == 2 * y1 * (y1 + x * y2));
    CHECK(pullback_form2(identity(src), pb).v(0) == pb.v(0));
}

TEST_CASE("pullback commutes with delta") {
    testing::RandomPoly rp(41);
    auto src = testing::make_chart(2, 3);
    auto tgt = std::make_shared<sysdef::Chart>();
    tgt->base = src->base;
    tgt->fiber = {"z1", "z2"};
    for (int k = 0; k < 20; ++k) {
        BundleMap p{src, tgt, {rp.poly(*src, 2), rp.poly(*src, 2)}};
        const auto th = rp.form1(tgt, 2);
        // pull θ back through its own component formula: θ^i_a = θ̃^i_A∂_a p^A,
        // H = H̃ - θ̃^i_A ∂_i p^A
        sysdef::Form1 pt = sysdef::Form1::zero(src);
        std::map<std::string, Expr> sub{{"z1", p.p[0]}, {"z2", p.p[1]}};
        pt.h = sym::substitute(th.h, sub);
        for (int i = 0; i < 2; ++i)
            for (int A = 0; A < 2; ++A) {
                const Expr c = sym::substitute(th.th[i][A], sub);
                for (int a = 0; a < 3; ++a) pt.th[i][a] += c * sym::diff(p.p[A], src->fiber[a]);
                pt.h -= c * sym::diff(p.p[A], src->base[i]);
            }
        const Form2 lhs = affcalc::delta1(pt);
        const Form2 rhs = pullback_form2(p, affcalc::delta1(th));
        for (int i = 0; i < 2; ++i)
            for (int a = 0; a < 3; ++a) {
                for (int b = a + 1; b < 3; ++b) CHECK(lhs.w(i, a, b) == rhs.w(i, a, b));
                CHECK(lhs.v(a) == rhs.v(a));
            }
    }
}

TEST_CASE("reduced equations pull back into the span of the original ones") {
    for (int n : {2, 3}) {
        const Maxwell m = maxwell(n);
        const auto src = ham::hamilton_residuals(m.jet.main_form2());
        const auto tgt = ham::hamilton_residuals(m.red.main_form2());
        std::vector<std::string> jets;
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < m.jet.chart->m(); ++a)
                jets.push_back(sysdef::jet_name(m.jet.chart->base[i], m.jet.chart->fiber[a]));
        // express everything in the jet monomials and ask for a constant combination
        for (const auto& rt : tgt.residuals) {
            const Expr target = pullback_jet_expr(m.p, rt);
            std::set<sym::Monomial> monos;
            std::vector<std::map<sym::Monomial, Expr, sym::MonomialGreater>> cols;
            for (const auto& r : src.residuals) cols.push_back(sym::poly_coefficients(r, jets));
            const auto rhs_c = sym::poly_coefficients(target, jets);
            for (const auto& c : cols)
                for (const auto& [mo, e] : c) monos.insert(mo);
            for (const auto& [mo, e] : rhs_c) monos.insert(mo);
            sym::Matrix a;
            std::vector<Expr> b;
            for (const auto& mo : monos) {
                std::vector<Expr> row;
                for (const auto& c : cols) row.push_back(c.count(mo) ? c.at(mo) : Expr());
                a.push_back(row);
                b.push_back(rhs_c.count(mo) ? rhs_c.at(mo) : Expr());
            }
            CHECK(sym::solve_linear(a, b).consistent());
        }
    }
}

TEST_CASE("noether pairs lift along the reduction") {
    const Maxwell m = maxwell(2);
    // on the reduced system: translation of A0 with current F01 dx-slot
    sysdef::VerticalField yt = sysdef::VerticalField::zero(m.red.chart);
    yt.y[m.red.chart->fiber_index("A0")] = 1;
    Form0 ft = Form0::zero(m.red.chart);
    ft.f[1] = -Expr::symbol("F01");
    REQUIRE(noether::is_noether_pair(m.red.main_form2(), yt, ft).status == Status::Verified);
    sysdef::VerticalField y = sysdef::VerticalField::zero(m.jet.chart);
    y.y[m.jet.chart->fiber_index("A0")] = 1;
    CHECK(noether::is_noether_pair(m.jet.main_form2(), y, pullback_form0(m.p, ft)).status == Status::Verified);
}
