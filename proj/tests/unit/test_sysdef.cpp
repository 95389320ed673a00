#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pdham/sysdef/parser.hpp"
#include "pdham/sysdef/render.hpp"

using namespace pdham::sysdef;
using pdham::sym::Expr;
using pdham::sym::Rational;

namespace {

std::string corpus(const std::string& name) { return std::string(PDHAM_CORPUS_DIR) + "/" + name; }

bool has_diag(const ParseResult& r, const std::string& code, const std::string& needle) {
    for (const auto& d : r.diagnostics)
        if (d.code == code && d.message.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("wave form components") {
    const ParseResult r = parse_file(corpus("wave.pdh"));
    for (const auto& d : r.diagnostics) MESSAGE(d.str());
    REQUIRE(r.ok());
    const SystemModel& m = *r.model;
    CHECK(validate(m).empty());
    const Form2& w = m.form2("omega");
    const Chart& c = *m.chart;
    const int u = c.fiber_index("u");
    const int ut = c.fiber_index("ut");
    const int ux = c.fiber_index("ux");
    const Expr T = Expr::function("T", {"ut", "ux"});
    const Expr V = Expr::function("V", {"u"});
    const std::string uf[2] = {"ut", "ux"};
    const int ui[2] = {ut, ux};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const Expr Tij = pdham::sym::diff(T, {uf[i], uf[j]});
            // w^j_{u_i, u} = T^{ij} / 2
            CHECK(w.w(j, ui[i], u) == Expr::rational(1, 2) * Tij);
            CHECK(w.w(j, u, ui[i]) == -Expr::rational(1, 2) * Tij);
        }
        Expr vi;
        for (int j = 0; j < 2; ++j) vi -= pdham::sym::diff(T, {uf[i], uf[j]}) * Expr::symbol(uf[j]);
        CHECK(w.v(ui[i]) == vi);
        CHECK(w.w(i, ut, ux) == Expr(0));
    }
    CHECK(w.v(u) == -pdham::sym::diff(V, "u"));
}

TEST_CASE("render then parse is the identity") {
    for (const char* f : {"wave.pdh"}) {
        const ParseResult r = parse_file(corpus(f));
        REQUIRE(r.ok());
        const std::string text = render_model(*r.model);
        const ParseResult back = parse_system(text);
        for (const auto& d : back.diagnostics) MESSAGE(d.str());
        REQUIRE(back.ok());
        CHECK(render_model(*back.model) == text);
    }
}

TEST_CASE("diagnostics") {
    CHECK(has_diag(parse_system("bundle { base: x fiber: }"), "semantic", "m ≥ 1 required"));
    CHECK(has_diag(parse_system("bundle { base: t fiber: u, v }\nform w deg 2 { w[t; u, u] = 1 }"), "semantic",
                   "repeated fiber index in skew slot"));
    const auto arity = parse_system("bundle { base: t, x fiber: u }\ncurrent f { t = u }");
    CHECK(has_diag(arity, "arity", "missing x"));
    const auto unk = parse_system("bundle { base: t fiber: u }\nfield Y { u = q }");
    CHECK(has_diag(unk, "unknown-symbol", "'q'"));
    CHECK(unk.diagnostics.front().line == 2);
    const auto dup = parse_system("bundle { base: t fiber: u }\nfield Y { u = 1 }\ncurrent Y { t = 1 }");
    CHECK(has_diag(dup, "duplicate-name", "'Y'"));
    const auto syn = parse_system("bundle { base: t fiber: u }\nfield Y { u = (1 + }");
    REQUIRE(syn.diagnostics.size() == 1);
    CHECK(syn.diagnostics[0].code == "syntax");
    CHECK(syn.diagnostics[0].line == 2);
    CHECK(has_diag(parse_system("bundle { base: t fiber: u } @"), "lexical", "'@'"));
    CHECK(has_diag(parse_system("bundle { base: t fiber: u, v }\nform w deg 2 { w[t; u, v] = 1  w[t; v, u] = 2 }"),
                   "semantic", "not opposite"));
    CHECK(has_diag(parse_system("bundle { base: t, x fiber: u }\ndeclare U(t, x)\nfield Y { u = U(x, t) }"),
                   "unsupported", "must repeat"));
}

TEST_CASE("declared symmetries canonicalize at parse time") {
    const auto r = parse_system(
        "bundle { base: t, x fiber: u }\nconst T symmetric\nconst F skew\n"
        "field A { u = u*T[t,x] - u*T[x,t] }\nfield B { u = F[x,t] + F[t,x] + F[t,t] }");
    REQUIRE(r.ok());
    CHECK(r.model->fields.at("A").y[0] == Expr(0));
    CHECK(r.model->fields.at("B").y[0] == Expr(0));
}

TEST_CASE("explicit components and wedge input agree") {
    const auto a = parse_system("bundle { base: t, x fiber: u, v }\nform w deg 2 { wedge = du*dv*vol[x] + v*du*vol }");
    const auto b = parse_system("bundle { base: t, x fiber: u, v }\nform w deg 2 { w[x; u, v] = 1/2  v[u] = v }");
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(render(a.model->form2("w"), Format::Text) == render(b.model->form2("w"), Format::Text));
    // vol[t] = dx, vol[x] = -dt
    const auto c = parse_system("bundle { base: t, x fiber: u }\nform f deg 0 { wedge = u*dt + dx }");
    REQUIRE(c.ok());
    const Form0& f = c.model->form0("f");
    CHECK(f.f[0] == Expr(1));
    CHECK(f.f[1] == -Expr::symbol("u"));
    const auto bad = parse_system("bundle { base: t, x fiber: u }\nform f deg 0 { wedge = du }");
    CHECK(has_diag(bad, "semantic", "does not fit"));
}

TEST_CASE("render of zero objects and latex notation") {
    auto chart = std::make_shared<Chart>();
    chart->base = {"x1", "x2"};
    chart->fiber = {"q", "p"};
    CHECK(render(Form0::zero(chart), Format::Text) == "0");
    Form2 w(chart);
    w.set_w(0, 1, 0, Expr::rational(1, 2));
    w.set_v(1, -Expr::symbol("q"));
    CHECK(render(w, Format::Latex) == "-dq dp d^{n-1}x_{x_{1}} - q dp d^n x");
}

TEST_CASE("expressions: precedence and literals") {
    Chart c;
    c.base = {"x"};
    c.fiber = {"u"};
    CHECK(parse_expression("-u^2", c) == -(Expr::symbol("u") * Expr::symbol("u")));
    CHECK(parse_expression("2^3^2", c) == Expr(512));
    CHECK(parse_expression("u^(1/2)*u^(-1/2)", c) == Expr(1));
    CHECK(parse_expression("0.25*u", c) == Expr::rational(1, 4) * Expr::symbol("u"));
    CHECK(parse_expression("3/4", c) == Expr::rational(3, 4));
    CHECK(parse_expression("diff(u^3, u)", c) == 3 * Expr::symbol("u") * Expr::symbol("u"));
    CHECK_THROWS(parse_expression("u + k", c));
    CHECK(parse_expression("u + k", c, true) == Expr::symbol("u") + Expr::symbol("k"));
}
