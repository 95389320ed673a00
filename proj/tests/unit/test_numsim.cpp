#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "doctest.h"
#include "pdham/error.hpp"
#include "pdham/numsim/sim.hpp"
#include "pdham/sysdef/parser.hpp"

using namespace pdham;
using namespace pdham::numsim;

namespace {

using Entries = std::vector<std::pair<std::string, std::string>>;

std::string corpus(const std::string& name) { return std::string(PDHAM_CORPUS_DIR) + "/" + name; }

SimConfig kg_section() {
    auto r = sysdef::parse_file(corpus("kg.pdh"));
    REQUIRE(r.ok());
    return parse_config(r.model->simulate);
}

SimConfig coarse(SimConfig c, int n) {
    c.steps = c.steps * n / c.N;
    c.N = n;
    return c;
}

Entries traveling(int n) {
    return {{"L", "2"}, {"N", std::to_string(n)}, {"steps", std::to_string(4 * n)}, {"mu", "0"},
            {"u0", "sin(2*pi*x/L)"}, {"v0", "-(2*pi/L)*cos(2*pi*x/L)"}, {"U", "1"}, {"exact", "sin(2*pi*(x-t)/L)"}};
}

sym::Expr expr(const std::string& text) {
    sysdef::Chart c;
    c.base = {"t", "x"};
    c.fiber = {"u"};
    return sysdef::parse_expression(text, c, true);
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

ErrorKind kind_of(const Entries& e) {
    try {
        parse_config(e);
    } catch (const Error& err) {
        return err.kind();
    }
    return ErrorKind::Falsified;
}

}  // namespace

TEST_CASE("scalar and AVX2 kernels agree bitwise") {
    if (!avx2_available()) {
        MESSAGE("AVX2 not available, skipped");
        return;
    }
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (std::size_t n : {8, 9, 10, 11, 12, 13, 31, 64, 257}) {
        std::vector<double> p(n), c(n), a(n), b(n);
        for (std::size_t j = 0; j < n; ++j) {
            p[j] = d(rng);
            c[j] = d(rng);
        }
        leapfrog_step_scalar(p.data(), c.data(), a.data(), n, 0.3721, -0.0137);
        leapfrog_step_avx2(p.data(), c.data(), b.data(), n, 0.3721, -0.0137);
        CHECK(same_bits(a, b));
    }
    const SimConfig cfg = coarse(kg_section(), 96);
    const auto s = simulate_leapfrog(cfg, KernelKind::Scalar);
    const auto v = simulate_leapfrog(cfg, KernelKind::Avx2);
    REQUIRE(s.u.size() == v.u.size());
    bool all = true;
    for (std::size_t k = 0; k < s.u.size(); ++k) all = all && same_bits(s.u[k], v.u[k]);
    CHECK(all);
}

TEST_CASE("zero data gives the zero trajectory and zero charge") {
    const auto cfg = parse_config({{"N", "16"}, {"steps", "20"}, {"u0", "0"}, {"v0", "0"}, {"U", "cos(t)*x"}});
    const auto tr = simulate_leapfrog(cfg);
    REQUIRE(tr.u.size() == 21);
    for (const auto& s : tr.u)
        for (double v : s) CHECK(v == 0.0);
    for (double q : charge_series(tr, cfg)) CHECK(q == 0.0);
}

TEST_CASE("leapfrog is time symmetric") {
    const SimConfig cfg = coarse(kg_section(), 128);
    const auto tr = simulate_leapfrog(cfg);
    const std::size_t S = tr.u.size() - 1;
    const auto back = evolve(tr.u[S], tr.u[S - 1], static_cast<int>(S) - 1, tr.dx, tr.dt, cfg.mu);
    double err = 0.0;
    for (std::size_t j = 0; j < tr.u[0].size(); ++j) err = std::max(err, std::fabs(back.back()[j] - tr.u[0][j]));
    CHECK(err < 1e-15 * static_cast<double>(S) * 10);
}

TEST_CASE("standing mode period matches the dispersion relation") {
    // u_tt = u_xx + mu u, mu = -3 k^2: nu^2 = k^2 - mu = 4 k^2
    const auto cfg = parse_config({{"L", "1"}, {"N", "256"}, {"steps", "2048"}, {"mu", "-3*(2*pi/L)^2"},
                                   {"u0", "sin(2*pi*x/L)"}, {"v0", "0"}, {"U", "1"}});
    const double period = estimate_period(simulate_leapfrog(cfg), 64);
    const double nu = 2.0 * (2.0 * std::numbers::pi / cfg.L);
    CHECK(std::fabs(period - 2.0 * std::numbers::pi / nu) / (2.0 * std::numbers::pi / nu) < 0.01);
}

TEST_CASE("traveling wave error is second order") {
    const auto a = max_error(simulate_leapfrog(parse_config(traveling(64))), parse_config(traveling(64)));
    const auto b = max_error(simulate_leapfrog(parse_config(traveling(128))), parse_config(traveling(128)));
    CHECK(a / b > 3.0);
    CHECK(a / b < 5.0);
    const auto conv = error_convergence(parse_config(traveling(64)));
    CHECK(conv.pass);
    CHECK(conv.factor == doctest::Approx(a / b));
}

TEST_CASE("corpus symmetry profiles solve the field equation") {
    CHECK(check_symmetry_profile(kg_section()) == "zero");
    for (const char* f : {"kg_sim_quadrature.cfg", "kg_sim_massless.cfg", "traveling.cfg"})
        CHECK(check_symmetry_profile(read_config_file(corpus(f))) == "zero");
    auto bad = kg_section();
    bad.U = expr("cos(2*pi*t/L)*sin(2*pi*x/L)");
    CHECK(check_symmetry_profile(bad) != "zero");
}

TEST_CASE("charge drift converges at second order") {
    for (const SimConfig& full : {kg_section(), read_config_file(corpus("kg_sim_quadrature.cfg")),
                                  read_config_file(corpus("kg_sim_massless.cfg"))}) {
        const auto c = charge_convergence(coarse(full, 128));
        CHECK(!c.exact);
        CHECK(c.factor > 3.0);
        CHECK(c.factor < 5.0);
        CHECK(c.pass);
    }
}

TEST_CASE("forward time difference is a first-order negative control") {
    const auto c = charge_convergence(coarse(kg_section(), 128), TimeDifference::Forward);
    CHECK(c.order > 0.7);
    CHECK(c.order < 1.3);
    CHECK(!c.pass);
    CHECK(c.verdict().find("fail") != std::string::npos);
}

TEST_CASE("exactly conserved charges report an exact pass") {
    // U = 1 with constant data: u_t = 0
    auto cfg = parse_config({{"N", "32"}, {"steps", "64"}, {"u0", "3"}, {"v0", "0"}, {"U", "1"}});
    auto c = charge_convergence(cfg);
    CHECK(c.exact);
    CHECK(c.verdict() == "exact (pass)");
    // U = 1 and U = t are conserved by the discrete scheme itself
    for (const char* U : {"1", "t"}) {
        cfg = parse_config(traveling(64));
        cfg.U = expr(U);
        CHECK(charge_convergence(cfg).exact);
    }
}

TEST_CASE("configuration errors") {
    const Entries ok = {{"u0", "sin(2*pi*x)"}, {"U", "1"}};
    CHECK_NOTHROW(parse_config(ok));
    auto with = [&](std::string k, std::string v) {
        Entries e = ok;
        e.emplace_back(std::move(k), std::move(v));
        return e;
    };
    CHECK(kind_of(with("N", "4")) == ErrorKind::Input);
    CHECK(kind_of(with("N", "12.5")) == ErrorKind::Input);
    CHECK(kind_of(with("cfl", "1.5")) == ErrorKind::Input);
    CHECK(kind_of(with("steps", "1")) == ErrorKind::Input);
    CHECK(kind_of(with("L", "-1")) == ErrorKind::Input);
    CHECK(kind_of(with("dt", "0.1")) == ErrorKind::Input);
    CHECK(kind_of({{"U", "1"}}) == ErrorKind::Input);
    CHECK(kind_of({{"u0", "x"}, {"U", "1"}, {"mu", "log(0 - 1)"}}) == ErrorKind::Input);
    CHECK_THROWS_AS(read_config_file(corpus("missing.cfg")), Error);
}

TEST_CASE("exponential growth aborts as unstable") {
    const auto cfg = parse_config({{"N", "32"}, {"steps", "256"}, {"mu", "10000"}, {"u0", "1 + sin(2*pi*x)"},
                                   {"U", "1"}});
    try {
        simulate_leapfrog(cfg);
        FAIL("expected abort");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Unknown);
        CHECK(std::string(e.what()).find("1e6") != std::string::npos);
    }
}
