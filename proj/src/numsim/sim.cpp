#include "pdham/numsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include "pdham/error.hpp"
#include "pdham/sym/compiled.hpp"
#include "pdham/sym/zero_test.hpp"
#include "pdham/sysdef/parser.hpp"

namespace pdham::numsim {

namespace {

const std::vector<std::string> kVars = {"t", "x", "L", "mu", "pi"};

const sysdef::Chart& sim_chart() {
    static const sysdef::Chart c = [] {
        sysdef::Chart ch;
        ch.base = {"t", "x"};
        ch.fiber = {"u"};
        return ch;
    }();
    return c;
}

double number(const Expr& e, double L, double mu, const std::string& key) {
    try {
        const double vals[5] = {0.0, 0.0, L, mu, std::numbers::pi};
        const double v = sym::CompiledExpr(e, kVars)(vals);
        if (!std::isfinite(v)) throw input_error(key + " is not finite");
        return v;
    } catch (const std::domain_error& err) {
        throw input_error(key + ": " + err.what());
    }
}

int integer(const Expr& e, const std::string& key) {
    const auto v = e.constant_value();
    if (!v || v->get_den() != 1) throw input_error(key + " must be an integer");
    return static_cast<int>(v->get_num().get_si());
}

void check_finite(const std::vector<double>& u, double bound, int step) {
    for (double v : u) {
        if (!std::isfinite(v)) throw unknown_error("non-finite value at step " + std::to_string(step));
        if (std::fabs(v) > bound)
            throw unknown_error("amplitude exceeds 1e6 times the initial amplitude at step " + std::to_string(step));
    }
}

}  // namespace

SimConfig parse_config(const std::vector<std::pair<std::string, std::string>>& entries) {
    std::map<std::string, Expr> raw;
    for (const auto& [k, text] : entries) {
        static const std::set<std::string> keys = {"L", "N", "cfl", "steps", "mu", "u0", "v0", "U", "exact"};
        if (keys.count(k) == 0U) throw input_error("unknown simulation key '" + k + "'");
        raw[k] = sysdef::parse_expression(text, sim_chart(), true);
    }
    for (const char* k : {"u0", "U"})
        if (raw.count(k) == 0U) throw input_error(std::string("missing simulation key '") + k + "'");
    SimConfig c;
    if (raw.count("L")) c.L_expr = raw["L"];
    c.L = number(c.L_expr, 0.0, 0.0, "L");
    if (raw.count("mu")) c.mu_expr = raw["mu"];
    c.mu = number(c.mu_expr, c.L, 0.0, "mu");
    if (raw.count("N")) c.N = integer(raw["N"], "N");
    if (raw.count("steps")) c.steps = integer(raw["steps"], "steps");
    if (raw.count("cfl")) c.cfl = number(raw["cfl"], c.L, c.mu, "cfl");
    c.u0 = raw["u0"];
    c.v0 = raw.count("v0") ? raw["v0"] : Expr();
    c.U = raw["U"];
    if (raw.count("exact")) {
        c.exact = raw["exact"];
        c.has_exact = true;
    }
    validate(c);
    return c;
}

SimConfig read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot read " + path);
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw input_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return parse_config(entries);
}

void validate(const SimConfig& c) {
    if (c.N < 8) throw input_error("N must be at least 8");
    if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw input_error("cfl must lie in (0, 1]");
    if (c.steps < 2) throw input_error("steps must be at least 2");
    if (!(c.L > 0.0)) throw input_error("L must be positive");
}

std::string check_symmetry_profile(const SimConfig& cfg) {
    const std::map<std::string, Expr> sub{{"L", cfg.L_expr}, {"mu", cfg.mu_expr}};
    const Expr U = sym::substitute(cfg.U, sub);
    const Expr r = -sym::diff(U, {"t", "t"}) + sym::diff(U, {"x", "x"}) + cfg.mu_expr * U;
    return sym::is_zero(sym::substitute(r, sub)).str();
}

std::vector<std::vector<double>> evolve(const std::vector<double>& prev, const std::vector<double>& cur, int steps,
                                        double dx, double dt, double mu, KernelKind kernel) {
    const std::size_t n = cur.size();
    const double r = dt / dx;
    const double r2 = r * r;
    const double c = dt * dt * mu;
    double amp = 0.0;
    for (double v : cur) amp = std::max(amp, std::fabs(v));
    for (double v : prev) amp = std::max(amp, std::fabs(v));
    const double bound = 1e6 * std::max(amp, 1e-300);
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(steps));
    const std::vector<double>* p = &prev;
    const std::vector<double>* q = &cur;
    for (int s = 0; s < steps; ++s) {
        std::vector<double> next(n);
        leapfrog_step(kernel, p->data(), q->data(), next.data(), n, r2, c);
        check_finite(next, bound, s + 1);
        out.push_back(std::move(next));
        p = q;
        q = &out.back();
    }
    return out;
}

Trajectory simulate_leapfrog(const SimConfig& cfg, KernelKind kernel) {
    validate(cfg);
    const std::size_t n = static_cast<std::size_t>(cfg.N);
    Trajectory tr;
    tr.dx = cfg.L / cfg.N;
    tr.dt = cfg.cfl * tr.dx;
    const sym::CompiledExpr u0(cfg.u0, kVars), v0(cfg.v0, kVars);
    std::vector<double> a(n), b(n), vel(n);
    double vals[5] = {0.0, 0.0, cfg.L, cfg.mu, std::numbers::pi};
    for (std::size_t j = 0; j < n; ++j) {
        vals[1] = static_cast<double>(j) * tr.dx;
        a[j] = u0(vals);
        vel[j] = v0(vals);
    }
    // u^1 = u^0 + dt v0 + dt^2/2 (D2 u^0 + mu u^0)
    const double dx2 = tr.dx * tr.dx;
    for (std::size_t j = 0; j < n; ++j) {
        const double lap = (a[(j + 1) % n] + a[(j + n - 1) % n] - 2.0 * a[j]) / dx2;
        b[j] = a[j] + tr.dt * vel[j] + 0.5 * tr.dt * tr.dt * (lap + cfg.mu * a[j]);
    }
    double amp = 0.0;
    for (std::size_t j = 0; j < n; ++j) amp = std::max({amp, std::fabs(a[j]), std::fabs(b[j])});
    tr.u.reserve(static_cast<std::size_t>(cfg.steps) + 1);
    tr.u.push_back(a);
    tr.u.push_back(b);
    if (amp == 0.0) {
        // zero data stays zero
        for (int s = 2; s <= cfg.steps; ++s) tr.u.emplace_back(n, 0.0);
        return tr;
    }
    auto rest = evolve(a, b, cfg.steps - 1, tr.dx, tr.dt, cfg.mu, kernel);
    for (auto& slice : rest) tr.u.push_back(std::move(slice));
    return tr;
}

std::vector<double> charge_series(const Trajectory& tr, const SimConfig& cfg, TimeDifference td) {
    const sym::CompiledExpr U(cfg.U, kVars), Ut(sym::diff(cfg.U, "t"), kVars);
    const std::size_t S = tr.u.size() - 1;
    const std::size_t n = tr.u[0].size();
    std::vector<double> q(S + 1);
    double vals[5] = {0.0, 0.0, cfg.L, cfg.mu, std::numbers::pi};
    for (std::size_t s = 0; s <= S; ++s) {
        vals[0] = static_cast<double>(s) * tr.dt;
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double ut;
            if (td == TimeDifference::Forward) {
                ut = s < S ? (tr.u[s + 1][j] - tr.u[s][j]) / tr.dt : (tr.u[s][j] - tr.u[s - 1][j]) / tr.dt;
            } else if (s == 0) {
                ut = (-3.0 * tr.u[0][j] + 4.0 * tr.u[1][j] - tr.u[2][j]) / (2.0 * tr.dt);
            } else if (s == S) {
                ut = (3.0 * tr.u[S][j] - 4.0 * tr.u[S - 1][j] + tr.u[S - 2][j]) / (2.0 * tr.dt);
            } else {
                ut = (tr.u[s + 1][j] - tr.u[s - 1][j]) / (2.0 * tr.dt);
            }
            vals[1] = static_cast<double>(j) * tr.dx;
            sum += -(tr.u[s][j] * Ut(vals) - ut * U(vals));
        }
        q[s] = tr.dx * sum;
    }
    return q;
}

double relative_drift(const std::vector<double>& q) {
    double d = 0.0;
    for (double v : q) d = std::max(d, std::fabs(v - q[0]));
    return d / std::max(std::fabs(q[0]), 1.0);
}

double max_error(const Trajectory& tr, const SimConfig& cfg) {
    if (!cfg.has_exact) throw input_error("no exact solution given");
    const sym::CompiledExpr ex(cfg.exact, kVars);
    double vals[5] = {0.0, 0.0, cfg.L, cfg.mu, std::numbers::pi};
    double err = 0.0;
    for (std::size_t s = 0; s < tr.u.size(); ++s) {
        vals[0] = static_cast<double>(s) * tr.dt;
        for (std::size_t j = 0; j < tr.u[s].size(); ++j) {
            vals[1] = static_cast<double>(j) * tr.dx;
            err = std::max(err, std::fabs(tr.u[s][j] - ex(vals)));
        }
    }
    return err;
}

Convergence compare(double coarse, double fine, double scale) {
    Convergence c;
    c.coarse = coarse;
    c.fine = fine;
    const double floor = 1e-12 * std::max(scale, 1.0);
    if (coarse < floor && fine < floor) {
        c.exact = true;
        c.pass = true;
        return c;
    }
    c.factor = fine > 0 ? coarse / fine : INFINITY;
    c.order = std::log2(c.factor);
    c.pass = c.order >= 1.5 && c.order <= 2.5;
    return c;
}

std::string Convergence::verdict() const {
    if (exact) return "exact (pass)";
    std::ostringstream s;
    s << "order " << order << (pass ? " (pass)" : " (fail)");
    return s.str();
}

namespace {

SimConfig refined(const SimConfig& cfg) {
    SimConfig f = cfg;
    f.N *= 2;
    f.steps *= 2;
    return f;
}

}  // namespace

Convergence charge_convergence(const SimConfig& cfg, TimeDifference td, KernelKind kernel) {
    const SimConfig fine = refined(cfg);
    const double a = relative_drift(charge_series(simulate_leapfrog(cfg, kernel), cfg, td));
    const double b = relative_drift(charge_series(simulate_leapfrog(fine, kernel), fine, td));
    return compare(a, b);
}

Convergence error_convergence(const SimConfig& cfg, KernelKind kernel) {
    const SimConfig fine = refined(cfg);
    return compare(max_error(simulate_leapfrog(cfg, kernel), cfg), max_error(simulate_leapfrog(fine, kernel), fine));
}

double estimate_period(const Trajectory& tr, std::size_t j) {
    std::vector<double> crossings;
    for (std::size_t s = 0; s + 1 < tr.u.size(); ++s) {
        const double a = tr.u[s][j], b = tr.u[s + 1][j];
        if (a < 0.0 && b >= 0.0) crossings.push_back((static_cast<double>(s) + a / (a - b)) * tr.dt);
    }
    if (crossings.size() < 2) throw input_error("fewer than two zero crossings");
    return (crossings.back() - crossings.front()) / static_cast<double>(crossings.size() - 1);
}

}  // namespace pdham::numsim
