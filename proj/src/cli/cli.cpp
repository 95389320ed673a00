#include "pdham/cli/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "pdham/affcalc/calculus.hpp"
#include "pdham/error.hpp"
#include "pdham/ham/hamilton.hpp"
#include "pdham/noether/noether.hpp"
#include "pdham/numsim/sim.hpp"
#include "pdham/reduce/reduce.hpp"
#include "pdham/sysdef/parser.hpp"
#include "report.hpp"

namespace pdham::cli {

namespace {

using sysdef::Format;
using sysdef::SystemModel;
using sym::Expr;

struct Options {
    std::string format = "text";
    std::uint64_t seed = 0;
    std::string file;
    std::string form, field = "Y", current = "f", relations = "on";
    std::vector<std::string> pairs, unknowns, split;
    bool square = false;
    int max_steps = 16;
    std::string map, target, target_form;
    std::string config, csv, kernel = "auto";
};

struct Context {
    Options opt;
    Format fmt = Format::Text;
    sym::ZeroTestConfig zt;
};

SystemModel load(const std::string& path) {
    auto r = sysdef::parse_file(path);
    if (!r.ok()) {
        std::string msg = path + ":";
        for (const auto& d : r.diagnostics) msg += "\n  " + d.str();
        throw input_error(msg);
    }
    return *r.model;
}

const sysdef::Form2& pick_form2(const SystemModel& m, const std::string& name) {
    return name.empty() ? m.main_form2() : m.form2(name);
}

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

std::string status_of(noether::Status s) { return noether::status_name(s); }

std::string worst(const std::vector<std::string>& statuses) {
    std::string out = "verified";
    for (const auto& s : statuses) {
        if (s == "falsified") return s;
        if (s == "unknown") out = s;
    }
    return out;
}

std::string status_of(const sym::ZeroVerdict& v) {
    return v.zero() ? "verified" : v.nonzero() ? "falsified" : "unknown";
}

void residual_items(Report& rep, const std::vector<affcalc::Residual>& rs, const Context& cx,
                    const std::string& prefix = "") {
    std::vector<std::string> st;
    for (const auto& r : rs) {
        rep.add(prefix + r.name, r.expr, r.verdict.str(), cx.fmt);
        st.push_back(status_of(r.verdict));
    }
    rep.status = worst(st);
}

Report cmd_check(const Context& cx) {
    Report rep{"check"};
    const auto m = load(cx.opt.file);
    const auto& w = pick_form2(m, cx.opt.form);
    const auto cl = affcalc::closedness_residuals(w, cx.zt);
    residual_items(rep, cl.residuals, cx);
    if (!cl.closed()) {
        rep.notes.push_back(cl.undecided() ? "closedness undecided" : "not closed: not a PD-prehamiltonian system");
        return rep;
    }
    const auto h = ham::is_hamiltonian(w, cx.zt);
    if (h.kind == ham::HamiltonianKind::Hamiltonian) {
        rep.add("class", h.kernel.certificate, "PD-hamiltonian", cx.fmt);
        rep.notes.push_back("PD-hamiltonian (certificate " + h.kernel.certificate.str() + " ≠ 0)");
    } else {
        rep.add("class", std::to_string(h.kernel.basis.size()), "PD-prehamiltonian");
        rep.notes.push_back("PD-prehamiltonian: kernel of the linear part has dimension " +
                            std::to_string(h.kernel.basis.size()) + " where " + h.kernel.certificate.str() + " ≠ 0");
        for (std::size_t k = 0; k < h.kernel.basis.size(); ++k) {
            const auto& y = h.kernel.basis[k];
            for (int a = 0; a < y.chart->m(); ++a)
                if (!y.y[a].is_zero())
                    rep.add("K" + std::to_string(k + 1) + "[" + y.chart->fiber[a] + "]", y.y[a], "", cx.fmt);
        }
    }
    return rep;
}

Report cmd_equations(const Context& cx) {
    Report rep{"equations"};
    const auto m = load(cx.opt.file);
    const auto sys = ham::hamilton_residuals(pick_form2(m, cx.opt.form));
    for (std::size_t b = 0; b < sys.residuals.size(); ++b)
        rep.add("R[" + sys.labels[b] + "]", sys.residuals[b], "= 0", cx.fmt);
    rep.notes.push_back("D[i][a] stands for the derivative of fiber coordinate a along base coordinate i");
    return rep;
}

std::vector<sym::Rule> relations(const Context& cx, const SystemModel& m) {
    if (cx.opt.relations == "off") return {};
    return m.relations;
}

const sysdef::VerticalField& field(const SystemModel& m, const std::string& name) {
    const auto it = m.fields.find(name);
    if (it == m.fields.end()) throw input_error("no field named '" + name + "'");
    return it->second;
}

const sysdef::Form0& current(const SystemModel& m, const std::string& name) { return m.form0(name); }

Report cmd_noether(const Context& cx) {
    Report rep{"noether"};
    const auto m = load(cx.opt.file);
    const auto v = noether::is_noether_pair(pick_form2(m, cx.opt.form), field(m, cx.opt.field),
                                            current(m, cx.opt.current), relations(cx, m), cx.zt);
    for (const auto& r : v.components) rep.add(r.name, r.expr, r.verdict.str(), cx.fmt);
    rep.status = status_of(v.status);
    if (v.status == noether::Status::Falsified) rep.notes.push_back("i_Y omega - delta f has a nonzero component");
    return rep;
}

noether::Pair pair(const SystemModel& m, const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw input_error("--pair expects FIELD:CURRENT, got '" + spec + "'");
    return {field(m, spec.substr(0, colon)), current(m, spec.substr(colon + 1))};
}

Report cmd_bracket(const Context& cx) {
    Report rep{"bracket"};
    if (cx.opt.pairs.size() != 2) throw input_error("bracket needs exactly two --pair options");
    const auto m = load(cx.opt.file);
    const auto rel = relations(cx, m);
    const auto b = noether::poisson_bracket(pick_form2(m, cx.opt.form), pair(m, cx.opt.pairs[0]),
                                            pair(m, cx.opt.pairs[1]), rel, cx.zt);
    for (int i = 0; i < b.chart->n(); ++i) rep.add("{f1,f2}^" + b.chart->base[i], b.f[i], "", cx.fmt);
    const auto triv = noether::is_trivial_current(b, rel, cx.zt);
    rep.add("trivial", "", status_of(triv.status));
    if (triv.status == noether::Status::Verified)
        rep.notes.push_back("the bracket is a trivial current: base-only and divergence free");
    return rep;
}

std::vector<std::string> split_list(const std::vector<std::string>& v) {
    std::vector<std::string> out;
    for (const auto& s : v) {
        std::string cur;
        for (char c : s + ",") {
            if (c == ',' || c == ' ') {
                if (!cur.empty()) out.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
    }
    return out;
}

Report cmd_determining(const Context& cx) {
    Report rep{"determining"};
    const auto m = load(cx.opt.file);
    for (const auto& u : split_list(cx.opt.unknowns))
        if (m.chart->functions.count(u) == 0U) throw input_error("unknown '" + u + "' is not a declared function");
    noether::DeterminingOptions o;
    o.split = split_list(cx.opt.split);
    for (const auto& s : o.split)
        if (!m.chart->is_coordinate(s)) throw input_error("cannot split over '" + s + "': not a coordinate");
    o.square = cx.opt.square;
    o.relations = relations(cx, m);
    const auto eqs = noether::determining_system(pick_form2(m, cx.opt.form), field(m, cx.opt.field),
                                                 current(m, cx.opt.current), o);
    for (const auto& e : eqs) rep.add(e.name, e.expr, "= 0", cx.fmt);
    if (eqs.empty()) rep.notes.push_back("the ansatz satisfies the determining system identically");
    return rep;
}

Report cmd_constrain(const Context& cx) {
    Report rep{"constrain"};
    const auto m = load(cx.opt.file);
    if (cx.opt.max_steps < 1) throw input_error("--max-steps must be positive");
    const auto run = ham::constraint_algorithm(pick_form2(m, cx.opt.form), cx.opt.max_steps, cx.zt);
    for (std::size_t k = 0; k < run.stages.size(); ++k) {
        const auto& eqs = run.stages[k].eqs;
        const std::string name = "P(" + std::to_string(k) + ")";
        if (eqs.empty()) rep.add(name, "", "no constraints");
        for (std::size_t j = 0; j < eqs.size(); ++j)
            rep.add(name + "[" + std::to_string(j + 1) + "]", eqs[j], "= 0", cx.fmt);
    }
    if (run.empty) {
        rep.notes.push_back("empty: the final constraint set is inconsistent, no connection exists anywhere");
    } else if (run.terminated) {
        rep.notes.push_back("fixed point at step " + std::to_string(run.stages.size()));
    } else {
        rep.status = "unknown";
        rep.notes.push_back("no fixed point within " + std::to_string(cx.opt.max_steps) + " steps");
    }
    return rep;
}

void form1_items(Report& rep, const sysdef::Form1& th, const Context& cx) {
    const auto& c = *th.chart;
    for (int i = 0; i < c.n(); ++i)
        for (int a = 0; a < c.m(); ++a)
            if (!th.th[i][a].is_zero()) rep.add("theta[" + c.base[i] + "; " + c.fiber[a] + "]", th.th[i][a], "", cx.fmt);
    rep.add("H", th.h, "", cx.fmt);
}

Report cmd_potential(const Context& cx) {
    Report rep{"potential"};
    const auto m = load(cx.opt.file);
    const auto& w = pick_form2(m, cx.opt.form);
    const auto th = affcalc::potential(w, cx.zt);
    form1_items(rep, th, cx);
    const auto back = affcalc::delta1(th);
    bool same = true;
    for (int a = 0; a < w.chart()->m(); ++a) {
        same = same && sym::is_zero(back.v(a) - w.v(a), cx.zt).zero();
        for (int b = 0; b < w.chart()->m(); ++b)
            for (int i = 0; i < w.chart()->n(); ++i) same = same && sym::is_zero(back.w(i, a, b) - w.w(i, a, b), cx.zt).zero();
    }
    if (!same) throw std::logic_error("potential does not reproduce the form");
    rep.notes.push_back("delta1(theta) = omega checked");
    return rep;
}

sysdef::Form1 theta_of(const SystemModel& m, const std::string& name, Report& rep, const Context& cx) {
    std::string n = name;
    if (n.empty()) {
        for (const auto& [k, e] : m.forms)
            if (e.degree == 1) {
                if (!n.empty()) throw input_error("several degree-1 forms; choose one with --form");
                n = k;
            }
        if (n.empty()) n = m.main_form2_name();
    }
    const auto it = m.forms.find(n);
    if (it == m.forms.end()) throw input_error("no form named '" + n + "'");
    if (it->second.degree == 1) return *it->second.f1;
    if (it->second.degree == 2) {
        rep.notes.push_back("theta is the homotopy potential of " + n);
        return affcalc::potential(*it->second.f2, cx.zt);
    }
    throw input_error("form '" + n + "' has degree 0");
}

Report cmd_lagrangian(const Context& cx) {
    Report rep{"lagrangian"};
    const auto m = load(cx.opt.file);
    rep.add("L", ham::lagrangian_of(theta_of(m, cx.opt.form, rep, cx)), "", cx.fmt);
    return rep;
}

Report cmd_euler_lagrange(const Context& cx) {
    Report rep{"euler-lagrange"};
    const auto m = load(cx.opt.file);
    const auto th = theta_of(m, cx.opt.form, rep, cx);
    const auto el = ham::euler_lagrange(ham::lagrangian_of(th), th.chart);
    for (std::size_t b = 0; b < el.residuals.size(); ++b)
        rep.add("EL[" + el.labels[b] + "]", el.residuals[b], "= 0", cx.fmt);
    rep.notes.push_back("EL = -R for the PD-Hamilton residuals R of delta1(theta)");
    return rep;
}

Report cmd_reduce(const Context& cx) {
    Report rep{"reduce"};
    if (cx.opt.map.empty() || cx.opt.target.empty()) throw input_error("reduce needs --map and --target");
    const auto m = load(cx.opt.file);
    const auto t = load(cx.opt.target);
    const auto it = m.maps.find(cx.opt.map);
    if (it == m.maps.end()) throw input_error("no map named '" + cx.opt.map + "'");
    const auto p = sysdef::bind_map(it->second, m.chart, t.chart);
    const auto r = reduce::verify_reduction(pick_form2(m, cx.opt.form), p, pick_form2(t, cx.opt.target_form), cx.zt);
    const auto group = [&](const char* prefix, const noether::Verdict& v) {
        for (const auto& c : v.components) rep.add(std::string(prefix) + " " + c.name, c.expr, c.verdict.str(), cx.fmt);
        rep.notes.push_back(std::string(prefix) + ": " + noether::status_name(v.status));
    };
    group("pullback", r.pullback);
    group("vertical", r.vertical);
    group("nondegenerate", r.nondegenerate);
    rep.status = status_of(r.status());
    return rep;
}

numsim::KernelKind kernel_kind(const std::string& s) {
    if (s == "scalar") return numsim::KernelKind::Scalar;
    if (s == "avx2") {
        if (!numsim::avx2_available()) throw unsupported_error("AVX2 kernel requested but not available");
        return numsim::KernelKind::Avx2;
    }
    return numsim::KernelKind::Auto;
}

Report cmd_simulate(const Context& cx, std::ostream& out) {
    Report rep{"simulate"};
    numsim::SimConfig cfg;
    if (!cx.opt.config.empty()) {
        cfg = numsim::read_config_file(cx.opt.config);
    } else {
        const auto m = load(cx.opt.file);
        if (m.simulate.empty()) throw input_error(cx.opt.file + " has no [simulate] section; pass --config");
        cfg = numsim::parse_config(m.simulate);
    }
    const auto kernel = kernel_kind(cx.opt.kernel);
    const std::string profile = numsim::check_symmetry_profile(cfg);
    rep.add("U", cfg.U, "profile residual " + profile, cx.fmt);

    const auto tr = numsim::simulate_leapfrog(cfg, kernel);
    const auto q = numsim::charge_series(tr, cfg);
    if (!cx.opt.csv.empty()) {
        std::ofstream file;
        if (cx.opt.csv != "-") {
            file.open(cx.opt.csv);
            if (!file) throw input_error("cannot write " + cx.opt.csv);
        }
        std::ostream& os = cx.opt.csv == "-" ? out : file;
        os << "t,Q\n";
        char buf[64];
        for (std::size_t s = 0; s < q.size(); ++s) {
            std::snprintf(buf, sizeof buf, "%.10g,%.17g\n", static_cast<double>(s) * tr.dt, q[s]);
            os << buf;
        }
    }
    const auto conv = numsim::charge_convergence(cfg, numsim::TimeDifference::Centered, kernel);
    rep.add("drift", number(conv.coarse), "N = " + std::to_string(cfg.N));
    rep.add("drift_refined", number(conv.fine), "N = " + std::to_string(2 * cfg.N));
    rep.add("factor", conv.exact ? "" : number(conv.factor), "drift / drift_refined");
    rep.add("order", conv.exact ? "" : number(conv.order), conv.verdict());
    std::vector<std::string> st{conv.pass ? "verified" : "falsified"};
    if (cfg.has_exact) {
        const auto e = numsim::error_convergence(cfg, kernel);
        rep.add("error", number(e.coarse), "N = " + std::to_string(cfg.N));
        rep.add("error_order", e.exact ? "" : number(e.order), e.verdict());
        st.push_back(e.pass ? "verified" : "falsified");
    }
    if (profile.rfind("zero", 0) != 0) {
        st.push_back("falsified");
        rep.notes.push_back("U does not solve the field equation; the charge is not conserved");
    }
    rep.notes.push_back("kernel " + std::string(numsim::resolve(kernel) == numsim::KernelKind::Avx2 ? "avx2" : "scalar"));
    rep.status = worst(st);
    return rep;
}

int code_of(ErrorKind k) { return static_cast<int>(k); }

std::string status_of_error(ErrorKind k) {
    switch (k) {
        case ErrorKind::Falsified: return "falsified";
        case ErrorKind::Unknown: return "unknown";
        default: return "error";
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Context cx;
    Options& o = cx.opt;
    CLI::App app{"Verification toolkit for PD-Hamiltonian field theories", "pdham"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "latex", "json"}));
    app.add_option("--seed", o.seed, "Seed of the probabilistic zero test");

    std::map<std::string, std::function<Report()>> commands;
    auto sub = [&](const std::string& name, const std::string& help, std::function<Report()> fn) {
        auto* s = app.add_subcommand(name, help);
        s->add_option("FILE", o.file, "System file (.pdh)")->required();
        commands[name] = std::move(fn);
        return s;
    };
    auto form_opt = [&](CLI::App* s) { s->add_option("--form", o.form, "Name of the form"); };
    auto rel_opt = [&](CLI::App* s) {
        s->add_option("--relations", o.relations, "Use the declared relations")->check(CLI::IsMember({"on", "off"}));
    };

    form_opt(sub("check", "Closedness and classification", [&] { return cmd_check(cx); }));
    form_opt(sub("equations", "PD-Hamilton equations", [&] { return cmd_equations(cx); }));
    {
        auto* s = sub("noether", "Verify a symmetry/current pair", [&] { return cmd_noether(cx); });
        s->add_option("--field", o.field)->required();
        s->add_option("--current", o.current)->required();
        form_opt(s);
        rel_opt(s);
    }
    {
        auto* s = sub("bracket", "Poisson bracket of two currents", [&] { return cmd_bracket(cx); });
        s->add_option("--pair", o.pairs, "FIELD:CURRENT")->required();
        form_opt(s);
        rel_opt(s);
    }
    {
        auto* s = sub("determining", "Noether determining equations", [&] { return cmd_determining(cx); });
        s->add_option("--field", o.field);
        s->add_option("--current", o.current);
        s->add_option("--unknowns", o.unknowns, "Declared functions of the ansatz");
        s->add_option("--split", o.split, "Coordinates to split over");
        s->add_flag("--square", o.square, "Clear a square root before splitting");
        form_opt(s);
        rel_opt(s);
    }
    {
        auto* s = sub("constrain", "Constraint algorithm", [&] { return cmd_constrain(cx); });
        s->add_option("--max-steps", o.max_steps);
        form_opt(s);
    }
    form_opt(sub("potential", "Potential of a closed form", [&] { return cmd_potential(cx); }));
    form_opt(sub("lagrangian", "Lagrangian of a potential", [&] { return cmd_lagrangian(cx); }));
    form_opt(sub("euler-lagrange", "Euler-Lagrange equations", [&] { return cmd_euler_lagrange(cx); }));
    {
        auto* s = sub("reduce", "Verify a gauge reduction", [&] { return cmd_reduce(cx); });
        s->add_option("--map", o.map)->required();
        s->add_option("--target", o.target, "Reduced system file")->required();
        s->add_option("--target-form", o.target_form);
        form_opt(s);
    }
    {
        auto* s = sub("simulate", "Leapfrog run and charge drift", [&] { return cmd_simulate(cx, out); });
        s->add_option("--config", o.config, "Simulation config file");
        s->add_option("--csv", o.csv, "Write the series t,Q to a file, '-' for stdout");
        s->add_option("--kernel", o.kernel)->check(CLI::IsMember({"auto", "scalar", "avx2"}));
    }

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return code_of(ErrorKind::Input);
    }

    cx.fmt = o.format == "json" ? Format::Json : o.format == "latex" ? Format::Latex : Format::Text;
    cx.zt.seed = o.seed;
    const std::string name = app.get_subcommands().front()->get_name();
    Report rep{name};
    int code = 0;
    try {
        rep = commands.at(name)();
        code = rep.exit_code();
    } catch (const Error& e) {
        rep = Report(name, status_of_error(e.kind()), e.what());
        code = code_of(e.kind());
        err << "error: " << e.what() << "\n";
    } catch (const std::out_of_range& e) {
        rep = Report(name, "error", e.what());
        code = code_of(ErrorKind::Input);
        err << "error: " << e.what() << "\n";
    }
    if (!(name == "simulate" && o.csv == "-" && cx.fmt == Format::Text)) rep.write(out, cx.fmt);
    return code;
}

}  // namespace pdham::cli
