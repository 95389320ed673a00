#include "pdham/sysdef/render.hpp"

#include <cctype>
#include <sstream>

#include "json.hpp"

namespace pdham::sysdef {

namespace {

using nlohmann::json;

const std::string& B(const Chart& c, int i) { return c.base[static_cast<std::size_t>(i)]; }
const std::string& F(const Chart& c, int a) { return c.fiber[static_cast<std::size_t>(a)]; }

std::string paren(const std::string& s) { return "\\left(" + s + "\\right)"; }

// "c X" with the sign pulled out of single-term coefficients.
void latex_term(std::string& out, const Expr& c, const std::string& basis) {
    std::string s = c.latex();
    const bool single = c.is_polynomial() && c.num().size() == 1;
    bool neg = false;
    if (single && !s.empty() && s[0] == '-') {
        neg = true;
        s = s.substr(1);
    }
    if (!single) s = paren(s);
    if (s == "1") s.clear();
    if (out.empty()) {
        out = (neg ? "-" : "") + s + (s.empty() ? "" : " ") + basis;
    } else {
        out += (neg ? " - " : " + ") + s + (s.empty() ? "" : " ") + basis;
    }
}

std::string dy(const Chart& c, int a) { return "d" + latex_symbol(F(c, a)); }
std::string hyper(const Chart& c, int i) { return "d^{n-1}x_{" + latex_symbol(B(c, i)) + "}"; }

}  // namespace

std::string latex_symbol(const std::string& name) {
    std::size_t k = name.size();
    while (k > 0 && std::isdigit(static_cast<unsigned char>(name[k - 1])) != 0) --k;
    if (k == 0 || k == name.size()) return name;
    return name.substr(0, k) + "_{" + name.substr(k) + "}";
}

std::string render(const Form0& f, Format fmt) {
    const Chart& c = *f.chart;
    if (fmt == Format::Json) {
        json j = json::object();
        for (int i = 0; i < c.n(); ++i) j["f"][B(c, i)] = f.f[static_cast<std::size_t>(i)].str();
        return j.dump(2);
    }
    std::string out;
    for (int i = 0; i < c.n(); ++i) {
        const Expr& e = f.f[static_cast<std::size_t>(i)];
        if (e.is_zero()) continue;
        if (fmt == Format::Text) {
            out += "f[" + B(c, i) + "] = " + e.str() + "\n";
        } else {
            latex_term(out, e, hyper(c, i));
        }
    }
    if (out.empty()) return "0";
    if (fmt == Format::Text) out.pop_back();
    return out;
}

std::string render(const Form1& t, Format fmt) {
    const Chart& c = *t.chart;
    if (fmt == Format::Json) {
        json j = json::object();
        for (int i = 0; i < c.n(); ++i)
            for (int a = 0; a < c.m(); ++a)
                j["th"][B(c, i)][F(c, a)] = t.th[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)].str();
        j["h"] = t.h.str();
        return j.dump(2);
    }
    std::string out;
    for (int i = 0; i < c.n(); ++i) {
        for (int a = 0; a < c.m(); ++a) {
            const Expr& e = t.th[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
            if (e.is_zero()) continue;
            if (fmt == Format::Text) {
                out += "th[" + B(c, i) + "; " + F(c, a) + "] = " + e.str() + "\n";
            } else {
                latex_term(out, e, dy(c, a) + " " + hyper(c, i));
            }
        }
    }
    if (!t.h.is_zero()) {
        if (fmt == Format::Text) {
            out += "h = " + t.h.str() + "\n";
        } else {
            latex_term(out, -t.h, "d^n x");
        }
    }
    if (out.empty()) return "0";
    if (fmt == Format::Text) out.pop_back();
    return out;
}

std::string render(const Form2& w, Format fmt) {
    const Chart& c = *w.chart();
    if (fmt == Format::Json) {
        json j = json::object();
        j["w"] = json::object();
        for (int i = 0; i < c.n(); ++i)
            for (int a = 0; a < c.m(); ++a)
                for (int b = a + 1; b < c.m(); ++b) {
                    const Expr e = w.w(i, a, b);
                    if (!e.is_zero()) j["w"][B(c, i)][F(c, a) + "," + F(c, b)] = e.str();
                }
        for (int a = 0; a < c.m(); ++a) j["v"][F(c, a)] = w.v(a).str();
        return j.dump(2);
    }
    std::string out;
    for (int i = 0; i < c.n(); ++i) {
        for (int a = 0; a < c.m(); ++a) {
            for (int b = a + 1; b < c.m(); ++b) {
                const Expr e = w.w(i, a, b);
                if (e.is_zero()) continue;
                if (fmt == Format::Text) {
                    out += "w[" + B(c, i) + "; " + F(c, a) + ", " + F(c, b) + "] = " + e.str() + "\n";
                } else {
                    // wedge-monomial coefficient of dy^a dy^b is 2 w^i_{ab}
                    latex_term(out, 2 * e, dy(c, a) + " " + dy(c, b) + " " + hyper(c, i));
                }
            }
        }
    }
    for (int a = 0; a < c.m(); ++a) {
        if (w.v(a).is_zero()) continue;
        if (fmt == Format::Text) {
            out += "v[" + F(c, a) + "] = " + w.v(a).str() + "\n";
        } else {
            latex_term(out, w.v(a), dy(c, a) + " d^n x");
        }
    }
    if (out.empty()) return "0";
    if (fmt == Format::Text) out.pop_back();
    return out;
}

std::string render(const VerticalField& y, Format fmt) {
    const Chart& c = *y.chart;
    if (fmt == Format::Json) {
        json j = json::object();
        for (int a = 0; a < c.m(); ++a) j[F(c, a)] = y.y[static_cast<std::size_t>(a)].str();
        return j.dump(2);
    }
    std::string out;
    for (int a = 0; a < c.m(); ++a) {
        const Expr& e = y.y[static_cast<std::size_t>(a)];
        if (e.is_zero()) continue;
        if (fmt == Format::Text) {
            out += F(c, a) + " = " + e.str() + "\n";
        } else {
            latex_term(out, e, "\\partial_{" + latex_symbol(F(c, a)) + "}");
        }
    }
    if (out.empty()) return "0";
    if (fmt == Format::Text) out.pop_back();
    return out;
}

std::string render(const ConstraintSet& cs, Format fmt) {
    if (fmt == Format::Json) {
        json j = json::array();
        for (const auto& e : cs.eqs) j.push_back(e.str());
        return j.dump();
    }
    if (cs.eqs.empty()) return fmt == Format::Text ? "{}" : "\\emptyset";
    std::string out = fmt == Format::Text ? "{" : "\\{";
    for (std::size_t k = 0; k < cs.eqs.size(); ++k) {
        if (k != 0U) out += "; ";
        out += (fmt == Format::Text ? cs.eqs[k].str() : cs.eqs[k].latex()) + " = 0";
    }
    return out + (fmt == Format::Text ? "}" : "\\}");
}

std::string render(const PDSystem& s, Format fmt) {
    if (fmt == Format::Json) {
        json j = json::array();
        for (std::size_t k = 0; k < s.residuals.size(); ++k) {
            json e;
            e["name"] = k < s.labels.size() ? s.labels[k] : std::to_string(k);
            e["expr"] = s.residuals[k].str();
            j.push_back(e);
        }
        return j.dump(2);
    }
    std::string out;
    for (std::size_t k = 0; k < s.residuals.size(); ++k) {
        if (fmt == Format::Text) {
            out += s.residuals[k].str() + " = 0\n";
        } else {
            out += s.residuals[k].latex() + " = 0 \\\\\n";
        }
    }
    if (out.empty()) return "";
    out.pop_back();
    return out;
}

std::string render_model(const SystemModel& model) {
    const Chart& c = *model.chart;
    std::ostringstream os;
    auto list = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t k = 0; k < v.size(); ++k) s += (k != 0U ? ", " : "") + v[k];
        return s;
    };
    os << "bundle { base: " << list(c.base) << "  fiber: " << list(c.fiber) << " }\n";
    for (const auto& name : c.function_order) os << "declare " << name << "(" << list(c.functions.at(name)) << ")\n";
    for (const auto& name : c.constant_order) {
        os << "const " << name;
        const Symmetry s = c.constants.at(name);
        if (s == Symmetry::Symmetric) os << " symmetric";
        if (s == Symmetry::Skew) os << " skew";
        os << "\n";
    }
    if (!model.relations.empty()) {
        os << "relations {\n";
        for (std::size_t k = 0; k < model.relations.size(); ++k)
            os << "  " << model.relations[k].lhs->str() << " = " << model.relations[k].rhs.str()
               << (k + 1 < model.relations.size() ? ";" : "") << "\n";
        os << "}\n";
    }
    auto indent = [](const std::string& body) {
        if (body == "0") return std::string();
        std::string out = "  ";
        for (char ch : body) {
            out += ch;
            if (ch == '\n') out += "  ";
        }
        return out + "\n";
    };
    for (const auto& name : model.order) {
        if (auto it = model.forms.find(name); it != model.forms.end()) {
            const FormEntry& e = it->second;
            os << "form " << name << " deg " << e.degree << " {\n";
            if (e.f0) os << indent(render(*e.f0, Format::Text));
            if (e.f1) os << indent(render(*e.f1, Format::Text));
            if (e.f2) os << indent(render(*e.f2, Format::Text));
            os << "}\n";
        } else if (auto fi = model.fields.find(name); fi != model.fields.end()) {
            os << "field " << name << " {\n";
            for (int a = 0; a < c.m(); ++a)
                os << "  " << c.fiber[static_cast<std::size_t>(a)] << " = "
                   << fi->second.y[static_cast<std::size_t>(a)].str() << "\n";
            os << "}\n";
        } else if (auto cu = model.currents.find(name); cu != model.currents.end()) {
            os << "current " << name << " {\n";
            for (int i = 0; i < c.n(); ++i)
                os << "  " << c.base[static_cast<std::size_t>(i)] << " = "
                   << cu->second.f[static_cast<std::size_t>(i)].str() << "\n";
            os << "}\n";
        } else if (auto mp = model.maps.find(name); mp != model.maps.end()) {
            os << "map " << name << " -> " << mp->second.target << " {\n";
            for (const auto& [k, e] : mp->second.assignments) os << "  " << k << " = " << e.str() << "\n";
            os << "}\n";
        }
    }
    if (model.constraints) {
        os << "constraints {\n";
        const auto& eqs = model.constraints->eqs;
        for (std::size_t k = 0; k < eqs.size(); ++k)
            os << "  " << eqs[k].str() << (k + 1 < eqs.size() ? ";" : "") << "\n";
        os << "}\n";
    }
    if (!model.simulate.empty()) {
        os << "[simulate]\n";
        for (const auto& [k, v] : model.simulate) os << k << " = " << v << "\n";
    }
    return os.str();
}

}  // namespace pdham::sysdef
