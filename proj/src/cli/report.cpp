#include "report.hpp"

#include <json.hpp>

namespace pdham::cli {

namespace {

std::string tex_text(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '_' || c == '&' || c == '%' || c == '#' || c == '{' || c == '}') out += '\\';
        if (c == '^') {
            out += "\\^{}";
            continue;
        }
        out += c;
    }
    return out;
}

}  // namespace

void Report::add(std::string name, const sym::Expr& e, std::string verdict, sysdef::Format fmt) {
    add(std::move(name), fmt == sysdef::Format::Latex ? e.latex() : e.str(), std::move(verdict));
}

int Report::exit_code() const {
    if (status == "verified") return 0;
    if (status == "falsified") return 1;
    if (status == "unknown") return 4;
    return 2;
}

void Report::write(std::ostream& out, sysdef::Format fmt) const {
    switch (fmt) {
        case sysdef::Format::Json: {
            nlohmann::ordered_json j;
            j["command"] = command;
            j["status"] = status;
            j["items"] = nlohmann::ordered_json::array();
            for (const auto& it : items)
                j["items"].push_back({{"name", it.name}, {"expr", it.expr}, {"verdict", it.verdict}});
            j["notes"] = notes;
            out << j.dump(2) << "\n";
            break;
        }
        case sysdef::Format::Text:
            out << command << ": " << status << "\n";
            for (const auto& it : items) {
                out << "  " << it.name;
                if (!it.expr.empty()) out << " = " << it.expr;
                if (!it.verdict.empty()) out << "  [" << it.verdict << "]";
                out << "\n";
            }
            for (const auto& n : notes) out << "note: " << n << "\n";
            break;
        case sysdef::Format::Latex:
            out << "% " << command << ": " << status << "\n";
            if (!items.empty()) {
                out << "\\begin{align*}\n";
                for (const auto& it : items) {
                    out << "\\text{" << tex_text(it.name) << "} &: " << (it.expr.empty() ? "\\emptyset" : it.expr);
                    if (!it.verdict.empty()) out << " && \\text{" << tex_text(it.verdict) << "}";
                    out << " \\\\\n";
                }
                out << "\\end{align*}\n";
            }
            for (const auto& n : notes) out << "% " << n << "\n";
            break;
    }
}

}  // namespace pdham::cli
