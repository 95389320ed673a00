#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdham/sysdef/model.hpp"

namespace pdham::sysdef {

struct Diagnostic {
    int line = 0;
    int col = 0;
    std::string code;  // lexical, syntax, unknown-symbol, arity, duplicate-name, semantic
    std::string message;

    std::string str() const;
};

struct ParseResult {
    std::optional<SystemModel> model;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return model.has_value(); }
};

ParseResult parse_system(const std::string& text);
ParseResult parse_file(const std::string& path);

/// Cross-object checks for models built in code: every expression uses only
/// chart symbols, component counts match the chart.
std::vector<Diagnostic> validate(const SystemModel& model);

/// Parses one scalar expression against a chart. With allow_free, unknown
/// bare names become plain symbols instead of errors.
Expr parse_expression(const std::string& text, const Chart& chart, bool allow_free = false);

}  // namespace pdham::sysdef
