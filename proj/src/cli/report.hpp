#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "pdham/sym/expr.hpp"
#include "pdham/sysdef/render.hpp"

namespace pdham::cli {

struct Item {
    std::string name;
    std::string expr;
    std::string verdict;
};

struct Report {
    std::string command;
    std::string status = "verified";  // verified | falsified | unknown | error
    std::vector<Item> items;
    std::vector<std::string> notes;

    explicit Report(std::string cmd) : command(std::move(cmd)) {}
    Report(std::string cmd, std::string st, std::string note)
        : command(std::move(cmd)), status(std::move(st)), notes{std::move(note)} {}

    void add(std::string name, const sym::Expr& e, std::string verdict, sysdef::Format fmt);
    void add(std::string name, std::string text, std::string verdict) {
        items.push_back({std::move(name), std::move(text), std::move(verdict)});
    }
    int exit_code() const;
    void write(std::ostream& out, sysdef::Format fmt) const;
};

}  // namespace pdham::cli
