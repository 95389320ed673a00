#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "doctest.h"
#include "pdham/cli/cli.hpp"

namespace {

std::string corpus(const std::string& name) { return std::string(PDHAM_CORPUS_DIR) + "/" + name; }

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = pdham::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

// {"command": str, "status": enum, "items": [{name, expr, verdict: str}], "notes": [str]}
bool valid_report(const std::string& text, std::string* why) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        *why = e.what();
        return false;
    }
    static const std::set<std::string> statuses = {"verified", "falsified", "unknown", "error"};
    if (!j.is_object() || j.size() != 4) return *why = "not a four-key object", false;
    if (!j["command"].is_string()) return *why = "command", false;
    if (!j["status"].is_string() || statuses.count(j["status"]) == 0U) return *why = "status", false;
    if (!j["items"].is_array() || !j["notes"].is_array()) return *why = "items/notes", false;
    for (const auto& it : j["items"]) {
        if (!it.is_object() || it.size() != 3) return *why = "item shape", false;
        for (const char* k : {"name", "expr", "verdict"})
            if (!it.contains(k) || !it[k].is_string()) return *why = std::string("item ") + k, false;
    }
    for (const auto& n : j["notes"])
        if (!n.is_string()) return *why = "note", false;
    return true;
}

std::string status(const Run& r) { return nlohmann::json::parse(r.out)["status"]; }

}  // namespace

TEST_CASE("check classifies the wave system") {
    const auto r = run({"check", corpus("wave.pdh")});
    CHECK(r.code == 0);
    CHECK(r.out.find("PD-hamiltonian (certificate") != std::string::npos);
    CHECK(run({"check", corpus("open.pdh")}).code == 1);
    const auto mx = run({"check", corpus("maxwell_n3.pdh")});
    CHECK(mx.code == 0);
    CHECK(mx.out.find("PD-prehamiltonian") != std::string::npos);
}

TEST_CASE("constrain reports stages and termination") {
    const auto r = run({"--format", "json", "constrain", corpus("string.pdh")});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j["items"].size() == 2);
    CHECK(j["items"][0]["verdict"] == "no constraints");
    CHECK(j["items"][1]["expr"] == "1/2*t1^2 + 1/2*t2^2 - 1/2");
    CHECK(j["notes"][0] == "fixed point at step 2");
    const auto bad = run({"constrain", corpus("inconsistent.pdh")});
    CHECK(bad.code == 0);
    CHECK(bad.out.find("empty") != std::string::npos);
}

TEST_CASE("noether exit codes") {
    CHECK(run({"noether", corpus("kg.pdh"), "--field", "Y", "--current", "f"}).code == 0);
    const auto bad = run({"noether", corpus("kg.pdh"), "--field", "Y", "--current", "g"});
    CHECK(bad.code == 1);
    CHECK(bad.out.find("A[t; u] = -1  [nonzero]") != std::string::npos);
    // without the field equation for U the pair cannot be confirmed
    CHECK(run({"noether", corpus("kg.pdh"), "--field", "Y", "--current", "f", "--relations", "off"}).code == 1);
}

TEST_CASE("bracket of klein-gordon currents is trivial") {
    const auto r = run({"--format", "json", "bracket", corpus("kg.pdh"), "--pair", "Y1:f1", "--pair", "Y2:f2"});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["items"][0]["expr"] == "-U1*diff(U2,t) + diff(U1,t)*U2");
    CHECK(j["items"][1]["expr"] == "U1*diff(U2,x) - diff(U1,x)*U2");
    CHECK(j["items"][2]["verdict"] == "verified");
    CHECK(run({"bracket", corpus("kg.pdh"), "--pair", "Y:g", "--pair", "Y2:f2"}).code == 1);
    CHECK(run({"bracket", corpus("kg.pdh"), "--pair", "Y1f1", "--pair", "Y2:f2"}).code == 2);
}

TEST_CASE("potential errors map to exit codes") {
    CHECK(run({"potential", corpus("string.pdh")}).code == 0);
    CHECK(run({"potential", corpus("open.pdh")}).code == 1);
    CHECK(run({"potential", corpus("dw.pdh"), "--form", "omega"}).code == 3);
}

TEST_CASE("input errors") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate", corpus("wave.pdh")}).code == 2);
    CHECK(run({"check", corpus("does_not_exist.pdh")}).code == 2);
    CHECK(run({"noether", corpus("kg.pdh"), "--field", "Y"}).code == 2);
    CHECK(run({"noether", corpus("kg.pdh"), "--field", "Nope", "--current", "f"}).code == 2);
    CHECK(run({"--format", "yaml", "check", corpus("wave.pdh")}).code == 2);
    CHECK(run({"determining", corpus("wave.pdh"), "--unknowns", "Q"}).code == 2);
    CHECK(run({"simulate", corpus("wave.pdh")}).code == 2);
    const auto r = run({"--format", "json", "check", corpus("does_not_exist.pdh")});
    CHECK(status(r) == "error");
}

TEST_CASE("json reports follow the schema for every command and corpus file") {
    std::vector<std::vector<std::string>> cmds;
    for (const auto& e : std::filesystem::directory_iterator(PDHAM_CORPUS_DIR)) {
        if (e.path().extension() != ".pdh") continue;
        const std::string f = e.path().string();
        for (const char* c : {"check", "equations", "constrain", "potential", "lagrangian", "euler-lagrange"})
            cmds.push_back({c, f});
    }
    cmds.push_back({"noether", corpus("kg.pdh"), "--field", "Y", "--current", "g"});
    cmds.push_back({"bracket", corpus("string.pdh"), "--pair", "Y:f", "--pair", "Z:g"});
    cmds.push_back({"determining", corpus("wave_quadratic.pdh"), "--split", "ut,ux"});
    cmds.push_back({"reduce", corpus("maxwell_n2.pdh"), "--map", "p", "--target", corpus("maxwell_reduced_n2.pdh")});
    cmds.push_back({"simulate", "-", "--config", corpus("traveling.cfg")});
    for (auto args : cmds) {
        args.insert(args.begin(), {"--format", "json", "--seed", "11"});
        const auto a = run(args);
        std::string why;
        INFO(args[3], " ", args[4]);
        CHECK_MESSAGE(valid_report(a.out, &why), why);
        CHECK(a.code >= 0);
        CHECK(a.code <= 4);
        CHECK(a.out == run(args).out);
    }
}

TEST_CASE("latex and text formats") {
    const auto tex = run({"--format", "latex", "equations", corpus("string.pdh")});
    CHECK(tex.code == 0);
    CHECK(tex.out.find("\\begin{align*}") != std::string::npos);
    CHECK(tex.out.find("\\text{R[q1]}") != std::string::npos);
    const auto txt = run({"equations", corpus("string.pdh")});
    CHECK(txt.out.find("R[e] = 1/2*t1^2 + 1/2*t2^2 - 1/2") != std::string::npos);
}

TEST_CASE("simulate writes the charge series") {
    const auto path = std::filesystem::temp_directory_path() / "pdham_test_charge.csv";
    const auto r = run({"simulate", "-", "--config", corpus("traveling.cfg"), "--csv", path.string()});
    CHECK(r.code == 0);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,Q");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 2049);
    std::filesystem::remove(path);
    const auto csv = run({"simulate", "-", "--config", corpus("traveling.cfg"), "--csv", "-"});
    CHECK(csv.out.rfind("t,Q\n", 0) == 0);
    CHECK(csv.out.find("simulate:") == std::string::npos);
}
