#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsrisk/cli.hpp"
#include "dsrisk/tables.hpp"

using namespace dsrisk;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args, const cli::Environment& env = {}) {
    args.insert(args.begin(), "dsrisk");
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, env, out, err);
    return {code, out.str(), err.str()};
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

std::string normalize_space(const std::string& s) {
    std::istringstream in(s);
    std::string word;
    std::string out;
    while (in >> word) {
        if (!out.empty()) out += ' ';
        out += word;
    }
    return out;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / ("dsrisk_cli_" + name);
    std::ofstream(path, std::ios::binary) << content;
    return path;
}

// Value printed after "label" up to the next space or ')'.
std::string field_after(const std::string& text, const std::string& label) {
    const auto start = text.find(label);
    REQUIRE(start != std::string::npos);
    const auto begin = start + label.size();
    const auto end = text.find_first_of(" )\n", begin);
    return text.substr(begin, end - begin);
}

}  // namespace

TEST_CASE("risk with elapsed time") {
    const auto r = invoke({"risk", "--z", "1", "--q", "0.1", "--time", "600"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "19.57"));
    CHECK(contains(r.out, "table cell: 19.57"));
}

TEST_CASE("risk with r = 0 is the gambler's-ruin factor") {
    const auto r = invoke({"risk", "--z", "3", "--q", "0.2", "--r", "0"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "1.5625 %"));
}

TEST_CASE("risk human and json outputs agree") {
    const auto human = invoke({"risk", "--z", "4", "--q", "0.12", "--r", "2"});
    const auto machine = invoke({"risk", "--z", "4", "--q", "0.12", "--r", "2", "--format", "json"});
    REQUIRE(machine.code == 0);
    const auto body = json::parse(machine.out);
    for (const char* key : {"kappa", "probability", "q", "r", "t", "tau0", "z"}) {
        CHECK(body.contains(key));
    }
    CHECK(body.size() == 7);
    CHECK(machine.out.rfind("{\"kappa\":", 0) == 0);  // sorted keys

    const std::string printed = field_after(human.out, "(probability ");
    char expected[64];
    std::snprintf(expected, sizeof expected, "%.9g", body["probability"].get<double>());
    CHECK(printed == expected);
    CHECK(body["kappa"].get<double>() == (1.0 - 0.12) * 2.0);
}

TEST_CASE("risk argument errors are usage errors") {
    CHECK(invoke({"risk", "--z", "1", "--q", "0.1", "--time", "600", "--r", "1"}).code == 2);
    CHECK(invoke({"risk", "--z", "1", "--q", "0.1"}).code == 2);
    CHECK(invoke({"risk", "--q", "0.1", "--r", "1"}).code == 2);
    CHECK(invoke({"risk", "--z", "1", "--q", "0.1", "--r", "1", "--bogus"}).code == 2);
    CHECK(invoke({"risk", "--z", "0", "--q", "0.1", "--r", "1"}).code == 2);
    CHECK(invoke({"risk", "--z", "1", "--q", "0.1", "--r", "-1"}).code == 2);
    CHECK(invoke({"risk", "--z", "1", "--q", "abc", "--r", "1"}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({}).code == 2);

    const auto majority = invoke({"risk", "--z", "1", "--q", "0.5", "--r", "1"});
    CHECK(majority.code == 2);
    CHECK(contains(majority.err, "q < 1/2"));
}

TEST_CASE("help exits cleanly") {
    const auto r = invoke({"--help"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "risk"));
    CHECK(contains(r.out, "ingest"));
}

TEST_CASE("tau0 precedence: flag, then environment, then 600 s") {
    const cli::Environment env{{cli::kTau0Key, "300"}};
    const auto from_env =
        json::parse(invoke({"risk", "--z", "1", "--q", "0.1", "--time", "600", "--format", "json"}, env).out);
    CHECK(from_env["tau0"] == 300.0);
    CHECK(from_env["r"] == 2.0);

    const auto from_flag = json::parse(invoke({"risk", "--z", "1", "--q", "0.1", "--time", "600",
                                               "--tau0", "1200", "--format", "json"},
                                              env)
                                           .out);
    CHECK(from_flag["tau0"] == 1200.0);
    CHECK(from_flag["r"] == 0.5);

    const auto fallback =
        json::parse(invoke({"risk", "--z", "1", "--q", "0.1", "--time", "600", "--format", "json"}).out);
    CHECK(fallback["tau0"] == 600.0);

    const cli::Environment broken{{cli::kTau0Key, "ten minutes"}};
    CHECK(invoke({"risk", "--z", "1", "--q", "0.1", "--time", "600"}, broken).code == 2);
}

TEST_CASE("table output") {
    const auto latex = invoke({"table", "--z", "1", "--format", "latex"});
    REQUIRE(latex.code == 0);
    // First data row equals the bundled z = 1 fixture row r = 0.1.
    const auto fixture = tables::embedded_fixture(Confirmations(1));
    std::string published_row = "0.1";
    for (std::size_t j = 0; j < 13; ++j) published_row += " & " + fixture.at(0, j);
    published_row += "\\\\ \\hline";
    std::istringstream lines(latex.out);
    std::string line;
    std::getline(lines, line);
    std::getline(lines, line);
    std::getline(lines, line);
    std::getline(lines, line);
    CHECK(normalize_space(line) == normalize_space(published_row));

    const auto csv = invoke({"table", "--z", "2"});
    CHECK(csv.code == 0);
    CHECK(csv.out == tables::emit(tables::generate_table(Confirmations(2)), tables::Format::csv));

    const auto all = invoke({"table", "--all", "--format", "markdown"});
    CHECK(all.code == 0);
    CHECK(contains(all.out, "### z=1"));
    CHECK(contains(all.out, "### z=9"));

    CHECK(invoke({"table"}).code == 2);
    CHECK(invoke({"table", "--z", "1", "--all"}).code == 2);
    CHECK(invoke({"table", "--z", "1", "--format", "html"}).code == 2);
}

TEST_CASE("verify") {
    const auto all = invoke({"verify", "--all"});
    CHECK(all.code == 0);
    CHECK(contains(all.out, "total: 4095/4095"));
    CHECK(contains(all.out, "z=9: 455/455"));

    const auto one = invoke({"verify", "--z", "3", "--format", "json"});
    CHECK(one.code == 0);
    const auto body = json::parse(one.out);
    CHECK(body["cells"] == 455);
    CHECK(body["mismatches"] == 0);

    const auto strict = invoke({"verify", "--z", "1", "--tolerance", "0"});
    CHECK(strict.code == 1);
    CHECK(contains(strict.out, "mismatch at"));

    CHECK(invoke({"verify", "--z", "10"}).code == 2);
    CHECK(invoke({"verify", "--tolerance", "-1"}).code == 2);
}

TEST_CASE("simulate") {
    const std::vector<std::string> args{"simulate", "--z", "2", "--q", "0.2", "--r", "1.5",
                                        "--trials", "20000", "--seed", "9", "--format", "json"};
    const auto a = invoke(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == invoke(args).out);
    auto threaded = args;
    threaded.insert(threaded.end(), {"--threads", "3"});
    CHECK(invoke(threaded).out == a.out);
    const auto body = json::parse(a.out);
    CHECK(body["trials"] == 20000);
    CHECK(body["mode"] == "timed");
    CHECK(std::abs(body["estimate"].get<double>() - body["closed_form"].get<double>()) <=
          4.0 * body["std_error"].get<double>());

    const auto tf = invoke({"simulate", "--z", "2", "--q", "0.2", "--time-free", "--trials", "1000",
                            "--seed", "1"});
    CHECK(tf.code == 0);
    CHECK(contains(tf.out, "time-free"));

    CHECK(invoke({"simulate", "--z", "2", "--q", "0.2", "--trials", "10", "--seed", "1"}).code == 2);
    CHECK(invoke({"simulate", "--z", "2", "--q", "0.2", "--r", "1", "--time-free", "--trials", "10",
                  "--seed", "1"})
              .code == 2);
    CHECK(invoke({"simulate", "--z", "2", "--q", "0.2", "--r", "1", "--trials", "0", "--seed", "1"})
              .code == 2);
}

TEST_CASE("confirmations") {
    const auto found = invoke({"confirmations", "--q", "0.1", "--r", "1", "--target", "0.001"});
    CHECK(found.code == 0);
    CHECK(contains(found.out, "minimum confirmations: 5"));

    const auto capped =
        invoke({"confirmations", "--q", "0.4999", "--r", "1", "--target", "1e-6", "--format", "json"});
    CHECK(capped.code == 0);
    CHECK(json::parse(capped.out)["z"].is_null());

    CHECK(invoke({"confirmations", "--q", "0.1", "--r", "1", "--target", "1.5"}).code == 2);
}

TEST_CASE("ingest") {
    const auto good = temp_file("good.csv", "height,timestamp\n100,1000\n101,1600\n102,2200\n");
    const auto r = invoke({"ingest", "--file", good.string(), "--z", "3", "--q", "0.1", "--output",
                           "json"});
    REQUIRE(r.code == 0);
    const auto body = json::parse(r.out);
    CHECK(body["t"] == 1200.0);
    CHECK(body["first_height"] == 100);
    CHECK(body["last_height"] == 102);
    CHECK(body["clamped"] == false);

    const auto jl = temp_file("good.jsonl", "{\"height\":1,\"time\":500}\n{\"height\":2,\"time\":400}\n");
    const auto clamped = invoke({"ingest", "--file", jl.string(), "--z", "2", "--q", "0.1", "--format",
                                 "json_lines"});
    CHECK(clamped.code == 0);
    CHECK(contains(clamped.err, "warning"));
    CHECK(contains(clamped.out, "clamped"));

    const auto bad = temp_file("bad.csv", "abc,12\n");
    const auto malformed = invoke({"ingest", "--file", bad.string(), "--z", "1", "--q", "0.1"});
    CHECK(malformed.code == 3);
    CHECK(contains(malformed.err, "line 1"));

    CHECK(invoke({"ingest", "--file", "/nonexistent/stamps.csv", "--z", "1", "--q", "0.1"}).code == 3);
    CHECK(invoke({"ingest", "--file", good.string(), "--z", "5", "--q", "0.1"}).code == 3);
    CHECK(invoke({"ingest", "--file", good.string(), "--z", "3", "--q", "0.1", "--format", "xml"})
              .code == 2);
}
