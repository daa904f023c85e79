#include "dsrisk/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "dsrisk/error.hpp"
#include "dsrisk/ingest.hpp"
#include "dsrisk/oracle.hpp"
#include "dsrisk/risk.hpp"
#include "dsrisk/tables.hpp"
#include "text_util.hpp"

namespace dsrisk::cli {
namespace {

using nlohmann::json;

/// Raised for argument combinations CLI11 cannot express.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string number(double value, int digits = 9) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*g", digits, value);
    return buffer;
}

double resolve_tau0(const std::optional<double>& flag, const Environment& env) {
    if (flag) {
        return *flag;
    }
    if (const auto it = env.find(kTau0Key); it != env.end()) {
        const auto value = detail::parse_number<double>(it->second);
        if (!value || !(*value > 0.0)) {
            throw UsageError(std::string(kTau0Key) + " must be a positive number of seconds, got '" +
                             it->second + "'");
        }
        return *value;
    }
    return kDefaultBlockPeriod;
}

tables::Format table_format(const std::string& name) {
    if (name == "markdown") return tables::Format::markdown;
    if (name == "latex") return tables::Format::latex;
    return tables::Format::csv;
}

struct RiskArgs {
    int z = 0;
    double q = 0.0;
    std::optional<double> time;
    std::optional<double> r;
    std::optional<double> tau0;
    std::string format = "human";
};

struct TableArgs {
    std::optional<int> z;
    bool all = false;
    std::string format = "csv";
};

struct VerifyArgs {
    std::optional<int> z;
    bool all = false;
    double tolerance = tables::kDefaultTolerancePercent;
    std::string format = "human";
};

struct SimulateArgs {
    int z = 0;
    double q = 0.0;
    std::optional<double> r;
    bool time_free = false;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    int max_deficit = 200;
    unsigned threads = 0;
    std::string format = "human";
};

struct ConfirmationsArgs {
    double q = 0.0;
    double r = 0.0;
    double target = 0.0;
    std::string format = "human";
};

struct IngestArgs {
    std::string file;
    int z = 0;
    double q = 0.0;
    std::string format = "csv";
    std::optional<double> tau0;
    std::string output = "human";
};

const auto kHumanJson = CLI::IsMember({"human", "json"});

void write_risk_human(std::ostream& out, Confirmations z, HashrateShare share,
                      const Timing& timing, double probability) {
    out << "z = " << z.value() << ", q = " << number(share.q()) << ", t = " << number(timing.t)
        << " s, tau0 = " << number(timing.tau0) << " s\n";
    out << "r = " << number(timing.r) << ", kappa = " << number(timing.kappa) << "\n";
    out << "catch-up risk: " << number(100.0 * probability) << " % (probability "
        << number(probability) << ")\n";
    out << "table cell: " << tables::format_cell(100.0 * probability) << "\n";
}

json risk_json(Confirmations z, HashrateShare share, const Timing& timing, double probability) {
    return json{{"z", z.value()},       {"q", share.q()},         {"t", timing.t},
                {"tau0", timing.tau0},  {"r", timing.r},          {"kappa", timing.kappa},
                {"probability", probability}};
}

int do_risk(const RiskArgs& args, const Environment& env, std::ostream& out) {
    if (args.time.has_value() == args.r.has_value()) {
        throw UsageError("risk: give exactly one of --time or --r");
    }
    const Confirmations z(args.z);
    const HashrateShare share(args.q);
    const double tau0 = resolve_tau0(args.tau0, env);
    Timing timing{};
    if (args.time) {
        timing = timing_from(*args.time, z, share, tau0);
    } else {
        if (!std::isfinite(*args.r) || *args.r < 0.0) {
            throw DomainError("pace ratio r must be finite and >= 0");
        }
        timing = Timing{*args.r * z.value() * tau0, tau0, *args.r, share.p() * *args.r};
    }
    const double probability = table_probability(z, share, timing.r);
    if (args.format == "json") {
        out << risk_json(z, share, timing, probability).dump() << "\n";
    } else {
        write_risk_human(out, z, share, timing, probability);
    }
    return kSuccess;
}

int do_table(const TableArgs& args, std::ostream& out) {
    if (args.z.has_value() == args.all) {
        throw UsageError("table: give exactly one of --z or --all");
    }
    const auto format = table_format(args.format);
    if (args.z) {
        out << tables::emit(tables::generate_table(Confirmations(*args.z)), format);
        return kSuccess;
    }
    for (int z = 1; z <= tables::kFixtureCount; ++z) {
        if (z > 1) out << "\n";
        switch (format) {
            case tables::Format::csv: out << "# z=" << z << "\n"; break;
            case tables::Format::markdown: out << "### z=" << z << "\n\n"; break;
            case tables::Format::latex: out << "\\fbox{$z=" << z << "$}\n"; break;
        }
        out << tables::emit(tables::generate_table(Confirmations(z)), format);
    }
    return kSuccess;
}

int do_verify(const VerifyArgs& args, std::ostream& out) {
    if (args.z && args.all) {
        throw UsageError("verify: --z and --all are mutually exclusive");
    }
    if (!(args.tolerance >= 0.0)) {
        throw UsageError("verify: --tolerance must be >= 0");
    }
    std::vector<int> targets;
    if (args.z) {
        if (*args.z < 1 || *args.z > tables::kFixtureCount) {
            throw UsageError("verify: fixtures exist only for z = 1..9");
        }
        targets.push_back(*args.z);
    } else {
        for (int z = 1; z <= tables::kFixtureCount; ++z) targets.push_back(z);
    }

    std::size_t compared = 0;
    std::size_t mismatched = 0;
    json reports = json::array();
    for (int value : targets) {
        const Confirmations z(value);
        const auto report = tables::compare_fixture(tables::generate_table(z),
                                                    tables::embedded_fixture(z), args.tolerance);
        compared += report.cells_compared;
        mismatched += report.mismatches.size();
        if (args.format == "json") {
            json mismatches = json::array();
            for (const auto& m : report.mismatches) {
                mismatches.push_back({{"r", m.r},
                                      {"q", m.q},
                                      {"computed_percent", m.computed_percent},
                                      {"published", m.published},
                                      {"delta", m.delta}});
            }
            reports.push_back({{"z", value},
                               {"cells", report.cells_compared},
                               {"max_abs_delta", report.max_abs_delta},
                               {"mismatches", mismatches}});
            continue;
        }
        out << "z=" << value << ": " << report.cells_compared - report.mismatches.size() << "/"
            << report.cells_compared << " cells match (max |delta| " << number(report.max_abs_delta, 4)
            << " pp)\n";
        for (const auto& m : report.mismatches) {
            out << "  mismatch at r=" << tables::format_axis(m.r)
                << " q=" << tables::format_axis(m.q) << ": computed " << number(m.computed_percent, 6)
                << ", published " << m.published << ", delta " << number(m.delta, 4) << "\n";
        }
    }
    if (args.format == "json") {
        out << json{{"tolerance_percent", args.tolerance},
                    {"cells", compared},
                    {"mismatches", mismatched},
                    {"tables", reports}}
                   .dump()
            << "\n";
    } else {
        out << "total: " << compared - mismatched << "/" << compared << " cells match within "
            << number(args.tolerance, 6) << " pp\n";
    }
    return mismatched == 0 ? kSuccess : kMismatch;
}

int do_simulate(const SimulateArgs& args, std::ostream& out) {
    if (args.r.has_value() == args.time_free) {
        throw UsageError("simulate: give exactly one of --r or --time-free");
    }
    const Confirmations z(args.z);
    const HashrateShare share(args.q);
    oracle::TrialConfig config;
    config.trials = args.trials;
    config.seed = args.seed;
    config.max_deficit = args.max_deficit;
    double closed_form = 0.0;
    if (args.time_free) {
        config.mode = oracle::TimeFree{};
        closed_form = catchup_time_free(z, share);
    } else {
        closed_form = table_probability(z, share, *args.r);
        config.mode = oracle::Timed{share.p() * *args.r};
    }
    const auto outcome = oracle::simulate_race(z, share, config, args.threads);
    if (args.format == "json") {
        json body{{"z", z.value()},
                  {"q", share.q()},
                  {"mode", args.time_free ? "time_free" : "timed"},
                  {"trials", outcome.trials},
                  {"successes", outcome.successes},
                  {"seed", config.seed},
                  {"max_deficit", config.max_deficit},
                  {"estimate", outcome.estimate},
                  {"std_error", outcome.std_error},
                  {"truncation_bias_bound", outcome.truncation_bias_bound},
                  {"closed_form", closed_form}};
        if (args.r) {
            body["r"] = *args.r;
            body["kappa"] = std::get<oracle::Timed>(config.mode).kappa;
        }
        out << body.dump() << "\n";
        return kSuccess;
    }
    out << "mode: " << (args.time_free ? "time-free" : "timed") << ", z = " << z.value()
        << ", q = " << number(share.q());
    if (args.r) {
        out << ", r = " << number(*args.r);
    }
    out << "\n";
    out << "estimate: " << number(outcome.estimate) << " +/- " << number(outcome.std_error, 3)
        << " (" << outcome.successes << "/" << outcome.trials << " trials, seed " << config.seed
        << ")\n";
    out << "closed form: " << number(closed_form) << "\n";
    out << "truncation bias bound: " << number(outcome.truncation_bias_bound, 3)
        << " (max deficit " << config.max_deficit << ")\n";
    return kSuccess;
}

int do_confirmations(const ConfirmationsArgs& args, std::ostream& out) {
    const HashrateShare share(args.q);
    const auto z = min_confirmations(share, args.r, args.target);
    if (args.format == "json") {
        json body{{"q", share.q()}, {"r", args.r}, {"target", args.target}};
        if (z) {
            body["z"] = z->value();
            body["probability"] = table_probability(*z, share, args.r);
        } else {
            body["z"] = nullptr;
            body["cap"] = Confirmations::kMax;
        }
        out << body.dump() << "\n";
        return kSuccess;
    }
    if (z) {
        const double probability = table_probability(*z, share, args.r);
        out << "minimum confirmations: " << z->value() << " (risk "
            << number(100.0 * probability) << " % <= target " << number(100.0 * args.target)
            << " %)\n";
    } else {
        out << "target " << number(100.0 * args.target) << " % not reached within "
            << Confirmations::kMax << " confirmations\n";
    }
    return kSuccess;
}

int do_ingest(const IngestArgs& args, const Environment& env, std::ostream& out,
              std::ostream& err) {
    const Confirmations z(args.z);
    const HashrateShare share(args.q);
    const double tau0 = resolve_tau0(args.tau0, env);

    std::ifstream file(args.file, std::ios::binary);
    if (!file) {
        throw DataError("cannot open '" + args.file + "'");
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    const auto stamps = ingest::parse_stamps(buffer.str(), args.format == "json_lines"
                                                               ? ingest::StampFormat::json_lines
                                                               : ingest::StampFormat::csv);
    const auto window = ingest::elapsed_for_confirmations(stamps, z);
    if (window.clamped) {
        err << "warning: block " << window.last_height << " is timestamped before block "
            << window.first_height
            << "; elapsed time clamped to 0, which understates the risk\n";
    }
    const Timing timing = timing_from(window.t, z, share, tau0);
    const double probability = table_probability(z, share, timing.r);
    if (args.output == "json") {
        auto body = risk_json(z, share, timing, probability);
        body["first_height"] = window.first_height;
        body["last_height"] = window.last_height;
        body["clamped"] = window.clamped;
        out << body.dump() << "\n";
        return kSuccess;
    }
    out << "blocks " << window.first_height << ".." << window.last_height << " ("
        << stamps.size() << " stamps read)" << (window.clamped ? " [t clamped to 0]" : "")
        << "\n";
    write_risk_human(out, z, share, timing, probability);
    return kSuccess;
}

}  // namespace

int run(std::span<const std::string> args, const Environment& env, std::ostream& out,
        std::ostream& err) {
    CLI::App app{"Double-spend catch-up risk from confirmations and their elapsed time"};
    app.name(args.empty() ? "dsrisk" : args.front());
    app.require_subcommand(1, 1);

    RiskArgs risk;
    auto* risk_cmd = app.add_subcommand("risk", "Catch-up probability after z confirmations");
    risk_cmd->add_option("--z", risk.z, "Confirmations")->required();
    risk_cmd->add_option("--q", risk.q, "Attacker hashrate share, 0 < q < 0.5")->required();
    auto* time_opt = risk_cmd->add_option("--time", risk.time, "Elapsed seconds for z blocks");
    auto* r_opt = risk_cmd->add_option("--r", risk.r, "Pace ratio t / (z tau0)");
    time_opt->excludes(r_opt);
    risk_cmd->add_option("--tau0", risk.tau0, "Block period in seconds (default 600)");
    risk_cmd->add_option("--format", risk.format)->check(kHumanJson);

    TableArgs table;
    auto* table_cmd = app.add_subcommand("table", "Risk table on the standard r x q grid");
    auto* table_z = table_cmd->add_option("--z", table.z, "Confirmations");
    auto* table_all = table_cmd->add_flag("--all", table.all, "Tables for z = 1..9");
    table_z->excludes(table_all);
    table_cmd->add_option("--format", table.format)
        ->check(CLI::IsMember({"csv", "markdown", "latex"}));

    VerifyArgs verify;
    auto* verify_cmd = app.add_subcommand("verify", "Compare generated tables with the bundled fixtures");
    auto* verify_z = verify_cmd->add_option("--z", verify.z, "Single table (default: all)");
    auto* verify_all = verify_cmd->add_flag("--all", verify.all, "All nine tables");
    verify_z->excludes(verify_all);
    verify_cmd->add_option("--tolerance", verify.tolerance, "Allowed |delta| in percentage points");
    verify_cmd->add_option("--format", verify.format)->check(kHumanJson);

    SimulateArgs simulate;
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of the race");
    simulate_cmd->add_option("--z", simulate.z)->required();
    simulate_cmd->add_option("--q", simulate.q)->required();
    auto* sim_r = simulate_cmd->add_option("--r", simulate.r, "Pace ratio (timed race)");
    auto* sim_tf = simulate_cmd->add_flag("--time-free", simulate.time_free, "Ignore elapsed time");
    sim_r->excludes(sim_tf);
    simulate_cmd->add_option("--trials", simulate.trials)->required()->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--seed", simulate.seed)->required();
    simulate_cmd->add_option("--max-deficit", simulate.max_deficit, "Deficit counted as failure");
    simulate_cmd->add_option("--threads", simulate.threads, "Worker threads (0: all cores)");
    simulate_cmd->add_option("--format", simulate.format)->check(kHumanJson);

    ConfirmationsArgs confirmations;
    auto* confirmations_cmd =
        app.add_subcommand("confirmations", "Smallest z whose risk is at most a target");
    confirmations_cmd->add_option("--q", confirmations.q)->required();
    confirmations_cmd->add_option("--r", confirmations.r)->required();
    confirmations_cmd->add_option("--target", confirmations.target, "Risk target in (0, 1)")
        ->required();
    confirmations_cmd->add_option("--format", confirmations.format)->check(kHumanJson);

    IngestArgs ingest_args;
    auto* ingest_cmd = app.add_subcommand("ingest", "Risk from a file of block timestamps");
    ingest_cmd->add_option("--file", ingest_args.file)->required();
    ingest_cmd->add_option("--z", ingest_args.z)->required();
    ingest_cmd->add_option("--q", ingest_args.q)->required();
    ingest_cmd->add_option("--format", ingest_args.format, "Input format")
        ->check(CLI::IsMember({"csv", "json_lines"}));
    ingest_cmd->add_option("--tau0", ingest_args.tau0);
    ingest_cmd->add_option("--output", ingest_args.output)->check(kHumanJson);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) {
        reversed.pop_back();  // program name
    }
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return kUsage;
    }

    try {
        if (risk_cmd->parsed()) return do_risk(risk, env, out);
        if (table_cmd->parsed()) return do_table(table, out);
        if (verify_cmd->parsed()) return do_verify(verify, out);
        if (simulate_cmd->parsed()) return do_simulate(simulate, out);
        if (confirmations_cmd->parsed()) return do_confirmations(confirmations, out);
        if (ingest_cmd->parsed()) return do_ingest(ingest_args, env, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DataError& e) {
        err << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const std::logic_error& e) {
        // StructuralError, NumericalError: a bug or corrupted build, not bad input
        err << "internal error: " << e.what() << "\n";
        return kMismatch;
    }
    return kUsage;
}

}  // namespace dsrisk::cli
