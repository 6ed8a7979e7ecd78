// adol: command-line front end. Exit codes: 0 ok, 1 validation, 2 numerical, 3 check breach.

#include "commands.hpp"

#include <adol/error.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

namespace {

enum Exit { ok = 0, validation = 1, numerical = 2, breach = 3 };

}  // namespace

int main(int argc, char** argv) {
    using namespace adol;
    using namespace adol::cli;

    const std::map<std::string, std::function<void(Context&)>> commands{
        {"constants", cmd_constants}, {"figures", cmd_figures}, {"cf", cmd_cf},         {"price", cmd_price},
        {"varswap", cmd_varswap},     {"mc", cmd_mc},           {"ledger", cmd_ledger}, {"check", cmd_check}};

    const std::map<std::string, std::string> help{
        {"constants", "DO constants over an H grid"},
        {"figures", "J integrand, a2 and f(H,T) curves"},
        {"cf", "characteristic function by order"},
        {"price", "option prices across the strike ladder"},
        {"varswap", "variance swap strike"},
        {"mc", "Monte Carlo prices and martingale check"},
        {"ledger", "mode gaps, PDE residuals and small-parameter report"},
        {"check", "run every command with checks on"}};

    CLI::App app{"ADOL characteristic-function pricer"};
    app.require_subcommand(1, 1);
    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    bool check = false;
    for (const auto& [name, _] : commands) {
        CLI::App* sub = app.add_subcommand(name, help.at(name));
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
        sub->add_option("--seed", seed, "seed for mc and varswap (overrides config)");
        sub->add_flag("--check", check, "evaluate oracle tolerances; exit 3 on breach");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? Exit::ok : Exit::validation;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    CLI::App* sub = app.get_subcommands().front();

    try {
        Context ctx;
        ctx.config_path = config_path;
        ctx.cfg = load_config(config_path);
        if (sub->count("--seed")) {
            ctx.cfg.mc.seed = seed;
            ctx.cfg.varswap.seed = seed;
        }
        if (!out_dir.empty()) ctx.cfg.output.directory = out_dir;
        ctx.out = ctx.cfg.output.directory;
        std::filesystem::create_directories(ctx.out);
        {
            std::ofstream o(ctx.out / "resolved_config.json");
            if (!o) throw ValidationError("cannot write to '" + ctx.out.string() + "'");
            o << to_json(ctx.cfg).dump(2) << "\n";
        }

        commands.at(name)(ctx);

        bool failed = false;
        for (const Check& c : ctx.checks) {
            failed = failed || !c.ok;
            if (check || name == "check")
                std::printf("%s  %s: %s: %s\n", c.ok ? "PASS" : "FAIL", c.command.c_str(), c.name.c_str(),
                            c.detail.c_str());
        }
        std::printf("%s: wrote %s\n", name.c_str(), ctx.out.string().c_str());
        if ((check || name == "check") && failed) return Exit::breach;
        return Exit::ok;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return Exit::validation;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return Exit::validation;
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return Exit::validation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return Exit::numerical;
    }
}
