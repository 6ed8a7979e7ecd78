#pragma once

#include "run_config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace adol::cli {

struct Check {
    std::string command;
    std::string name;
    bool ok = false;
    std::string detail;
};

struct Context {
    RunConfig cfg;
    std::string config_path;
    std::filesystem::path out;
    std::vector<Check> checks;

    void check(const std::string& command, const std::string& name, bool ok, const std::string& detail);
};

void cmd_constants(Context& ctx);
void cmd_figures(Context& ctx);
void cmd_cf(Context& ctx);
void cmd_price(Context& ctx);
void cmd_varswap(Context& ctx);
void cmd_mc(Context& ctx);
void cmd_ledger(Context& ctx);
/// Every command above, in order.
void cmd_check(Context& ctx);

}  // namespace adol::cli
