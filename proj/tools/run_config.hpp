#pragma once

// Strict JSON run configuration: every block optional, every key known,
// every default written back out by to_json.

#include <adol/charfn.hpp>
#include <adol/model.hpp>
#include <adol/montecarlo.hpp>
#include <adol/pricing.hpp>

#include <json.hpp>

#include <string>
#include <vector>

namespace adol::cli {

struct ConstantsBlock {
    double h_min = 0.01;
    double h_max = 0.99;
    int h_points = 99;
};

struct CfBlock {
    CorrectionConfig cfg;
    double u_min = -10.0;
    double u_max = 10.0;
    int u_points = 41;
};

struct PricingBlock {
    FourierPricingSpec spec;
    std::vector<double> strikes;  // empty -> 0.80 .. 1.20 x s0 in 0.05 steps
    bool is_call = true;
    std::string method = "quadrature";  // or "fft"
    bool include_mc = true;
};

struct OutputBlock {
    std::string directory = "out";
    int format_version = 1;
};

struct RunConfig {
    AdolModel model;
    ConstantsBlock constants;
    CfBlock cf;
    PricingBlock pricing;
    McSpec mc;
    VarSwapSpec varswap;  // empty observation_times -> quarterly-like split into 4 legs
    OutputBlock output;
};

/// Parses and validates; throws ValidationError naming the offending key.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Fully resolved configuration, every default explicit.
nlohmann::json to_json(const RunConfig& cfg);

/// Fills schedule and strike defaults that depend on other fields, then validates.
void resolve(RunConfig& cfg);

}  // namespace adol::cli
