#pragma once

// Path simulation of the risk-neutral ADOL system, used as an independent
// pricing oracle for the characteristic-function expansion.

#include <adol/do_process.hpp>
#include <adol/model.hpp>

#include <cstdint>
#include <vector>

namespace adol {

struct McSpec {
    std::size_t n_paths = 100000;
    int n_steps = 500;
    std::uint64_t seed = 42;
    double t_start = 0.0;   ///< first regular grid time; 0 means model.eps
    bool antithetic = true;
    int threads = 0;        ///< 0 = hardware concurrency; results do not depend on it

    void validate() const;
};

struct PathStats {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n_effective = 0;
};

/// States of every path at the record times.
struct QPaths {
    std::vector<double> times;
    PathMatrix log_s;   ///< log(S_t / S_0)
    PathMatrix sigma;
    PathMatrix v;
    std::size_t unstable_paths = 0;  ///< paths where |sigma| exceeded 1e3 sigma0
    bool antithetic = false;
};

/// Grid: [0, t_start], then n_steps uniform steps on [t_start, T], merged with the
/// record times. Per step: log-Euler for S with the left-point sigma, log-Euler
/// for sigma with the integrated nu^2 of the step, and the exact OU transition
/// for v with m integrated over the step.
QPaths simulate_q(const AdolModel& model, const McSpec& spec,
                  const std::vector<double>& record_times);

PathStats mc_price(const AdolModel& model, const McSpec& spec, double strike, bool is_call);

/// Discounted terminal spot relative to S0 e^{-qT}; equals 1 in expectation.
PathStats mc_discounted_spot(const AdolModel& model, const McSpec& spec);

/// (1/t_N) sum (log S_{t_i} - log S_{t_{i-1}})^2 with t_0 = 0.
PathStats mc_quadratic_variation(const AdolModel& model, const McSpec& spec,
                                 const std::vector<double>& observation_times);

/// Mean and SE over per-path values; antithetic pairs (2j, 2j+1) are averaged first.
PathStats path_statistics(const std::vector<double>& values, bool antithetic);

}  // namespace adol
