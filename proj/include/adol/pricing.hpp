#pragma once

// European option pricing by damped Fourier inversion, Black-Scholes reference
// prices and implied volatility, and variance-swap fair strikes from the forward
// characteristic function.

#include <adol/charfn.hpp>
#include <adol/model.hpp>
#include <adol/numerics.hpp>

#include <cstdint>
#include <functional>
#include <vector>

namespace adol {

/// Characteristic function of log(S_T / S_0); must return 1 at u = 0.
using CharFn = std::function<Complex(Complex)>;

struct FourierPricingSpec {
    double damping = 1.5;   ///< contour shift: the CF is evaluated at v - i (damping + 1)
    double u_max = 200.0;   ///< truncation of the frequency integral
    int n_points = 4096;    ///< grid size of the FFT ladder mode
    QuadratureSpec quad{1e-13, 1e-11, 4000};

    void validate() const;
};

double bs_price(double spot, double strike, double r, double q, double total_variance,
                bool is_call, double t = 0.0);

/// Black-Scholes CF of log(S_T / S_0) with aggregate variance w over horizon t.
Complex bs_cf(Complex u, double r, double q, double t, double total_variance);

double fourier_price(const CharFn& cf, double spot, double strike, double r, double q, double t,
                     const FourierPricingSpec& spec, bool is_call);

struct LadderPoint {
    double strike;
    double call;
    double put;
};

/// Carr-Madan FFT on spec.n_points log-strikes with Simpson weights, interpolated
/// linearly in log-strike onto the requested strikes.
std::vector<LadderPoint> fourier_ladder_fft(const CharFn& cf, double spot,
                                            const std::vector<double>& strikes, double r,
                                            double q, double t, const FourierPricingSpec& spec);

double implied_vol(double price, double spot, double strike, double r, double q, double t,
                   bool is_call);

struct VarSwapSpec {
    std::vector<double> observation_times;  ///< t_1 < ... < t_N in (0, T]; t_0 = 0 implied
    double u_step = 0.05;
    int mc_states = 20000;
    int mc_steps = 200;
    std::uint64_t seed = 12345;

    void validate(double t_mat) const;
};

/// Frozen samples of (sigma, v) at the observation times, shared by all legs.
struct StateSamples {
    std::vector<double> times;
    std::vector<std::vector<double>> sigma;  ///< sigma[k][path] at times[k]
    std::vector<std::vector<double>> v;
};

StateSamples sample_states(const AdolModel& model, const std::vector<double>& times,
                           int n_states, int n_steps, std::uint64_t seed);

struct ForwardCfResult {
    Complex value;
    double std_error = 0.0;  ///< outer-sample SE of |value|
};

/// E[exp(i u (log S_t2 - log S_t1))]: outer average over states at t1 of the
/// zero-order CF with maturity t2 started at t1. For t1 = 0 no sampling is used.
ForwardCfResult forward_cf(Complex u, double t1, double t2, const AdolModel& model,
                           const CorrectionConfig& cfg, const StateSamples* states = nullptr,
                           std::size_t state_index = 0);

struct VarSwapResult {
    double strike = 0.0;          ///< annualized fair variance
    double std_error = 0.0;       ///< outer-sample SE
    double imag_residue = 0.0;
    double richardson_ratio = 0.0;  ///< (D(h) - D(h/2)) / (D(h/2) - D(h/4))
    double strike_coarse = 0.0;   ///< non-extrapolated D(h/2) estimate
};

VarSwapResult varswap_strike(const AdolModel& model, const VarSwapSpec& spec,
                             const CorrectionConfig& cfg);

/// Order-0 affine estimate in closed form: per leg E[chi^2] = w + (a - w/2)^2
/// with w the conditional integrated variance and a = (r - q) dt.
double varswap_affine_analytic(const AdolModel& model, const VarSwapSpec& spec,
                               const StateSamples* states = nullptr);

}  // namespace adol
