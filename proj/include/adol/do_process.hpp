#pragma once

// Hurst-derived constants of the Dobric-Ojeda (DO) construction and its
// adjusted variant, together with exact-law simulators used for validation.

#include <cstdint>
#include <span>
#include <vector>

namespace adol {

/// All scalars derived from one Hurst exponent.
struct DoConstants {
    double h = 0.5;
    double alpha_h = 1.0;    ///< [G(2H+1) G(3-2H)]^(1/2) sin^2(pi H)
    double c_h = 1.0;        ///< martingale covariance prefactor
    double b_h = 1.0;        ///< diffusion scale of the DO process, nu(t) = B_H t^(H-1/2)
    double d_h_sq = 0.0;     ///< relative L2 error of V_H against fBm, squared
    double psi_scale = 1.0;  ///< psi_H(t) = psi_scale * t^(2H-1)
};

DoConstants do_constants(double h);

double psi_h(double t, const DoConstants& c);
/// E[M_H(s) M_H(t)].
double cov_m(double s, double t, const DoConstants& c);
/// Fractional Brownian motion covariance.
double cov_fbm(double s, double t, double h);
/// Diffusion coefficient B_H t^(H-1/2) of the (adjusted) DO process.
double nu_t(double t, const DoConstants& c);
/// Derivative of nu_t with respect to t.
double nu_prime(double t, const DoConstants& c);

/// Strictly increasing simulation times, all > 0.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> times);
    static TimeGrid uniform(double t_first, double t_last, std::size_t n);

    std::span<const double> times() const { return times_; }
    std::size_t size() const { return times_.size(); }
    double operator[](std::size_t i) const { return times_[i]; }

private:
    std::vector<double> times_;
};

/// Row-major path matrix: value(path, k) is the process at grid time k.
struct PathMatrix {
    std::size_t n_paths = 0;
    std::size_t n_times = 0;
    std::vector<double> data;

    double operator()(std::size_t path, std::size_t k) const { return data[path * n_times + k]; }
    double& operator()(std::size_t path, std::size_t k) { return data[path * n_times + k]; }
};

struct FbmPaths {
    PathMatrix paths;
    double jitter = 0.0;  ///< diagonal jitter added to reach positive definiteness
};

/// Exact-law paths of the Gaussian martingale M_H via independent increments.
PathMatrix simulate_mh(const TimeGrid& grid, const DoConstants& c, std::size_t n_paths,
                       std::uint64_t seed, int threads = 0);
/// DO process V_H(t) = psi_H(t) M_H(t).
PathMatrix simulate_vh(const TimeGrid& grid, const DoConstants& c, std::size_t n_paths,
                       std::uint64_t seed, int threads = 0);
/// Exact fBm paths by Cholesky factorization of the dense covariance.
FbmPaths simulate_fbm_exact(const TimeGrid& grid, double h, std::size_t n_paths,
                            std::uint64_t seed, int threads = 0);

}  // namespace adol
