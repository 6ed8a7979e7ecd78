#pragma once

// Parameterization of the adjusted DO lognormal (ADOL) model: power-law
// mean-reversion function m(t), drifts under both measures and the small
// vol-of-vol admissibility check.

#include <adol/do_process.hpp>
#include <adol/numerics.hpp>

namespace adol {

struct AdolModel {
    double s0 = 1.0;       ///< spot
    double sigma0 = 0.3;   ///< initial instantaneous volatility
    double v0 = 5.0;       ///< initial auxiliary state
    double r = 0.0;        ///< risk-free rate
    double q = 0.0;        ///< dividend yield
    double mu = 0.0;       ///< physical drift; accepted but unused by pricing
    double kappa = 2.0;    ///< mean-reversion rate of sigma
    double theta = 0.0;    ///< mean-reversion level of sigma
    double xi = 0.0;       ///< vol-of-vol
    double rho = -0.5;     ///< spot/vol correlation
    double lambda = 0.0;   ///< market price of vol risk; must be 0
    double h = 0.3;        ///< Hurst exponent
    double m_rho = 1.0;    ///< m(t) = m_rho * t^m_pi
    double m_pi = 0.5;
    double eps = 1e-4;     ///< drift cutoff time of the physical DO drift
    double t_mat = 0.5;    ///< maturity

    /// Throws ValidationError on any violated bound.
    void validate() const;

    DoConstants constants() const { return do_constants(h); }

    /// Reference parameter set (xi defaults to 0).
    static AdolModel table1();
};

double m_t(double t, const AdolModel& model);
/// Integral of m over [a, b].
double m_integral(double a, double b, const AdolModel& model);

struct QDrifts {
    double drift_s;      ///< relative drift of S: r - q
    double drift_sigma;  ///< -(kappa + xi m(t) v) sigma
    double drift_v;      ///< -m(t) v
};

/// Risk-neutral drifts (lambda = 0).
QDrifts q_drifts(double t, double sigma, double v, const AdolModel& model);

/// Physical drift of the adjusted auxiliary state, zero up to the cutoff eps.
Complex p_drift_v(double t, Complex v, const AdolModel& model);

struct SmallParamReport {
    double f_ht = 0.0;     ///< 2 / (B_H T^H)
    double xi = 0.0;
    double margin = 0.25;
    bool admissible = false;
};

/// f(H, T) = 2 / (B_H T^H).
double small_param_bound(double h, double t);

SmallParamReport small_param_check(const AdolModel& model, double margin = 0.25);

}  // namespace adol
