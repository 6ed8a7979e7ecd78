#pragma once

// Characteristic function of log(S_T / S_0) under the ADOL model as a series in
// the vol-of-vol xi: zero order in two variants, first and second order by a
// Duhamel (source-term) representation, plus the Green's-function pieces and
// the J-integral of the worked example.

#include <adol/cumulative.hpp>
#include <adol/model.hpp>
#include <adol/numerics.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace adol {

enum class CfMode { closed_form, affine_ode };
enum class JMethod { quadrature, quadratic_at_varsigma, quadratic_at_stationary };

std::string to_string(CfMode mode);
std::string to_string(JMethod method);
CfMode parse_cf_mode(const std::string& s);
JMethod parse_j_method(const std::string& s);

/// z0(t, sigma, v) = exp(alpha + gamma sigma^2 + beta_bar sigma v + gamma_bar sigma).
struct CfCoefficients {
    std::function<Complex(double)> alpha;
    std::function<Complex(double)> gamma;
    std::function<Complex(double)> beta_bar;
    std::function<Complex(double)> gamma_bar;

    Complex exponent(double t, Complex sigma, Complex v) const;
};

/// Closed forms as printed, including the (1 - rho)^2 factor in gamma and the
/// 1/nu terms in beta_bar. Requires H < 1/2.
CfCoefficients coeffs_closed_form(Complex u, const AdolModel& model);

/// Exponential-affine ansatz substituted into the xi = 0 PDE and integrated
/// backward from T. Coefficients between solver steps use cubic Hermite
/// interpolation with the ODE right-hand side as derivative.
CfCoefficients coeffs_affine_ode(Complex u, const AdolModel& model, const OdeSpec& spec = {});

/// Closed forms of the affine-ODE solution (used as an oracle).
Complex affine_gamma_closed(Complex u, double t, const AdolModel& model);

/// gamma(t) of the printed closed form.
Complex gamma_closed_form(Complex u, double t, const AdolModel& model);

/// Integral of (kappa + m(s)) / nu(s) over [a, b] in closed form.
double kappa_m_over_nu(double a, double b, const AdolModel& model);

/// Zero-order CF at inception (x = 0, sigma0, v0).
Complex cf_zero(Complex u, const AdolModel& model, CfMode mode);

/// Transport/diffusion pieces of the xi = 0 operator: the V-equation is mapped to
/// the heat equation by tau(t) and alpha1(t).
class GreenPieces {
public:
    explicit GreenPieces(const AdolModel& model);

    double alpha1(double t) const;
    /// Authoritative tau from quadrature of nu^2 alpha1^2.
    double tau(double t) const;
    /// Closed form through E(nu, z) on the principal branch (alpha1 squared).
    Complex tau_closed_form(double t) const;
    /// The printed exponential-integral expression, taken verbatim.
    Complex tau_closed_form_verbatim(double t) const;
    /// Inverse of tau on [0, T] by bisection.
    double t_of_tau(double tau_value) const;
    Complex a1(Complex u, double t) const;
    /// 1 / (d tau / d t).
    double g_jac(double t) const;

    /// Integral of nu^2 alpha1^2 over [0, t].
    double nu2_alpha2_integral(double t) const { return nu2a2_(t); }
    /// Integral of alpha1 nu e^{-kappa s} over [0, t].
    double drift_kernel_integral(double t) const { return drift_(t); }

    const AdolModel& model() const { return model_; }
    const DoConstants& constants() const { return c_; }

private:
    AdolModel model_;
    DoConstants c_;
    CumulativeIntegral nu2a2_;
    CumulativeIntegral drift_;
};

double heat_kernel(double x, double x_prime, double tau);

/// Second-order expansion of the J exponent about `center`.
struct JExpansion {
    double center = 0.0;
    double k = 0.0;
    double a0 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
};

struct JResult {
    Complex value;
    JExpansion expansion;  ///< filled for the quadratic methods
    double error = 0.0;    ///< quadrature error estimate
};

/// k(chi) = omega^2 e^{-2 kappa chi} gamma(chi) alpha1(chi)^2 with the printed gamma.
double j_k(double omega, double chi, double u, const GreenPieces& green);

/// Exponent of the J integrand, k / (x - 2 chi)^2 + x - (x - varsigma)^2 / (4 (chi - t)).
double j_exponent(double x, double varsigma, double k, double chi, double t);

JExpansion j_expand(double center, double varsigma, double k, double chi, double t);

/// Real root of the stationarity quartic nearest varsigma with negative curvature.
double j_stationary_point(double varsigma, double k, double chi, double t);

JResult j_integral(double varsigma, double omega, double chi, const GreenPieces& green,
                   JMethod method, double u = 1.0, double t = 0.0,
                   const QuadratureSpec& quad = {});

struct CorrectionConfig {
    CfMode mode = CfMode::affine_ode;
    int order = 1;
    double sigma_step = 1e-3;   ///< relative central-difference step in sigma
    double v_step = 1e-3;       ///< relative central-difference step in v
    JMethod j_method = JMethod::quadrature;  ///< J evaluation used by figures and ledger
    QuadratureSpec quad;
    OdeSpec ode;
    int time_panels = 8;        ///< Gauss-Legendre panels per time integral
    int hermite_nodes = 4;      ///< Gauss-Hermite nodes for the v expectation

    void validate() const;
};

/// Evaluates z0, z1, z2 at arbitrary (t, sigma, v) for one frequency u.
///
/// z_i(t) = int_t^T P(t->s) E[S_i(s, sigma_s, v_s)] ds with S_1 = Phi_1 z0 and
/// S_2 = Phi_2 z0 + Phi_1 z1. Under the xi = 0 dynamics sigma decays
/// deterministically and v is Gaussian with a (complex) mean shifted by the
/// i u rho nu sigma drift, so the expectation is a Gauss-Hermite sum.
class CfEngine {
public:
    CfEngine(const AdolModel& model, const CorrectionConfig& cfg);

    Complex z0(Complex u, double t, Complex sigma, Complex v) const;
    Complex z(int order, Complex u, double t, Complex sigma, Complex v) const;
    /// cfg.order-truncated series at inception.
    Complex total(Complex u) const;
    /// Single correction term z_order at inception (order 1 or 2).
    Complex correction(int order, Complex u) const;

    const GreenPieces& green() const { return *green_; }
    const AdolModel& model() const { return model_; }
    const CorrectionConfig& config() const { return cfg_; }

private:
    struct Frequency;
    struct Node;
    struct TimeNodes;
    std::shared_ptr<const Frequency> prepare(Complex u) const;
    /// Time-quadrature nodes on [t, T] with their Green's-function data; u independent.
    std::shared_ptr<const TimeNodes> build_nodes(double t, bool with_children) const;
    Complex z_at(const Frequency& f, int order, const TimeNodes& tn, Complex sigma, Complex v) const;
    Complex source(const Frequency& f, int order, const Node& n, Complex sigma, Complex v) const;
    Complex phi1(const Frequency& f, int base, const Node& n, Complex sigma, Complex v) const;
    Complex phi2(const Frequency& f, const Node& n, Complex sigma, Complex v) const;

    AdolModel model_;
    CorrectionConfig cfg_;
    std::shared_ptr<GreenPieces> green_;
    GaussLegendreRule gl_;
    GaussHermiteRule gh_;
    std::shared_ptr<const TimeNodes> root_;  ///< nodes from t = 0, children one level deep
};

Complex correction(int order, Complex u, const AdolModel& model, const CorrectionConfig& cfg);
Complex cf_total(Complex u, const AdolModel& model, const CorrectionConfig& cfg);

using StateFunction = std::function<Complex(double t, double sigma, double v)>;

struct ResidualStats {
    double max_normalized = 0.0;
    double mean_normalized = 0.0;
    std::size_t points = 0;
};

struct ResidualPoint {
    double t;
    double sigma;
    double v;
};

/// Central-difference residual of the full CF PDE (including the xi terms of
/// the model) normalized by the largest individual term at each point.
ResidualStats pde_residual(const StateFunction& z, Complex u, const AdolModel& model,
                           const std::vector<ResidualPoint>& points);

/// Uniform random interior points t in (eps, T), sigma in [lo, hi], v in [lo, hi].
std::vector<ResidualPoint> random_interior_points(const AdolModel& model, std::size_t n,
                                                  std::uint64_t seed);

}  // namespace adol
