#pragma once

// Self-contained numerical kernel: special functions, adaptive quadrature,
// ODE integration, polynomial roots and Gauss-Hermite rules.

#include <adol/error.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

namespace adol {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;

    void validate() const;
};

struct OdeSpec {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.05;  // years

    void validate() const;
};

struct QuadResult {
    Complex value;
    double error = 0.0;
    int evaluations = 0;
    int subdivisions = 0;
};

// ---------------------------------------------------------------------------
// Special functions

/// Gamma function for real, non-pole arguments (Lanczos, g = 7, with reflection).
double gamma_fn(double x);

/// Symmetric Beta function B(x, x) = Gamma(x)^2 / Gamma(2x), x > 0.
double beta_sym(double x);

/// Generalized exponential integral E(order, z) = z^(order-1) Gamma(1-order, z).
/// Negative z returns the principal-branch value, which is complex in general.
Complex exp_integral_e(double order, double z);

/// Digamma for positive integers: psi(n) = -gamma_E + sum_{k<n} 1/k.
double digamma_int(int n);

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod quadrature

namespace detail {

inline constexpr std::array<double, 8> kGkNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kGkWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights live on the odd Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    Complex value;
    double error;
    double abs_value;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const Complex fc = Complex(f(c));
    Complex kron = fc * kGkWeights[7];
    Complex gauss = fc * kGaussWeights[3];
    double abs_sum = std::abs(fc) * kGkWeights[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kGkNodes[j];
        const Complex f1 = Complex(f(c - dx));
        const Complex f2 = Complex(f(c + dx));
        kron += kGkWeights[j] * (f1 + f2);
        abs_sum += kGkWeights[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
    }
    Panel p{a, b, kron * h, std::abs((kron - gauss) * h), abs_sum * std::abs(h)};
    if (!std::isfinite(p.value.real()) || !std::isfinite(p.value.imag())) {
        throw NumericalError("integrate_adaptive: non-finite integrand on [" + std::to_string(a) +
                             ", " + std::to_string(b) + "]");
    }
    return p;
}

}  // namespace detail

/// Adaptive bisection with a 7/15-point Gauss-Kronrod pair per panel. The panel with
/// the largest error estimate is split first, so integrable power-law endpoint
/// singularities are resolved by repeated subdivision toward the endpoint. Optional
/// interior breakpoints seed the initial panels.
template <class F>
QuadResult integrate_adaptive(F&& f, double a, double b, const QuadratureSpec& spec,
                              std::span<const double> breakpoints = {}) {
    spec.validate();
    if (a == b) return {};
    const double sign = b > a ? 1.0 : -1.0;
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);

    std::vector<double> cuts{lo};
    for (double p : breakpoints)
        if (p > lo && p < hi) cuts.push_back(p);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());

    std::priority_queue<detail::Panel> heap;
    Complex total{};
    double total_err = 0.0;
    double total_abs = 0.0;
    int evals = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto p = detail::gk15(f, cuts[i], cuts[i + 1]);
        evals += 15;
        total += p.value;
        total_err += p.error;
        total_abs += p.abs_value;
        heap.push(p);
    }

    constexpr double kEps = std::numeric_limits<double>::epsilon();
    int splits = 0;
    while (true) {
        const double tol =
            std::max({spec.abs_tol, spec.rel_tol * std::abs(total), 50.0 * kEps * total_abs});
        if (total_err <= tol) break;
        if (splits >= spec.max_subdivisions) {
            const Complex v = sign * total;
            throw ConvergenceError("integrate_adaptive: no convergence after " +
                                       std::to_string(splits) + " subdivisions (error bound " +
                                       std::to_string(total_err) + ")",
                                   v.real(), v.imag(), total_err);
        }
        const detail::Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Panel cannot be split further in double precision; accept it as is.
            total_err -= worst.error;
            continue;
        }
        auto left = detail::gk15(f, worst.a, mid);
        auto right = detail::gk15(f, mid, worst.b);
        evals += 30;
        ++splits;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_abs += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
    }
    // Recompute the sum from the panels to shed accumulated update error.
    Complex sum{};
    double err = 0.0;
    while (!heap.empty()) {
        sum += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    return {sign * sum, err, evals, splits};
}

// ---------------------------------------------------------------------------
// ODE integration (Dormand-Prince 5(4) with local error control)

using ComplexVector = std::vector<Complex>;
using OdeRhs = std::function<ComplexVector(double, std::span<const Complex>)>;
using OdeObserver = std::function<void(double, std::span<const Complex>)>;

/// Integrates y' = rhs(t, y) from t0 to t1 (t1 < t0 allowed) and returns y(t1).
/// The observer, if given, sees every accepted step including both endpoints.
ComplexVector integrate_ode(const OdeRhs& rhs, double t0, double t1, ComplexVector y0,
                            const OdeSpec& spec, const OdeObserver& observer = {});

// ---------------------------------------------------------------------------
// Polynomials

/// Real roots of c4 x^4 + c3 x^3 + c2 x^2 + c1 x + c0, sorted ascending, repeated
/// roots collapsed. Degrades to lower degree when leading coefficients vanish.
std::vector<double> solve_quartic(double c4, double c3, double c2, double c1, double c0);

/// Evaluates the polynomial with coefficients ordered from the highest degree.
double poly_eval(std::span<const double> coeffs_high_first, double x);

// ---------------------------------------------------------------------------
// Gauss-Hermite rule for expectations over a standard normal:
// E[f(Z)] ~ sum_k weights[k] * f(nodes[k]); exact for polynomials of degree < 2n.

struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussHermiteRule gauss_hermite(int n);

/// Fixed Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int n);

}  // namespace adol
