#include <adol/numerics.hpp>

#include <numbers>
#include <sstream>

namespace adol {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// sin(pi x) with argument reduction so that integers give exact zeros.
double sin_pi(double x) {
    const double r = x - 2.0 * std::round(0.5 * x);  // r in [-1, 1]
    if (r == 0.0 || std::abs(r) == 1.0) return 0.0;
    return std::sin(kPi * r);
}

// Series for 0 < |z| <= ~1 and all negative z; non-integer order.
Complex expint_series_nonint(double order, double z) {
    // E(v, z) = z^(v-1) Gamma(1-v) - sum_k (-z)^k / (k! (1 - v + k))
    double sum = 0.0;
    double term = 1.0;  // (-z)^k / k!
    for (int k = 0; k < 2000; ++k) {
        const double add = term / (1.0 - order + k);
        sum += add;
        if (std::abs(add) <= 1e-17 * std::abs(sum) && k > 2) break;
        term *= -z / (k + 1);
    }
    Complex power;
    if (z > 0.0) {
        power = std::pow(z, order - 1.0);
    } else {
        // principal branch: arg(z) = +pi
        power = std::polar(std::pow(-z, order - 1.0), kPi * (order - 1.0));
    }
    return power * gamma_fn(1.0 - order) - sum;
}

// Series for positive integer order n, principal logarithm for z < 0.
Complex expint_series_int(int n, double z) {
    const Complex log_z = z > 0.0 ? Complex(std::log(z), 0.0) : Complex(std::log(-z), kPi);
    // sum over k != n-1 of (-z)^k / ((k - n + 1) k!)
    double sum = 0.0;
    double term = 1.0;
    for (int k = 0; k < 2000; ++k) {
        if (k != n - 1) {
            const double add = term / (k - n + 1);
            sum += add;
            if (k > n && std::abs(add) <= 1e-17 * std::abs(sum)) break;
        }
        term *= -z / (k + 1);
    }
    double lead = 1.0;  // (-z)^(n-1) / (n-1)!
    for (int k = 1; k <= n - 1; ++k) lead *= -z / k;
    return lead * (-log_z + digamma_int(n)) - sum;
}

// Modified Lentz continued fraction, valid for z > 0 and any real order.
double expint_continued_fraction(double order, double z) {
    constexpr double kTiny = 1e-300;
    double b = z + order;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (order - 1.0 + i);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) return h * std::exp(-z);
    }
    throw ConvergenceError("exp_integral_e: continued fraction did not converge", h * std::exp(-z),
                           0.0, std::abs(h));
}

}  // namespace

void QuadratureSpec::validate() const {
    ADOL_REQUIRE(abs_tol > 0.0 && rel_tol > 0.0, ValidationError,
                 "QuadratureSpec: tolerances must be positive");
    ADOL_REQUIRE(max_subdivisions >= 1, ValidationError, "QuadratureSpec: max_subdivisions must be >= 1");
}

void OdeSpec::validate() const {
    ADOL_REQUIRE(abs_tol > 0.0 && rel_tol > 0.0 && max_step > 0.0, ValidationError,
                 "OdeSpec: tolerances and max_step must be positive");
}

double gamma_fn(double x) {
    if (is_nonpositive_integer(x)) {
        std::ostringstream os;
        os << "gamma_fn: pole at x = " << x;
        throw DomainError(os.str());
    }
    if (x < 0.5) return kPi / (sin_pi(x) * gamma_fn(1.0 - x));
    static constexpr std::array<double, 9> kLanczos = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    constexpr double kG = 7.0;
    const double xm = x - 1.0;
    double a = kLanczos[0];
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (xm + i);
    const double t = xm + kG + 0.5;
    return std::sqrt(2.0 * kPi) * std::pow(t, xm + 0.5) * std::exp(-t) * a;
}

double beta_sym(double x) {
    ADOL_REQUIRE(x > 0.0, DomainError, "beta_sym: argument must be positive");
    const double g = gamma_fn(x);
    return g * g / gamma_fn(2.0 * x);
}

double digamma_int(int n) {
    ADOL_REQUIRE(n >= 1, DomainError, "digamma_int: n must be >= 1");
    double s = -kEulerGamma;
    for (int k = 1; k < n; ++k) s += 1.0 / k;
    return s;
}

Complex exp_integral_e(double order, double z) {
    ADOL_REQUIRE(z != 0.0, DomainError, "exp_integral_e: singular at z = 0");
    ADOL_REQUIRE(std::isfinite(order) && std::isfinite(z), DomainError,
                 "exp_integral_e: non-finite argument");
    if (z > 1.0) return expint_continued_fraction(order, z);
    const bool integer_order = order >= 1.0 && order == std::floor(order);
    if (integer_order) return expint_series_int(static_cast<int>(order), z);
    return expint_series_nonint(order, z);
}

// ---------------------------------------------------------------------------

ComplexVector integrate_ode(const OdeRhs& rhs, double t0, double t1, ComplexVector y,
                            const OdeSpec& spec, const OdeObserver& observer) {
    spec.validate();
    if (observer) observer(t0, y);
    if (t0 == t1) return y;

    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const std::size_t n = y.size();
    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    double h = std::min(spec.max_step, span / 64.0);
    double t = t0;

    auto eval = [&](double tt, const ComplexVector& yy) {
        ComplexVector d = rhs(tt, yy);
        ADOL_REQUIRE(d.size() == n, NumericalError, "integrate_ode: rhs returned wrong size");
        for (const auto& v : d) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                std::ostringstream os;
                os << "integrate_ode: non-finite rhs at t = " << tt;
                throw NumericalError(os.str());
            }
        }
        return d;
    };

    ComplexVector k1 = eval(t, y);
    ComplexVector tmp(n), ynew(n);
    while (dir * (t1 - t) > 0.0) {
        const double min_step = 1e-14 * std::max(1.0, std::abs(t));
        if (h < min_step) {
            std::ostringstream os;
            os << "integrate_ode: step size underflow at t = " << t;
            throw NumericalError(os.str());
        }
        bool last = false;
        if (h >= std::abs(t1 - t)) {
            h = std::abs(t1 - t);
            last = true;
        }
        const double hs = dir * h;
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
        const ComplexVector k2 = eval(t + c2 * hs, tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        const ComplexVector k3 = eval(t + c3 * hs, tmp);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        const ComplexVector k4 = eval(t + c4 * hs, tmp);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        const ComplexVector k5 = eval(t + c5 * hs, tmp);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] =
                y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const double t_next = last ? t1 : t + hs;
        const ComplexVector k6 = eval(t + hs, tmp);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] =
                y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        const ComplexVector k7 = eval(t_next, ynew);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Complex e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                    e6 * k6[i] + e7 * k7[i]);
            const double scale =
                spec.abs_tol + spec.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err = std::max(err, std::abs(e) / scale);
        }
        if (err <= 1.0) {
            t = t_next;
            y = ynew;
            k1 = k7;
            if (observer) observer(t, y);
            if (last) break;
        }
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h = std::min(spec.max_step, h * factor);
    }
    return y;
}

// ---------------------------------------------------------------------------

double poly_eval(std::span<const double> coeffs, double x) {
    double acc = 0.0;
    for (double c : coeffs) acc = acc * x + c;
    return acc;
}

namespace {

Complex poly_eval_c(std::span<const double> coeffs, Complex x) {
    Complex acc = 0.0;
    for (double c : coeffs) acc = acc * x + c;
    return acc;
}

Complex poly_deriv_c(std::span<const double> coeffs, Complex x) {
    Complex acc = 0.0;
    const std::size_t deg = coeffs.size() - 1;
    for (std::size_t i = 0; i < deg; ++i) acc = acc * x + coeffs[i] * static_cast<double>(deg - i);
    return acc;
}

std::vector<Complex> quadratic_roots(Complex a, Complex b, Complex c) {
    const Complex disc = std::sqrt(b * b - 4.0 * a * c);
    // Avoid cancellation: pick the sign that adds magnitudes.
    const Complex q = -0.5 * (std::real(std::conj(b) * disc) >= 0.0 ? b + disc : b - disc);
    if (q == Complex(0.0)) return {Complex(0.0), Complex(0.0)};
    return {q / a, c / q};
}

std::vector<Complex> cubic_roots(double a, double b, double c, double d) {
    // monic: x^3 + A x^2 + B x + C
    const double A = b / a, B = c / a, C = d / a;
    const double P = B - A * A / 3.0;
    const double Q = 2.0 * A * A * A / 27.0 - A * B / 3.0 + C;
    const Complex root = std::sqrt(Complex(Q * Q / 4.0 + P * P * P / 27.0));
    Complex u3 = -Q / 2.0 + root;
    if (std::abs(u3) < std::abs(-Q / 2.0 - root)) u3 = -Q / 2.0 - root;
    const Complex u = std::pow(u3, 1.0 / 3.0);
    const Complex v = std::abs(u) > 0.0 ? -P / (3.0 * u) : Complex(0.0);
    const Complex w(-0.5, std::sqrt(3.0) / 2.0);
    const Complex shift = -A / 3.0;
    return {u + v + shift, w * u + std::conj(w) * v + shift, std::conj(w) * u + w * v + shift};
}

std::vector<Complex> quartic_roots_monic(double a, double b, double c, double d) {
    // x = y - a/4 gives y^4 + p y^2 + q y + r
    const double a2 = a * a;
    const double p = b - 3.0 * a2 / 8.0;
    const double q = c - a * b / 2.0 + a2 * a / 8.0;
    const double r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;
    const double shift = -a / 4.0;
    std::vector<Complex> ys;
    const double scale = std::max({1.0, std::abs(p), std::sqrt(std::abs(r))});
    if (std::abs(q) <= 1e-14 * scale * std::sqrt(scale)) {
        // biquadratic in y^2
        for (Complex y2 : quadratic_roots(1.0, p, r)) {
            const Complex y = std::sqrt(y2);
            ys.push_back(y);
            ys.push_back(-y);
        }
    } else {
        // Ferrari resolvent: 8 m^3 + 8 p m^2 + (2 p^2 - 8 r) m - q^2 = 0
        const auto ms = cubic_roots(8.0, 8.0 * p, 2.0 * p * p - 8.0 * r, -q * q);
        Complex m = ms[0];
        for (const auto& cand : ms)
            if (std::abs(cand) > std::abs(m)) m = cand;
        const Complex s = std::sqrt(2.0 * m);
        const Complex off = q / (2.0 * s);
        for (Complex y : quadratic_roots(1.0, -s, p / 2.0 + m + off)) ys.push_back(y);
        for (Complex y : quadratic_roots(1.0, s, p / 2.0 + m - off)) ys.push_back(y);
    }
    for (auto& y : ys) y += shift;
    return ys;
}

}  // namespace

std::vector<double> solve_quartic(double c4, double c3, double c2, double c1, double c0) {
    std::vector<double> coeffs{c4, c3, c2, c1, c0};
    const double cmax = std::max({std::abs(c4), std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
    if (cmax == 0.0) return {};
    // drop negligible leading coefficients
    std::size_t lead = 0;
    while (lead < coeffs.size() - 1 && std::abs(coeffs[lead]) <= 1e-14 * cmax) ++lead;
    coeffs.erase(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(lead));
    const std::size_t degree = coeffs.size() - 1;
    if (degree == 0) return {};

    std::vector<Complex> candidates;
    switch (degree) {
        case 1:
            candidates = {Complex(-coeffs[1] / coeffs[0])};
            break;
        case 2:
            candidates = quadratic_roots(coeffs[0], coeffs[1], coeffs[2]);
            break;
        case 3:
            candidates = cubic_roots(coeffs[0], coeffs[1], coeffs[2], coeffs[3]);
            break;
        default:
            candidates = quartic_roots_monic(coeffs[1] / coeffs[0], coeffs[2] / coeffs[0],
                                             coeffs[3] / coeffs[0], coeffs[4] / coeffs[0]);
    }

    // Newton polish in the complex plane.
    for (auto& z : candidates) {
        for (int it = 0; it < 8; ++it) {
            const Complex fz = poly_eval_c(coeffs, z);
            const Complex dz = poly_deriv_c(coeffs, z);
            if (std::abs(dz) == 0.0) break;
            const Complex next = z - fz / dz;
            if (std::abs(poly_eval_c(coeffs, next)) >= std::abs(fz)) break;
            z = next;
        }
    }

    const double bound = 1e-9 * cmax;
    std::vector<double> reals;
    for (const auto& z : candidates) {
        if (std::abs(z.imag()) > 1e-4 * std::max(1.0, std::abs(z.real()))) continue;
        double x = z.real();
        // real Newton polish
        for (int it = 0; it < 8; ++it) {
            const double fx = poly_eval(coeffs, x);
            const double dx = poly_deriv_c(coeffs, Complex(x)).real();
            if (dx == 0.0) break;
            const double next = x - fx / dx;
            if (std::abs(poly_eval(coeffs, next)) >= std::abs(fx)) break;
            x = next;
        }
        if (std::abs(poly_eval(coeffs, x)) <= bound) reals.push_back(x);
    }
    std::sort(reals.begin(), reals.end());

    // Collapse clusters of a repeated root: neighbours merge when the polynomial
    // stays below the residual bound at their midpoint.
    std::vector<double> out;
    std::size_t i = 0;
    while (i < reals.size()) {
        std::size_t j = i;
        double sum = reals[i];
        while (j + 1 < reals.size() &&
               std::abs(poly_eval(coeffs, 0.5 * (reals[j] + reals[j + 1]))) <= bound &&
               reals[j + 1] - reals[j] <= 1e-3 * std::max(1.0, std::abs(reals[j]))) {
            ++j;
            sum += reals[j];
        }
        out.push_back(sum / static_cast<double>(j - i + 1));
        i = j + 1;
    }
    return out;
}

// ---------------------------------------------------------------------------

GaussHermiteRule gauss_hermite(int n) {
    ADOL_REQUIRE(n >= 1, DomainError, "gauss_hermite: n must be >= 1");
    // Physicists' rule by Newton iteration on the orthonormal recurrence, then
    // rescaled to a standard normal weight.
    const double pim4 = 1.0 / std::pow(kPi, 0.25);
    std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    const int m = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * x[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * x[1];
        else
            z = 2.0 * z - x[static_cast<std::size_t>(i - 2)];
        double pp = 0.0;
        for (int its = 0; its < 100; ++its) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        x[static_cast<std::size_t>(i)] = z;
        x[static_cast<std::size_t>(n - 1 - i)] = -z;
        w[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
        w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
    }
    GaussHermiteRule rule;
    for (int i = n - 1; i >= 0; --i) {
        rule.nodes.push_back(std::sqrt(2.0) * x[static_cast<std::size_t>(i)]);
        rule.weights.push_back(w[static_cast<std::size_t>(i)] / std::sqrt(kPi));
    }
    if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

GaussLegendreRule gauss_legendre(int n) {
    ADOL_REQUIRE(n >= 1, DomainError, "gauss_legendre: n must be >= 1");
    GaussLegendreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int its = 0; its < 100; ++its) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15) break;
        }
        rule.nodes[static_cast<std::size_t>(i)] = -z;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = z;
        rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = rule.weights[static_cast<std::size_t>(i)];
    }
    return rule;
}

}  // namespace adol
