#include <adol/numerics.hpp>
#include <adol/rng.hpp>

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace adol;
using doctest::Approx;

namespace {
bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }
}  // namespace

TEST_CASE("gamma_fn known values") {
    CHECK(gamma_fn(1.0) == Approx(1.0).epsilon(1e-14));
    CHECK(rel_close(gamma_fn(0.5), std::sqrt(std::numbers::pi), 1e-13));
    // mpmath, 40 digits
    CHECK(rel_close(gamma_fn(2.2), 1.1018024908797128, 1e-13));
    CHECK(rel_close(gamma_fn(-0.5), -2.0 * std::sqrt(std::numbers::pi), 1e-13));
}

TEST_CASE("gamma_fn poles throw") {
    CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
    CHECK_THROWS_AS(gamma_fn(-2.0), DomainError);
}

TEST_CASE("gamma_fn recurrence on [0.1, 5]") {
    for (double x = 0.1; x <= 5.0; x += 0.037)
        CHECK(rel_close(gamma_fn(x + 1.0), x * gamma_fn(x), 1e-12));
}

TEST_CASE("beta_sym") {
    CHECK(beta_sym(1.0) == Approx(1.0).epsilon(1e-14));
    CHECK(rel_close(beta_sym(0.5), std::numbers::pi, 1e-13));
    CHECK(rel_close(beta_sym(1.2), 0.67867867070602623, 1e-12));
    const QuadResult q = integrate_adaptive(
        [](double t) { return std::pow(t, 0.2) * std::pow(1.0 - t, 0.2); }, 0.0, 1.0, {});
    CHECK(rel_close(beta_sym(1.2), q.value.real(), 1e-10));
    CHECK_THROWS_AS(beta_sym(0.0), DomainError);
}

TEST_CASE("exp_integral_e") {
    CHECK(rel_close(exp_integral_e(1.0, 1.0).real(), 0.21938393439552027, 1e-12));
    CHECK(rel_close(exp_integral_e(0.0, 1.0).real(), std::exp(-1.0), 1e-13));
    const Complex e = exp_integral_e(0.5, -0.3);
    CHECK(rel_close(e.real(), -2.2193645578561487, 1e-11));
    CHECK(rel_close(e.imag(), -3.2360431875928321, 1e-11));
    CHECK_THROWS_AS(exp_integral_e(0.5, 0.0), DomainError);
}

TEST_CASE("exp_integral_e(1, z) against its power series on (0, 1]") {
    for (double z = 0.05; z <= 1.0; z += 0.05) {
        double s = -0.57721566490153286 - std::log(z);
        double term = 1.0;
        for (int k = 1; k < 60; ++k) {
            term *= -z / k;
            s -= term / k;
        }
        CHECK(std::abs(exp_integral_e(1.0, z).real() - s) <= 1e-10);
    }
}

TEST_CASE("exp_integral_e continued fraction and series agree near z = 1") {
    for (double nu : {0.3, 0.5, 0.7, 1.6}) {
        const double a = exp_integral_e(nu, 0.999999).real();
        const double b = exp_integral_e(nu, 1.000001).real();
        CHECK(std::abs(a - b) <= 1e-5 * std::abs(a));
    }
}

TEST_CASE("integrate_adaptive basics") {
    CHECK(integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0, {}).value.real() ==
          Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(integrate_adaptive([](double x) { return std::pow(x, -0.2); }, 0.0, 1.0, {}).value.real() ==
          Approx(1.25).epsilon(1e-10));
    const double h = 0.3;
    CHECK(integrate_adaptive([&](double t) { return std::pow(t, h - 0.5); }, 0.0, 0.5, {})
              .value.real() == Approx(std::pow(0.5, 0.8) / 0.8).epsilon(1e-10));
    // reversed limits
    CHECK(integrate_adaptive([](double x) { return x; }, 1.0, 0.0, {}).value.real() ==
          Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("integrate_adaptive complex integrand") {
    auto f = [](double x) { return std::exp(Complex(0.0, 3.0) * x); };
    const Complex v = integrate_adaptive(f, 0.0, 2.0, {}).value;
    const Complex exact = (std::exp(Complex(0.0, 6.0)) - 1.0) / Complex(0.0, 3.0);
    CHECK(std::abs(v - exact) <= 1e-11);
}

TEST_CASE("integrate_adaptive is linear") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    QuadratureSpec spec;
    for (int trial = 0; trial < 20; ++trial) {
        const double c1 = U(rng), c2 = U(rng), c3 = U(rng), a = U(rng), b = U(rng);
        auto f = [&](double x) { return std::sin(c1 * x) + c2 * x * x; };
        auto g = [&](double x) { return std::exp(c3 * x) / (1.0 + x * x); };
        const double If = integrate_adaptive(f, -1.0, 2.0, spec).value.real();
        const double Ig = integrate_adaptive(g, -1.0, 2.0, spec).value.real();
        const double Ih = integrate_adaptive([&](double x) { return a * f(x) + b * g(x); }, -1.0, 2.0, spec)
                              .value.real();
        const double tol = std::abs(a) * std::max(spec.abs_tol, spec.rel_tol * std::abs(If)) +
                           std::abs(b) * std::max(spec.abs_tol, spec.rel_tol * std::abs(Ig)) +
                           std::max(spec.abs_tol, spec.rel_tol * std::abs(Ih));
        CHECK(std::abs(Ih - a * If - b * Ig) <= tol);
    }
}

TEST_CASE("integrate_adaptive reports non-convergence with best estimate") {
    QuadratureSpec spec;
    spec.max_subdivisions = 3;
    try {
        integrate_adaptive([](double x) { return std::sin(200.0 * x) * std::exp(x); }, 0.0, 10.0, spec);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.error_bound() > 0.0);
        CHECK(std::isfinite(e.best_re()));
    }
}

TEST_CASE("integrate_adaptive rejects non-finite integrands") {
    CHECK_THROWS_AS(integrate_adaptive([](double) { return std::nan(""); }, 0.0, 1.0, {}),
                    NumericalError);
}

TEST_CASE("quadrature and ode specs validate") {
    QuadratureSpec q;
    q.abs_tol = 0.0;
    CHECK_THROWS_AS(q.validate(), ValidationError);
    OdeSpec o;
    o.max_step = -1.0;
    CHECK_THROWS_AS(o.validate(), ValidationError);
}

TEST_CASE("integrate_ode scalar problems") {
    const OdeSpec spec;
    auto grow = [](double, std::span<const Complex> y) { return ComplexVector{y[0]}; };
    CHECK(integrate_ode(grow, 0.0, 1.0, {1.0}, spec)[0].real() == Approx(std::exp(1.0)).epsilon(1e-9));
    const double kappa = 2.0;
    auto decay = [&](double, std::span<const Complex> y) { return ComplexVector{-2.0 * kappa * y[0]}; };
    CHECK(integrate_ode(decay, 0.0, 0.5, {1.0}, spec)[0].real() == Approx(std::exp(-2.0)).epsilon(1e-9));
    // backward in time
    CHECK(integrate_ode(decay, 0.5, 0.0, {std::exp(-2.0)}, spec)[0].real() ==
          Approx(1.0).epsilon(1e-9));
}

TEST_CASE("integrate_ode coupled linear system against its closed form") {
    // y1' = -y1 + 2 y2, y2' = -3 y2: y2 = e^{-3t}, y1 = 2 e^{-t} - e^{-3t} for y(0) = (1, 1)
    auto rhs = [](double, std::span<const Complex> y) {
        return ComplexVector{-y[0] + 2.0 * y[1], -3.0 * y[1]};
    };
    const ComplexVector y = integrate_ode(rhs, 0.0, 1.3, {1.0, 1.0}, {});
    CHECK(std::abs(y[0] - (2.0 * std::exp(-1.3) - std::exp(-3.9))) <= 1e-9);
    CHECK(std::abs(y[1] - std::exp(-3.9)) <= 1e-10);
}

TEST_CASE("integrate_ode observer sees endpoints") {
    std::vector<double> seen;
    integrate_ode([](double, std::span<const Complex> y) { return ComplexVector{-y[0]}; }, 0.0, 1.0,
                  {1.0}, {}, [&](double t, std::span<const Complex>) { seen.push_back(t); });
    REQUIRE(seen.size() >= 2);
    CHECK(seen.front() == 0.0);
    CHECK(seen.back() == 1.0);
}

TEST_CASE("integrate_ode non-finite rhs") {
    auto bad = [](double, std::span<const Complex>) { return ComplexVector{Complex(std::nan(""), 0)}; };
    CHECK_THROWS_AS(integrate_ode(bad, 0.0, 1.0, {1.0}, {}), NumericalError);
}

TEST_CASE("solve_quartic simple cases") {
    auto r = solve_quartic(1, 0, 0, 0, -1);
    REQUIRE(r.size() == 2);
    CHECK(r[0] == Approx(-1.0));
    CHECK(r[1] == Approx(1.0));
    r = solve_quartic(1, -8, 24, -32, 16);  // (x - 2)^4
    REQUIRE(r.size() == 1);
    CHECK(r[0] == Approx(2.0).epsilon(1e-6));
    r = solve_quartic(0, 0, 1, -3, 2);  // degrades to quadratic
    REQUIRE(r.size() == 2);
    CHECK(r[0] == Approx(1.0));
    CHECK(r[1] == Approx(2.0));
    CHECK(solve_quartic(1, 0, 0, 0, 1).empty());
}

TEST_CASE("solve_quartic matches companion-matrix eigenvalues") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(-5.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double c[4] = {U(rng), U(rng), U(rng), U(rng)};  // x^4 + c0 x^3 + c1 x^2 + c2 x + c3
        Eigen::Matrix4d comp = Eigen::Matrix4d::Zero();
        comp(0, 0) = -c[0];
        comp(0, 1) = -c[1];
        comp(0, 2) = -c[2];
        comp(0, 3) = -c[3];
        comp(1, 0) = comp(2, 1) = comp(3, 2) = 1.0;
        const Eigen::Vector4cd ev = comp.eigenvalues();
        std::vector<double> expected;
        for (int i = 0; i < 4; ++i)
            if (std::abs(ev[i].imag()) < 1e-7) expected.push_back(ev[i].real());
        std::sort(expected.begin(), expected.end());
        const auto roots = solve_quartic(1.0, c[0], c[1], c[2], c[3]);
        const double cmax = std::max({1.0, std::abs(c[0]), std::abs(c[1]), std::abs(c[2]), std::abs(c[3])});
        const double coeffs[5] = {1.0, c[0], c[1], c[2], c[3]};
        for (double x : roots) CHECK(std::abs(poly_eval(coeffs, x)) <= 1e-9 * cmax);
        // every simple real eigenvalue is found
        for (double e : expected) {
            double best = 1e300;
            for (double x : roots) best = std::min(best, std::abs(x - e));
            CHECK(best <= 1e-6 * std::max(1.0, std::abs(e)));
        }
    }
}

TEST_CASE("gauss_hermite integrates normal moments") {
    const auto r = gauss_hermite(6);
    double m0 = 0, m2 = 0, m4 = 0, m10 = 0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        const double x = r.nodes[i];
        m0 += r.weights[i];
        m2 += r.weights[i] * x * x;
        m4 += r.weights[i] * std::pow(x, 4);
        m10 += r.weights[i] * std::pow(x, 10);
    }
    CHECK(m0 == Approx(1.0).epsilon(1e-13));
    CHECK(m2 == Approx(1.0).epsilon(1e-12));
    CHECK(m4 == Approx(3.0).epsilon(1e-12));
    CHECK(m10 == Approx(945.0).epsilon(1e-10));
}

TEST_CASE("gauss_legendre integrates polynomials exactly") {
    const auto r = gauss_legendre(8);
    double s = 0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 14);
    CHECK(s == Approx(2.0 / 15.0).epsilon(1e-13));
}

TEST_CASE("rng streams are reproducible and distinct") {
    NormalStream a(1, 5), b(1, 5), c(1, 6);
    const double x = a();
    CHECK(x == b());
    CHECK(x != c());
}
