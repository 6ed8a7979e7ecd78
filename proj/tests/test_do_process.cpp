#include <adol/do_process.hpp>
#include <adol/error.hpp>
#include <adol/numerics.hpp>

#include <doctest.h>

#include <cmath>

using namespace adol;

namespace {

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

struct Moments {
    double mean;
    double var;
    double se_mean;
    double se_var;
};

Moments column_moments(const PathMatrix& pm, std::size_t k) {
    const double n = static_cast<double>(pm.n_paths);
    double s = 0, s2 = 0;
    for (std::size_t p = 0; p < pm.n_paths; ++p) s += pm(p, k);
    const double mean = s / n;
    double m4 = 0;
    for (std::size_t p = 0; p < pm.n_paths; ++p) {
        const double d = pm(p, k) - mean;
        s2 += d * d;
        m4 += d * d * d * d;
    }
    const double var = s2 / (n - 1);
    return {mean, var, std::sqrt(var / n), std::sqrt((m4 / n - var * var) / n)};
}

}  // namespace

TEST_CASE("do_constants collapse at H = 1/2") {
    const DoConstants c = do_constants(0.5);
    CHECK(std::abs(c.alpha_h - 1.0) <= 1e-12);
    CHECK(std::abs(c.c_h - 1.0) <= 1e-12);
    CHECK(std::abs(c.b_h - 1.0) <= 1e-12);
    CHECK(std::abs(c.psi_scale - 1.0) <= 1e-12);
    CHECK(std::abs(c.d_h_sq) <= 1e-12);
}

TEST_CASE("do_constants against high-precision values") {
    const DoConstants c3 = do_constants(0.3);
    CHECK(rel_close(c3.alpha_h, 0.6895356129907763, 1e-12));
    CHECK(rel_close(c3.c_h, 1.0750886279058359, 1e-12));
    CHECK(rel_close(c3.psi_scale, 1.370539420189813, 1e-12));
    CHECK(rel_close(c3.b_h, 2.928671287828913, 1e-12));
    CHECK(rel_close(c3.d_h_sq, 0.054964260771394172, 1e-11));
    const DoConstants c4 = do_constants(0.4);
    CHECK(rel_close(c4.alpha_h, 0.9162813755724846, 1e-12));
    CHECK(rel_close(c4.c_h, 1.1266041937264267, 1e-12));
    CHECK(rel_close(c4.psi_scale, 1.0805653532217626, 1e-12));
    CHECK(rel_close(c4.b_h, 1.4356367967661712, 1e-12));
    CHECK(rel_close(c4.d_h_sq, 0.0098980917539956221, 1e-10));
}

TEST_CASE("do_constants domain") {
    CHECK_THROWS_AS(do_constants(0.0), DomainError);
    CHECK_THROWS_AS(do_constants(1.0), DomainError);
    for (double h = 0.05; h < 1.0; h += 0.05) {
        const DoConstants c = do_constants(h);
        CHECK(c.alpha_h > 0.0);
        CHECK(c.b_h > 0.0);
        CHECK(c.c_h > 0.0);
        CHECK(c.psi_scale > 0.0);
        CHECK(c.d_h_sq >= -1e-12);
    }
}

TEST_CASE("psi_h, nu_t and covariances") {
    const DoConstants c3 = do_constants(0.3);
    CHECK(psi_h(1.0, c3) == doctest::Approx(c3.psi_scale));
    CHECK(psi_h(0.5, do_constants(0.5)) == doctest::Approx(1.0));
    CHECK(rel_close(psi_h(0.25, c3), c3.psi_scale * std::pow(0.25, -0.4), 1e-14));
    CHECK_THROWS_AS(psi_h(0.0, c3), DomainError);

    CHECK(nu_t(0.7, do_constants(0.5)) == doctest::Approx(1.0));
    CHECK(nu_t(1.0, c3) == doctest::Approx(c3.b_h));
    CHECK(rel_close(nu_t(0.5, c3), c3.b_h * std::pow(0.5, -0.2), 1e-14));
    CHECK_THROWS_AS(nu_t(0.0, c3), DomainError);
    const double h = 1e-6;
    CHECK(rel_close(nu_prime(0.4, c3), (nu_t(0.4 + h, c3) - nu_t(0.4 - h, c3)) / (2 * h), 1e-8));

    CHECK(cov_m(0.0, 0.4, c3) == 0.0);
    CHECK(cov_m(0.8, 0.8, do_constants(0.5)) == doctest::Approx(0.8));
    CHECK(rel_close(cov_m(0.2, 0.7, c3), c3.c_h * c3.alpha_h * beta_sym(1.2) * std::pow(0.2, 1.4), 1e-14));

    CHECK(cov_fbm(0.6, 0.6, 0.3) == doctest::Approx(std::pow(0.6, 0.6)));
    CHECK(cov_fbm(0.2, 0.7, 0.5) == doctest::Approx(0.2));
    CHECK(cov_fbm(0.2, 0.7, 0.3) ==
          doctest::Approx(0.5 * (std::pow(0.7, 0.6) + std::pow(0.2, 0.6) - std::pow(0.5, 0.6))));
}

TEST_CASE("projection-variance identity") {
    for (double h = 0.05; h < 1.0; h += 0.05) {
        const DoConstants c = do_constants(h);
        for (double t : {0.01, 0.1, 0.5, 1.0, 3.0}) {
            const double lhs = std::pow(psi_h(t, c), 2) * cov_m(t, t, c);
            const double rhs = (1.0 - c.d_h_sq) * std::pow(t, 2 * h);
            CHECK(rel_close(lhs, rhs, 1e-10));
        }
    }
}

TEST_CASE("time grid validation") {
    CHECK_THROWS_AS(TimeGrid({0.0, 0.1}), DomainError);
    CHECK_THROWS_AS(TimeGrid({0.2, 0.1}), DomainError);
    const TimeGrid g = TimeGrid::uniform(0.1, 1.0, 10);
    CHECK(g.size() == 10);
    CHECK(g[9] == doctest::Approx(1.0));
}

TEST_CASE("simulate_mh moments and independence") {
    const DoConstants c = do_constants(0.3);
    const TimeGrid g({0.1, 0.3, 0.7});
    const PathMatrix m = simulate_mh(g, c, 100000, 11);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Moments mo = column_moments(m, k);
        CHECK(std::abs(mo.mean) <= 4 * mo.se_mean);
        CHECK(std::abs(mo.var - cov_m(g[k], g[k], c)) <= 4 * mo.se_var);
    }
    // covariance of M(0.3) with M(0.7) equals cov_m(0.3, 0.7)
    double s = 0;
    for (std::size_t p = 0; p < m.n_paths; ++p) s += m(p, 1) * m(p, 2);
    const double cov = s / m.n_paths;
    CHECK(std::abs(cov - cov_m(0.3, 0.7, c)) <= 4 * std::sqrt(cov_m(0.3, 0.3, c) * cov_m(0.7, 0.7, c) * 2 / m.n_paths));
    // increments are uncorrelated
    double sc = 0, sa = 0, sb = 0;
    for (std::size_t p = 0; p < m.n_paths; ++p) {
        const double a = m(p, 1) - m(p, 0), b = m(p, 2) - m(p, 1);
        sc += a * b;
        sa += a * a;
        sb += b * b;
    }
    const double corr = sc / std::sqrt(sa * sb);
    CHECK(std::abs(corr) <= 4.0 / std::sqrt(static_cast<double>(m.n_paths)));
}

TEST_CASE("simulate_vh variance identity") {
    for (double h : {0.3, 0.5}) {
        const DoConstants c = do_constants(h);
        const TimeGrid g({0.25, 1.0});
        const PathMatrix v = simulate_vh(g, c, 100000, 3);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const Moments mo = column_moments(v, k);
            CHECK(std::abs(mo.var - (1 - c.d_h_sq) * std::pow(g[k], 2 * h)) <= 4 * mo.se_var);
        }
    }
}

TEST_CASE("simulators are reproducible and thread-count independent") {
    const DoConstants c = do_constants(0.3);
    const TimeGrid g = TimeGrid::uniform(0.05, 1.0, 20);
    const PathMatrix a = simulate_vh(g, c, 1000, 99, 1);
    const PathMatrix b = simulate_vh(g, c, 1000, 99, 4);
    CHECK(a.data == b.data);
    const FbmPaths fa = simulate_fbm_exact(g, 0.3, 500, 5, 1);
    const FbmPaths fb = simulate_fbm_exact(g, 0.3, 500, 5, 3);
    CHECK(fa.paths.data == fb.paths.data);
}

TEST_CASE("simulate_fbm_exact variance and increment correlation") {
    const TimeGrid g = TimeGrid::uniform(0.1, 1.0, 10);
    const FbmPaths f = simulate_fbm_exact(g, 0.3, 50000, 17);
    CHECK(f.jitter <= 1e-12);
    const Moments last = column_moments(f.paths, 9);
    CHECK(std::abs(last.var - 1.0) <= 4 * last.se_var);
    // lag-1 increment correlation for H < 1/2 is 2^{2H-1} - 1 < 0
    double sc = 0, sa = 0, sb = 0;
    for (std::size_t p = 0; p < f.paths.n_paths; ++p) {
        const double a = f.paths(p, 5) - f.paths(p, 4), b = f.paths(p, 6) - f.paths(p, 5);
        sc += a * b;
        sa += a * a;
        sb += b * b;
    }
    const double corr = sc / std::sqrt(sa * sb);
    CHECK(corr < 0.0);
    CHECK(std::abs(corr - (std::pow(2.0, 2 * 0.3 - 1) - 1)) <= 4.0 / std::sqrt(50000.0));

    const FbmPaths bm = simulate_fbm_exact(g, 0.5, 50000, 17);
    sc = sa = sb = 0;
    for (std::size_t p = 0; p < bm.paths.n_paths; ++p) {
        const double a = bm.paths(p, 5) - bm.paths(p, 4), b = bm.paths(p, 6) - bm.paths(p, 5);
        sc += a * b;
        sa += a * a;
        sb += b * b;
    }
    CHECK(std::abs(sc / std::sqrt(sa * sb)) <= 4.0 / std::sqrt(50000.0));
}
