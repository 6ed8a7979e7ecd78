#include <adol/do_process.hpp>
#include <adol/error.hpp>
#include <adol/numerics.hpp>
#include <adol/parallel.hpp>
#include <adol/rng.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <sstream>

namespace adol {

namespace {

void require_hurst(double h) {
    if (!(h > 0.0 && h < 1.0)) {
        std::ostringstream os;
        os << "Hurst exponent must lie in (0, 1), got " << h;
        throw DomainError(os.str());
    }
}

}  // namespace

DoConstants do_constants(double h) {
    require_hurst(h);
    constexpr double pi = std::numbers::pi;
    DoConstants c;
    c.h = h;
    const double s = std::sin(pi * h);
    c.alpha_h = std::sqrt(gamma_fn(2.0 * h + 1.0) * gamma_fn(3.0 - 2.0 * h)) * s * s;
    const double g_half_minus = gamma_fn(1.5 - h);
    const double g_half_plus = gamma_fn(h + 0.5);
    c.c_h = c.alpha_h / (2.0 * h * g_half_minus * g_half_plus);
    c.psi_scale = gamma_fn(3.0 - 2.0 * h) / (c.c_h * g_half_minus * g_half_minus);
    c.b_h = std::pow(2.0, 3.0 - 4.0 * h) / (s * s * s * s) * gamma_fn(2.0 - h) /
            (g_half_minus * g_half_minus * gamma_fn(h));
    c.d_h_sq = 1.0 - 2.0 * h * gamma_fn(3.0 - 2.0 * h) * g_half_plus / g_half_minus;
    return c;
}

double psi_h(double t, const DoConstants& c) {
    if (t <= 0.0) {
        if (c.h < 0.5) throw DomainError("psi_h: singular at t <= 0 for H < 1/2");
        if (t < 0.0) throw DomainError("psi_h: negative time");
    }
    return c.psi_scale * std::pow(t, 2.0 * c.h - 1.0);
}

double cov_m(double s, double t, const DoConstants& c) {
    ADOL_REQUIRE(s >= 0.0 && t >= 0.0, DomainError, "cov_m: times must be non-negative");
    const double m = std::min(s, t);
    return c.c_h * c.alpha_h * beta_sym(1.5 - c.h) * std::pow(m, 2.0 - 2.0 * c.h);
}

double cov_fbm(double s, double t, double h) {
    require_hurst(h);
    ADOL_REQUIRE(s >= 0.0 && t >= 0.0, DomainError, "cov_fbm: times must be non-negative");
    const double e = 2.0 * h;
    return 0.5 * (std::pow(t, e) + std::pow(s, e) - std::pow(std::abs(t - s), e));
}

double nu_t(double t, const DoConstants& c) {
    if (c.h == 0.5) return c.b_h;
    ADOL_REQUIRE(t > 0.0, DomainError, "nu_t: requires t > 0 for H != 1/2");
    return c.b_h * std::pow(t, c.h - 0.5);
}

double nu_prime(double t, const DoConstants& c) {
    if (c.h == 0.5) return 0.0;
    ADOL_REQUIRE(t > 0.0, DomainError, "nu_prime: requires t > 0 for H != 1/2");
    return c.b_h * (c.h - 0.5) * std::pow(t, c.h - 1.5);
}

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    ADOL_REQUIRE(!times_.empty(), DomainError, "TimeGrid: empty");
    ADOL_REQUIRE(times_.front() > 0.0, DomainError, "TimeGrid: first time must be > 0");
    for (std::size_t i = 1; i < times_.size(); ++i)
        ADOL_REQUIRE(times_[i] > times_[i - 1], DomainError, "TimeGrid: times must increase strictly");
}

TimeGrid TimeGrid::uniform(double t_first, double t_last, std::size_t n) {
    ADOL_REQUIRE(n >= 1, DomainError, "TimeGrid::uniform: n must be >= 1");
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = n == 1 ? t_last : t_first + (t_last - t_first) * static_cast<double>(i) / static_cast<double>(n - 1);
    return TimeGrid(std::move(t));
}

PathMatrix simulate_mh(const TimeGrid& grid, const DoConstants& c, std::size_t n_paths,
                       std::uint64_t seed, int threads) {
    const std::size_t n = grid.size();
    std::vector<double> sd(n);
    double prev = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double var = cov_m(grid[k], grid[k], c);
        sd[k] = std::sqrt(var - prev);
        prev = var;
    }
    PathMatrix out{n_paths, n, std::vector<double>(n_paths * n)};
    parallel_for(n_paths, threads, [&](std::size_t p) {
        NormalStream normal(seed, p);
        double m = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            m += sd[k] * normal();
            out(p, k) = m;
        }
    });
    return out;
}

PathMatrix simulate_vh(const TimeGrid& grid, const DoConstants& c, std::size_t n_paths,
                       std::uint64_t seed, int threads) {
    PathMatrix paths = simulate_mh(grid, c, n_paths, seed, threads);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double scale = psi_h(grid[k], c);
        for (std::size_t p = 0; p < n_paths; ++p) paths(p, k) *= scale;
    }
    return paths;
}

FbmPaths simulate_fbm_exact(const TimeGrid& grid, double h, std::size_t n_paths,
                            std::uint64_t seed, int threads) {
    const std::size_t n = grid.size();
    ADOL_REQUIRE(n <= 4000, DomainError, "simulate_fbm_exact: grid too large for dense factorization");
    Eigen::MatrixXd cov(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cov_fbm(grid[i], grid[j], h);

    const double scale = cov.diagonal().maxCoeff();
    double jitter = 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    for (double rel : {1e-16, 1e-15, 1e-14, 1e-13, 1e-12}) {
        if (llt.info() == Eigen::Success) break;
        jitter = rel * scale;
        llt.compute(cov + jitter * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
    }
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
        std::ostringstream os;
        os << "simulate_fbm_exact: covariance not positive definite (smallest eigenvalue "
           << eig.eigenvalues().minCoeff() << ")";
        throw NumericalError(os.str());
    }
    const Eigen::MatrixXd lower = llt.matrixL();

    FbmPaths out{{n_paths, n, std::vector<double>(n_paths * n)}, jitter};
    parallel_for(n_paths, threads, [&](std::size_t p) {
        NormalStream normal(seed, p);
        Eigen::VectorXd z(static_cast<Eigen::Index>(n));
        for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = normal();
        const Eigen::VectorXd x = lower.triangularView<Eigen::Lower>() * z;
        for (std::size_t k = 0; k < n; ++k) out.paths(p, k) = x(static_cast<Eigen::Index>(k));
    });
    return out;
}

}  // namespace adol
