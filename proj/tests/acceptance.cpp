// One PASS/FAIL line per acceptance criterion; exit status 1 if any line fails.

#include <adol/charfn.hpp>
#include <adol/do_process.hpp>
#include <adol/montecarlo.hpp>
#include <adol/pricing.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace adol;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& name, const std::string& detail) {
    std::printf("%s  [%2d] %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double table1_variance(const AdolModel& m) {
    return m.sigma0 * m.sigma0 * (1.0 - std::exp(-2.0 * m.kappa * m.t_mat)) / (2.0 * m.kappa);
}

void j_criteria() {
    const AdolModel m = AdolModel::table1();
    const auto t0 = std::chrono::steady_clock::now();
    const GreenPieces g(m);
    double worst = 0.0, sum = 0.0, a2_max = -INFINITY;
    const int n = 100;
    for (int i = 0; i < n; ++i) {
        const double chi = 0.05 * m.t_mat + 0.95 * m.t_mat * i / (n - 1);
        const double vs = g.alpha1(chi) * m.v0 + 2.0 * g.tau(chi);
        const double om = std::exp(m.kappa * chi) * m.sigma0 * m.v0;
        const JResult q = j_integral(vs, om, chi, g, JMethod::quadrature);
        const JResult a = j_integral(vs, om, chi, g, JMethod::quadratic_at_varsigma);
        const double bps = 1e4 * std::abs(a.value - q.value) / std::abs(q.value);
        worst = std::max(worst, bps);
        sum += bps;
        a2_max = std::max(a2_max, a.expansion.a2);
    }
    const double elapsed = seconds_since(t0);
    report(1, worst <= 10.0 && worst >= 2.5 && elapsed < 10.0, "J quadratic approximation",
           fmt("max %.3f bps, mean %.3f bps over %d chi points (limit 10, typical ~5), %.2f s", worst,
               sum / n, n, elapsed));
    report(2, a2_max < 0.0, "a2 negativity", fmt("max a2 = %.6g over %d chi points", a2_max, n));
}

void do_criterion() {
    double worst = 0.0, worst_h = 0.0;
    for (int i = 40; i <= 99; ++i) {
        const double h = i / 100.0;
        const double d = std::sqrt(std::max(0.0, do_constants(h).d_h_sq));
        if (d > worst) {
            worst = d;
            worst_h = h;
        }
    }
    const double d_half = std::abs(do_constants(0.5).d_h_sq);
    report(3, worst <= 0.12 && d_half <= 1e-12, "DO approximation quality",
           fmt("max sqrt(d^2) = %.4f at H = %.2f (limit 0.12); |d^2(0.5)| = %.1e", worst, worst_h, d_half));
}

void normalization_criterion() {
    AdolModel m = AdolModel::table1();
    m.xi = 0.05;
    double worst = 0.0;
    for (CfMode mode : {CfMode::closed_form, CfMode::affine_ode})
        for (int order : {0, 1, 2}) {
            CorrectionConfig cfg;
            cfg.mode = mode;
            cfg.order = order;
            worst = std::max(worst, std::abs(cf_total(0.0, m, cfg) - 1.0));
        }
    report(4, worst <= 1e-12, "CF normalization", fmt("max |cf(0) - 1| = %.2e over 2 modes x 3 orders", worst));
}

void bs_limit_criterion() {
    const AdolModel m = AdolModel::table1();
    const double w = table1_variance(m);
    double cf_gap = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double u = -20.0 + 0.1 * i;
        cf_gap = std::max(cf_gap, std::abs(cf_zero(u, m, CfMode::affine_ode) - bs_cf(u, m.r, m.q, m.t_mat, w)));
    }
    const CharFn cf = [&](Complex u) { return cf_zero(u, m, CfMode::affine_ode); };
    double price_gap = 0.0;
    for (int i = 0; i <= 40; ++i) {
        const double k = 0.8 + 0.01 * i;
        price_gap = std::max(price_gap, std::abs(fourier_price(cf, m.s0, k * m.s0, m.r, m.q, m.t_mat, {}, true) -
                                                 bs_price(m.s0, k * m.s0, m.r, m.q, w, true, m.t_mat)));
    }
    report(5, cf_gap <= 1e-8 && price_gap <= 1e-6 * m.s0, "Black-Scholes limit",
           fmt("max CF gap %.2e on u in [-20, 20]; max price gap %.2e on K/S in [0.8, 1.2]", cf_gap, price_gap));
}

void mc_criterion() {
    AdolModel m = AdolModel::table1();
    m.xi = 0.05;
    const SmallParamReport sp = small_param_check(m);
    CorrectionConfig cfg;
    cfg.order = 1;
    const auto t0 = std::chrono::steady_clock::now();
    const CfEngine e(m, cfg);
    const double cf_price = fourier_price([&](Complex u) { return e.total(u); }, m.s0, m.s0, m.r, m.q,
                                          m.t_mat, {}, true);
    McSpec spec;
    spec.n_paths = 100000;
    spec.n_steps = 500;
    const PathStats mc = mc_price(m, spec, m.s0, true);
    const double elapsed = seconds_since(t0);
    const double z = std::abs(cf_price - mc.estimate) / mc.std_error;
    report(6, sp.admissible && z <= 3.0 && elapsed < 60.0, "Monte Carlo cross-check",
           fmt("cf order 1 %.6f vs MC %.6f +- %.6f (%.2f SE, seed %llu); xi %.2f vs bound %.3f; %.1f s", cf_price,
               mc.estimate, mc.std_error, z, static_cast<unsigned long long>(spec.seed), m.xi, sp.f_ht, elapsed));
}

void projection_criterion() {
    double worst = 0.0;
    for (int i = 1; i <= 19; ++i) {
        const double h = 0.05 * i;
        const DoConstants c = do_constants(h);
        for (double t : {0.01, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0}) {
            const double lhs = std::pow(psi_h(t, c), 2) * cov_m(t, t, c);
            const double rhs = (1.0 - c.d_h_sq) * std::pow(t, 2.0 * h);
            worst = std::max(worst, std::abs(lhs - rhs) / rhs);
        }
    }
    double worst_se = 0.0;
    for (double h : {0.3, 0.7}) {
        const DoConstants c = do_constants(h);
        const TimeGrid grid({0.1, 0.5, 1.0});
        const std::size_t n = 100000;
        const PathMatrix v = simulate_vh(grid, c, n, 2024);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            double s = 0.0;
            for (std::size_t p = 0; p < n; ++p) s += v(p, k);
            const double mean = s / n;
            double s2 = 0.0, s4 = 0.0;
            for (std::size_t p = 0; p < n; ++p) {
                const double d = v(p, k) - mean;
                s2 += d * d;
                s4 += d * d * d * d;
            }
            const double var = s2 / (n - 1);
            const double se = std::sqrt((s4 / n - var * var) / n);
            const double target = (1.0 - c.d_h_sq) * std::pow(grid[k], 2.0 * h);
            worst_se = std::max(worst_se, std::abs(var - target) / se);
        }
    }
    report(7, worst <= 1e-10 && worst_se <= 4.0, "projection-variance identity",
           fmt("max relative error %.2e on 19 x 7 (H, t) grid; simulated variance within %.2f SE", worst,
               worst_se));
}

void varswap_criterion() {
    const AdolModel m = AdolModel::table1();
    const double oracle = m.sigma0 * m.sigma0 * (1.0 - std::exp(-2.0 * m.kappa * m.t_mat)) /
                          (2.0 * m.kappa * m.t_mat);
    VarSwapSpec spec;
    spec.observation_times = {0.125, 0.25, 0.375, 0.5};
    CorrectionConfig cfg;
    cfg.order = 0;
    const VarSwapResult vs = varswap_strike(m, spec, cfg);
    McSpec mc;
    mc.n_paths = 100000;
    mc.n_steps = 500;
    const PathStats qv = mc_quadratic_variation(m, mc, spec.observation_times);
    const double rel = std::abs(vs.strike - oracle) / oracle;
    const double z = std::abs(vs.strike - qv.estimate) / std::hypot(qv.std_error, vs.std_error);
    report(8, rel <= 0.01 && z <= 3.0, "variance swap",
           fmt("strike %.6f vs integrated variance %.6f (%.3f%%); MC %.6f +- %.6f (%.2f SE)", vs.strike, oracle,
               100 * rel, qv.estimate, qv.std_error, z));
}

void closed_form_criterion() {
    const AdolModel m = AdolModel::table1();
    const DoConstants c = m.constants();
    double beta_gap = 0.0;
    for (double a : {0.0, 0.1, 0.3})
        for (double b : {0.35, 0.5}) {
            const QuadResult q = integrate_adaptive(
                [&](double s) { return Complex((m.kappa + m_t(s, m)) / nu_t(s, c)); }, a, b,
                QuadratureSpec{1e-15, 1e-13, 4000});
            beta_gap = std::max(beta_gap, std::abs(kappa_m_over_nu(a, b, m) - q.value.real()) / q.value.real());
        }
    const GreenPieces g(m);
    double tau_gap = 0.0, verbatim_gap = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double t = m.t_mat * i / 50.0;
        const double q = g.tau(t);
        tau_gap = std::max(tau_gap, std::abs(g.tau_closed_form(t) - q) / q);
        verbatim_gap = std::max(verbatim_gap, std::abs(g.tau_closed_form_verbatim(t) - q) / q);
    }
    std::string note = tau_gap > 1e-6 ? "tau breach logged" : "tau within 1e-6";
    report(9, beta_gap <= 1e-10, "closed form vs quadrature",
           fmt("beta integral gap %.2e; tau closed-form gap %.2e (%s); printed tau expression gap %.2e (logged)",
               beta_gap, tau_gap, note.c_str(), verbatim_gap));
}

void residual_criterion() {
    const AdolModel m = AdolModel::table1();
    const auto pts = random_interior_points(m, 100, 2718);
    const Complex u(1.0, 0.0);
    const CfCoefficients ca = coeffs_affine_ode(u, m);
    const CfCoefficients cp = coeffs_closed_form(u, m);
    const ResidualStats ra =
        pde_residual([&](double t, double s, double v) { return std::exp(ca.exponent(t, s, v)); }, u, m, pts);
    const ResidualStats rp =
        pde_residual([&](double t, double s, double v) { return std::exp(cp.exponent(t, s, v)); }, u, m, pts);
    report(10, ra.max_normalized <= 1e-6, "PDE residual",
           fmt("affine-ode max %.2e mean %.2e at %zu points; closed-form mode max %.2e mean %.2e (reported)",
               ra.max_normalized, ra.mean_normalized, ra.points, rp.max_normalized, rp.mean_normalized));
}

}  // namespace

int main() {
    const std::vector<void (*)()> criteria{j_criteria,         do_criterion,         normalization_criterion,
                                           bs_limit_criterion, mc_criterion,         projection_criterion,
                                           varswap_criterion,  closed_form_criterion, residual_criterion};
    for (auto f : criteria) {
        try {
            f();
        } catch (const std::exception& e) {
            std::printf("FAIL  criterion raised: %s\n", e.what());
            ++failures;
        }
    }
    std::printf("%d criterion line(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
