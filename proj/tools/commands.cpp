#include "commands.hpp"

#include <adol/error.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <map>
#include <optional>

namespace adol::cli {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
const double kNan = std::numeric_limits<double>::quiet_NaN();

template <class... A>
std::string fmt(const char* f, A... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return fmt("%.15g", x);
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

class Table {
public:
    explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

    Table& row() {
        rows_.emplace_back();
        return *this;
    }
    Table& operator<<(double x) { return cell(num(x)); }
    Table& operator<<(int x) { return cell(std::to_string(x)); }
    Table& operator<<(std::size_t x) { return cell(std::to_string(x)); }
    Table& operator<<(bool x) { return cell(x ? "true" : "false"); }
    Table& operator<<(const std::string& s) { return cell(s); }
    Table& operator<<(const char* s) { return cell(s); }

    void write(const Context& ctx, const std::string& command, const std::string& file) const {
        const auto path = ctx.out / file;
        std::ofstream o(path);
        if (!o) throw ValidationError("cannot write '" + path.string() + "'");
        o << "# adol " << command << " version=" << kVersion << " format=" << ctx.cfg.output.format_version
          << " generated=" << utc_now() << "\n";
        line(o, header_);
        for (const auto& r : rows_) {
            if (r.size() != header_.size()) throw NumericalError("internal: ragged table " + file);
            line(o, r);
        }
    }

private:
    Table& cell(std::string s) {
        rows_.back().push_back(std::move(s));
        return *this;
    }
    static void line(std::ofstream& o, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) o << (i ? "," : "") << quote(cells[i]);
        o << "\r\n";
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Lognormal total variance when sigma is deterministic (xi = 0, theta = 0).
std::optional<double> deterministic_variance(const AdolModel& m) {
    if (m.xi != 0.0 || m.theta != 0.0) return std::nullopt;
    return m.sigma0 * m.sigma0 * -std::expm1(-2.0 * m.kappa * m.t_mat) / (2.0 * m.kappa);
}

double safe_iv(double price, const AdolModel& m, double k, bool call) {
    try {
        return implied_vol(price, m.s0, k, m.r, m.q, m.t_mat, call);
    } catch (const DomainError&) {
        return kNan;
    }
}

std::optional<Complex> closed_form_cf(Complex u, const AdolModel& m) {
    try {
        return cf_zero(u, m, CfMode::closed_form);
    } catch (const DomainError&) {
        return std::nullopt;
    }
}

// Point of the worked J example at a given chi.
struct JPoint {
    double chi, varsigma, omega, k;
};

JPoint j_point(const GreenPieces& g, double chi) {
    const AdolModel& m = g.model();
    const double vs = g.alpha1(chi) * m.v0 + 2.0 * g.tau(chi);
    const double om = std::exp(m.kappa * chi) * m.sigma0 * m.v0;
    return {chi, vs, om, j_k(om, chi, 1.0, g)};
}

void integrand_surface(Context& ctx, const GreenPieces& g, double chi_lo, const std::string& file) {
    const double T = ctx.cfg.model.t_mat;
    Table t({"chi", "varsigma_prime", "integrand", "integrand_scaled"});
    for (double chi : linspace(chi_lo, T, 50)) {
        const JPoint p = j_point(g, chi);
        const double half = 6.0 * std::sqrt(2.0 * chi);
        for (double x : linspace(p.varsigma + 2 * chi - half, p.varsigma + 2 * chi + half, 81)) {
            const double e = j_exponent(x, p.varsigma, p.k, chi, 0.0);
            t.row() << chi << x << std::exp(e) << std::exp(e - p.varsigma - chi);
        }
    }
    t.write(ctx, "figures", file);
}

void f_surface(Context& ctx, const std::vector<double>& hs, const std::string& file, bool& decreasing) {
    Table t({"h", "t", "f"});
    for (double h : hs) {
        double prev = INFINITY;
        for (int i = 1; i <= 20; ++i) {
            const double tt = 0.05 * i;
            const double f = small_param_bound(h, tt);
            decreasing = decreasing && f < prev;
            prev = f;
            t.row() << h << tt << f;
        }
    }
    t.write(ctx, "figures", file);
}

json residual_json(const ResidualStats& r) {
    return {{"max_normalized", r.max_normalized}, {"mean_normalized", r.mean_normalized}, {"points", r.points}};
}

}  // namespace

void Context::check(const std::string& command, const std::string& name, bool ok, const std::string& detail) {
    checks.push_back({command, name, ok, detail});
}

void cmd_constants(Context& ctx) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& k = ctx.cfg.constants;
    const double T = ctx.cfg.model.t_mat;
    Table t({"h", "alpha_h", "c_h", "b_h", "d_h_sq", "d_h", "psi_scale", "f_ht", "d_le_0_12"});
    bool flags_ok = true;
    double worst = 0.0;
    for (double h : linspace(k.h_min, k.h_max, k.h_points)) {
        h = std::round(h * 1e12) / 1e12;
        const DoConstants c = do_constants(h);
        const double d = std::sqrt(std::max(0.0, c.d_h_sq));
        const bool flag = d <= 0.12;
        if (h >= 0.4) {
            flags_ok = flags_ok && flag;
            worst = std::max(worst, d);
        }
        t.row() << h << c.alpha_h << c.c_h << c.b_h << c.d_h_sq << d << c.psi_scale << small_param_bound(h, T)
                << flag;
    }
    t.write(ctx, "constants", "constants.csv");
    const double elapsed = seconds_since(t0);

    const DoConstants half = do_constants(0.5);
    const double collapse = std::max({std::abs(half.alpha_h - 1), std::abs(half.c_h - 1), std::abs(half.b_h - 1),
                                      std::abs(half.psi_scale - 1), std::abs(half.d_h_sq)});
    ctx.check("constants", "H = 0.5 collapse", collapse <= 1e-12, fmt("max deviation %.2e", collapse));
    ctx.check("constants", "d_H <= 0.12 on [0.4, 1)", flags_ok, fmt("max d_H on grid %.4f", worst));
    ctx.check("constants", "runtime", elapsed < 1.0, fmt("%.3f s for %d points", elapsed, k.h_points));
}

void cmd_figures(Context& ctx) {
    const AdolModel& m = ctx.cfg.model;
    const GreenPieces g(m);
    const double T = m.t_mat;

    integrand_surface(ctx, g, 0.01 * T, "fig1_j_integrand.csv");
    integrand_surface(ctx, g, std::min(0.3, 0.6 * T), "fig2_j_integrand_zoom.csv");

    Table f3({"chi", "varsigma", "omega", "k", "j_quadrature", "j_quadratic_varsigma", "j_quadratic_stationary",
              "diff_pct", "diff_bps", "diff_stationary_bps", "quadrature_error"});
    double worst = 0.0, sum = 0.0;
    const auto chis = linspace(0.05 * T, T, 100);
    for (double chi : chis) {
        const JPoint p = j_point(g, chi);
        const JResult q = j_integral(p.varsigma, p.omega, chi, g, JMethod::quadrature);
        const JResult a = j_integral(p.varsigma, p.omega, chi, g, JMethod::quadratic_at_varsigma);
        double s = kNan;
        try {
            s = j_integral(p.varsigma, p.omega, chi, g, JMethod::quadratic_at_stationary).value.real();
        } catch (const NumericalError&) {
        }
        const double rel = std::abs(a.value - q.value) / std::abs(q.value);
        worst = std::max(worst, 1e4 * rel);
        sum += 1e4 * rel;
        f3.row() << chi << p.varsigma << p.omega << p.k << q.value.real() << a.value.real() << s << 100 * rel
                 << 1e4 * rel << 1e4 * std::abs(s - q.value.real()) / std::abs(q.value) << q.error;
    }
    f3.write(ctx, "figures", "fig3_j_difference.csv");

    Table f4({"chi", "a0", "a1", "a2"});
    double a2_max = -INFINITY;
    for (int i = 1; i <= 100; ++i) {
        const double chi = T * i / 100.0;
        const JPoint p = j_point(g, chi);
        const JExpansion e = j_expand(p.varsigma, p.varsigma, p.k, chi, 0.0);
        a2_max = std::max(a2_max, e.a2);
        f4.row() << chi << e.a0 << e.a1 << e.a2;
    }
    f4.write(ctx, "figures", "fig4_a2.csv");

    bool decreasing = true;
    std::vector<double> wide, zoom;
    for (int i = 1; i <= 19; ++i) wide.push_back(0.05 * i);
    for (int i = 1; i <= 30; ++i) zoom.push_back(0.01 * i);
    f_surface(ctx, wide, "fig5_f_ht.csv", decreasing);
    f_surface(ctx, zoom, "fig6_f_ht_zoom.csv", decreasing);

    ctx.check("figures", "fig3 max difference <= 10 bps", worst <= 10.0,
              fmt("max %.3f bps, mean %.3f bps", worst, sum / chis.size()));
    ctx.check("figures", "fig4 a2 < 0", a2_max < 0.0, fmt("max a2 %.6g", a2_max));
    ctx.check("figures", "fig5/6 f decreasing in T", decreasing, decreasing ? "all rows" : "violated");
}

void cmd_cf(Context& ctx) {
    const AdolModel& m = ctx.cfg.model;
    const CfBlock& b = ctx.cfg.cf;
    const CfEngine e(m, b.cfg);
    const auto w = deterministic_variance(m);
    Table t({"u", "closed_form_re", "closed_form_im", "affine_re", "affine_im", "total_re", "total_im", "order", "mode_gap"});
    double bs_gap = 0.0, conj_gap = 0.0;
    for (double u : linspace(b.u_min, b.u_max, b.u_points)) {
        const auto p = closed_form_cf(u, m);
        const Complex a = cf_zero(u, m, CfMode::affine_ode);
        const Complex z = e.total(u);
        if (w) bs_gap = std::max(bs_gap, std::abs(a - bs_cf(u, m.r, m.q, m.t_mat, *w)));
        conj_gap = std::max(conj_gap, std::abs(cf_zero(-u, m, CfMode::affine_ode) - std::conj(a)));
        t.row() << u << (p ? p->real() : kNan) << (p ? p->imag() : kNan) << a.real() << a.imag() << z.real()
                << z.imag() << b.cfg.order << (p ? std::abs(*p - a) : kNan);
    }
    t.write(ctx, "cf", "cf.csv");

    const double norm = std::abs(e.total(0.0) - 1.0);
    ctx.check("cf", "normalization", norm <= 1e-12, fmt("|cf(0) - 1| = %.2e", norm));
    ctx.check("cf", "affine conjugate symmetry", conj_gap <= 1e-10, fmt("max gap %.2e", conj_gap));
    if (w) ctx.check("cf", "affine vs lognormal CF", bs_gap <= 1e-8, fmt("max gap %.2e", bs_gap));
}

void cmd_price(Context& ctx) {
    const AdolModel& m = ctx.cfg.model;
    const PricingBlock& pb = ctx.cfg.pricing;
    const auto& strikes = pb.strikes;
    const auto w = deterministic_variance(m);
    const double df = std::exp(-m.r * m.t_mat);

    std::vector<std::vector<double>> cf_prices;
    for (int o = 0; o <= ctx.cfg.cf.cfg.order; ++o) {
        CorrectionConfig cfg = ctx.cfg.cf.cfg;
        cfg.order = o;
        const CfEngine e(m, cfg);
        // strikes share most contour nodes, so remember every evaluation
        std::map<std::pair<double, double>, Complex> memo;
        const CharFn cf = [&](Complex u) {
            const auto key = std::make_pair(u.real(), u.imag());
            auto it = memo.find(key);
            if (it == memo.end()) it = memo.emplace(key, e.total(u)).first;
            return it->second;
        };
        std::vector<double> v;
        if (pb.method == "fft") {
            for (const auto& p : fourier_ladder_fft(cf, m.s0, strikes, m.r, m.q, m.t_mat, pb.spec))
                v.push_back(pb.is_call ? p.call : p.put);
        } else {
            for (double k : strikes) v.push_back(fourier_price(cf, m.s0, k, m.r, m.q, m.t_mat, pb.spec, pb.is_call));
        }
        cf_prices.push_back(std::move(v));
    }

    std::vector<PathStats> mc;
    if (pb.include_mc) {
        const QPaths paths = simulate_q(m, ctx.cfg.mc, {m.t_mat});
        std::vector<double> pay(paths.log_s.n_paths);
        for (double k : strikes) {
            for (std::size_t i = 0; i < pay.size(); ++i) {
                const double s = m.s0 * std::exp(paths.log_s(i, 0));
                pay[i] = df * std::max(pb.is_call ? s - k : k - s, 0.0);
            }
            mc.push_back(path_statistics(pay, paths.antithetic));
        }
        ctx.check("price", "no unstable MC paths", paths.unstable_paths == 0,
                  fmt("%zu unstable paths", paths.unstable_paths));
    }

    Table t({"strike", "method", "price", "std_error", "implied_vol", "gap_bs", "gap_mc_se"});
    double bs_gap = 0.0;
    std::vector<double> ladder_z(cf_prices.size(), 0.0);
    double atm_z = kNan, best = INFINITY;
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        const double k = strikes[i];
        const double bs = w ? bs_price(m.s0, k, m.r, m.q, *w, pb.is_call, m.t_mat) : kNan;
        for (std::size_t o = 0; o < cf_prices.size(); ++o) {
            const double p = cf_prices[o][i];
            const double gap_bs = w ? p - bs : kNan;
            const double z = mc.empty() ? kNan : (p - mc[i].estimate) / mc[i].std_error;
            if (w) bs_gap = std::max(bs_gap, std::abs(gap_bs));
            if (!mc.empty()) ladder_z[o] = std::max(ladder_z[o], std::abs(z));
            if (o == 1 && !mc.empty() && std::abs(k - m.s0) < best) {
                best = std::abs(k - m.s0);
                atm_z = z;
            }
            t.row() << k << fmt("cf-order-%zu", o) << p << "" << safe_iv(p, m, k, pb.is_call) << gap_bs << z;
        }
        if (!mc.empty())
            t.row() << k << "mc" << mc[i].estimate << mc[i].std_error << safe_iv(mc[i].estimate, m, k, pb.is_call)
                    << (w ? mc[i].estimate - bs : kNan) << 0.0;
        if (w) t.row() << k << "bs" << bs << "" << safe_iv(bs, m, k, pb.is_call) << 0.0 << kNan;
    }
    t.write(ctx, "price", "price.csv");

    if (w) ctx.check("price", "cf vs Black-Scholes", bs_gap <= 1e-6 * m.s0, fmt("max gap %.2e", bs_gap));
    if (m.xi > 0.0 && cf_prices.size() > 1 && !mc.empty())
        ctx.check("price", "cf order 1 vs MC at the money", std::abs(atm_z) <= 3.0,
                  fmt("%.2f SE; max over %zu strikes %.2f SE", atm_z, strikes.size(), ladder_z[1]));
    if (m.xi > 0.0 && cf_prices.size() > 2 && !mc.empty())
        ctx.check("price", "cf order 2 vs MC across strikes", ladder_z[2] <= 3.0,
                  fmt("max %.2f SE over %zu strikes", ladder_z[2], strikes.size()));
}

void cmd_varswap(Context& ctx) {
    const AdolModel& m = ctx.cfg.model;
    const VarSwapSpec& spec = ctx.cfg.varswap;
    CorrectionConfig cfg = ctx.cfg.cf.cfg;
    cfg.order = 0;
    const VarSwapResult r = varswap_strike(m, spec, cfg);
    const double analytic = cfg.mode == CfMode::affine_ode ? varswap_affine_analytic(m, spec) : kNan;
    const PathStats mc = mc_quadratic_variation(m, ctx.cfg.mc, spec.observation_times);
    const auto w = deterministic_variance(m);
    const double oracle = w ? *w / m.t_mat : kNan;

    Table t({"method", "strike", "std_error", "richardson_ratio", "imag_residue", "strike_coarse", "legs"});
    const std::size_t legs = spec.observation_times.size();
    t.row() << "cf-forward" << r.strike << r.std_error << r.richardson_ratio << r.imag_residue << r.strike_coarse
            << legs;
    t.row() << "affine-analytic" << analytic << kNan << kNan << kNan << kNan << legs;
    t.row() << "mc" << mc.estimate << mc.std_error << kNan << kNan << kNan << legs;
    if (w) t.row() << "integrated-variance" << oracle << 0.0 << kNan << kNan << kNan << legs;
    t.write(ctx, "varswap", "varswap.csv");

    const double z = std::abs(r.strike - mc.estimate) / std::hypot(r.std_error, mc.std_error);
    ctx.check("varswap", "cf vs MC", z <= 3.0, fmt("%.6f vs %.6f (%.2f SE)", r.strike, mc.estimate, z));
    ctx.check("varswap", "Richardson ratio in [3, 5]", r.richardson_ratio >= 3.0 && r.richardson_ratio <= 5.0,
              fmt("%.4f", r.richardson_ratio));
    if (w) {
        const double rel = std::abs(r.strike - oracle) / oracle;
        ctx.check("varswap", "integrated variance within 1%", rel <= 0.01, fmt("%.4f%%", 100 * rel));
    }
}

void cmd_mc(Context& ctx) {
    const AdolModel& m = ctx.cfg.model;
    const McSpec& spec = ctx.cfg.mc;
    const auto w = deterministic_variance(m);
    const double df = std::exp(-m.r * m.t_mat);
    const QPaths paths = simulate_q(m, spec, ctx.cfg.varswap.observation_times);
    const std::size_t last = paths.times.size() - 1;
    const std::size_t n = paths.log_s.n_paths;

    Table t({"metric", "strike", "estimate", "std_error", "reference", "gap_se"});
    std::vector<double> vals(n);
    const double carry = std::exp(-(m.r - m.q) * m.t_mat);
    for (std::size_t i = 0; i < n; ++i) vals[i] = std::exp(paths.log_s(i, last)) * carry;
    const PathStats spot = path_statistics(vals, paths.antithetic);
    const double spot_z = std::abs(spot.estimate - 1.0) / spot.std_error;
    t.row() << "discounted_spot" << kNan << spot.estimate << spot.std_error << 1.0 << spot_z;

    double atm_z = kNan, best = INFINITY;
    for (double k : ctx.cfg.pricing.strikes) {
        for (std::size_t i = 0; i < n; ++i) {
            const double s = m.s0 * std::exp(paths.log_s(i, last));
            vals[i] = df * std::max(ctx.cfg.pricing.is_call ? s - k : k - s, 0.0);
        }
        const PathStats p = path_statistics(vals, paths.antithetic);
        const double ref = w ? bs_price(m.s0, k, m.r, m.q, *w, ctx.cfg.pricing.is_call, m.t_mat) : kNan;
        const double z = (p.estimate - ref) / p.std_error;
        if (std::abs(k - m.s0) < best) {
            best = std::abs(k - m.s0);
            atm_z = z;
        }
        t.row() << "price" << k << p.estimate << p.std_error << ref << z;
    }

    for (std::size_t i = 0; i < n; ++i) {
        double prev = 0.0, acc = 0.0;
        for (std::size_t k = 0; k < paths.times.size(); ++k) {
            acc += (paths.log_s(i, k) - prev) * (paths.log_s(i, k) - prev);
            prev = paths.log_s(i, k);
        }
        vals[i] = acc / paths.times.back();
    }
    const PathStats qv = path_statistics(vals, paths.antithetic);
    const double qv_ref = w ? varswap_affine_analytic(m, ctx.cfg.varswap) : kNan;
    t.row() << "quadratic_variation" << kNan << qv.estimate << qv.std_error << qv_ref
            << (qv.estimate - qv_ref) / qv.std_error;
    t.row() << "unstable_paths" << kNan << static_cast<double>(paths.unstable_paths) << kNan << kNan << kNan;
    t.write(ctx, "mc", "mc.csv");

    ctx.check("mc", "martingale", spot_z <= 4.0, fmt("%.2f SE", spot_z));
    ctx.check("mc", "stability", paths.unstable_paths == 0, fmt("%zu unstable paths", paths.unstable_paths));
    if (w) {
        ctx.check("mc", "ATM price vs Black-Scholes", std::abs(atm_z) <= 3.0, fmt("%.2f SE", atm_z));
        const double qz = std::abs(qv.estimate - qv_ref) / qv.std_error;
        ctx.check("mc", "quadratic variation vs deterministic", qz <= 3.0, fmt("%.2f SE", qz));
    }
}

void cmd_ledger(Context& ctx) {
    const AdolModel& m = ctx.cfg.model;
    json ledger;
    ledger["format_version"] = ctx.cfg.output.format_version;
    ledger["version"] = kVersion;
    ledger["resolved_config"] = to_json(ctx.cfg);

    json gaps = json::array();
    double gap0 = kNan;
    bool closed_form_ok = true;
    for (double u : linspace(0.0, 5.0, 21)) {
        const auto p = closed_form_cf(u, m);
        const Complex a = cf_zero(u, m, CfMode::affine_ode);
        if (!p) {
            closed_form_ok = false;
            break;
        }
        const double g = std::abs(*p - a);
        if (u == 0.0) gap0 = g;
        gaps.push_back({{"u", u},
                        {"closed-form", {p->real(), p->imag()}},
                        {"affine_ode", {a.real(), a.imag()}},
                        {"abs_gap", g}});
    }
    ledger["cf_mode_gap"] = gaps;

    // zero-order solutions are measured against the xi = 0 equation they solve
    AdolModel m0 = m;
    m0.xi = 0.0;
    const auto pts = random_interior_points(m0, 100, ctx.cfg.mc.seed);
    const Complex u(1.0, 0.0);
    const CfCoefficients ca = coeffs_affine_ode(u, m0, ctx.cfg.cf.cfg.ode);
    const ResidualStats ra =
        pde_residual([&](double t, double s, double v) { return std::exp(ca.exponent(t, s, v)); }, u, m0, pts);
    ledger["pde_residual"]["affine_ode"] = residual_json(ra);
    if (closed_form_ok) {
        const CfCoefficients cp = coeffs_closed_form(u, m0);
        ledger["pde_residual"]["closed-form"] = residual_json(
            pde_residual([&](double t, double s, double v) { return std::exp(cp.exponent(t, s, v)); }, u, m0, pts));
    } else {
        ledger["pde_residual"]["closed-form"] = nullptr;
    }
    ledger["pde_residual"]["u"] = 1.0;
    ledger["pde_residual"]["xi"] = 0.0;

    json tau = json::array();
    double tau_gap = 0.0;
    if (m.h < 0.5) {
        const GreenPieces g(m);
        for (double t : linspace(0.0, 0.9 * m.t_mat, 10)) {
            const double q = g.tau(t);
            const Complex c = g.tau_closed_form(t);
            const Complex v = g.tau_closed_form_verbatim(t);
            tau_gap = std::max(tau_gap, std::abs(c - q) / q);
            tau.push_back({{"t", t},
                           {"quadrature", q},
                           {"closed_form", {c.real(), c.imag()}},
                           {"printed_form", {v.real(), v.imag()}},
                           {"rel_gap_closed_form", std::abs(c - q) / q},
                           {"rel_gap_printed_form", std::abs(v - q) / q}});
        }
    }
    ledger["tau"] = tau;
    ledger["tau_flagged"] = tau_gap > 1e-6;

    const SmallParamReport sp = small_param_check(m);
    ledger["small_parameter"] = {{"xi", sp.xi}, {"f_ht", sp.f_ht}, {"margin", sp.margin}, {"admissible", sp.admissible}};

    const auto path = ctx.out / "ledger.json";
    std::ofstream o(path);
    if (!o) throw ValidationError("cannot write '" + path.string() + "'");
    o << ledger.dump(2) << "\n";
    o.close();

    // the embedded configuration must parse back to itself
    std::ifstream in(path);
    const json back = json::parse(in);
    const bool round_trip = to_json(parse_config(back.at("resolved_config"))) == ledger["resolved_config"];

    if (closed_form_ok) ctx.check("ledger", "u = 0 gap", gap0 == 0.0, fmt("%.2e", gap0));
    ctx.check("ledger", "affine residual <= 1e-6", ra.max_normalized <= 1e-6, fmt("max %.2e", ra.max_normalized));
    ctx.check("ledger", "config round trip", round_trip, round_trip ? "identical" : "differs");
}

void cmd_check(Context& ctx) {
    cmd_constants(ctx);
    cmd_figures(ctx);
    cmd_cf(ctx);
    cmd_price(ctx);
    cmd_varswap(ctx);
    cmd_mc(ctx);
    cmd_ledger(ctx);
}

}  // namespace adol::cli
