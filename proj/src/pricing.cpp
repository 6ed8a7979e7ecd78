#include <adol/error.hpp>
#include <adol/montecarlo.hpp>
#include <adol/parallel.hpp>
#include <adol/pricing.hpp>

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace adol {

namespace {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

void check_normalized(const CharFn& cf) {
    const Complex one = cf(Complex(0.0, 0.0));
    if (std::abs(one - 1.0) > 1e-8) {
        std::ostringstream os;
        os << "characteristic function is not normalized: cf(0) = " << one.real() << " + "
           << one.imag() << "i";
        throw NumericalError(os.str());
    }
}

// Damped-call transform of Carr and Madan, in log-moneyness so that only
// (S/K)^alpha appears outside the integral.
Complex damped_integrand(const CharFn& cf, double v, double alpha, double log_moneyness) {
    const Complex u(v, -(alpha + 1.0));
    const Complex denom(alpha * alpha + alpha - v * v, (2.0 * alpha + 1.0) * v);
    return std::exp(kI * v * log_moneyness) * cf(u) / denom;
}

}  // namespace

void FourierPricingSpec::validate() const {
    ADOL_REQUIRE(damping > 0.0, ValidationError, "pricing.damping must be > 0");
    ADOL_REQUIRE(u_max > 0.0, ValidationError, "pricing.u_max must be > 0");
    ADOL_REQUIRE(n_points >= 64, ValidationError, "pricing.n_points must be >= 64");
    quad.validate();
}

double bs_price(double spot, double strike, double r, double q, double total_variance,
                bool is_call, double t) {
    ADOL_REQUIRE(spot > 0.0, DomainError, "bs_price: spot must be > 0");
    ADOL_REQUIRE(strike > 0.0, DomainError, "bs_price: strike must be > 0");
    ADOL_REQUIRE(total_variance >= 0.0, DomainError, "bs_price: total variance must be >= 0");
    const double df = std::exp(-r * t);
    const double fwd = spot * std::exp((r - q) * t);
    if (total_variance == 0.0) {
        const double intrinsic = is_call ? fwd - strike : strike - fwd;
        return df * std::max(intrinsic, 0.0);
    }
    const double sd = std::sqrt(total_variance);
    const double d1 = (std::log(fwd / strike) + 0.5 * total_variance) / sd;
    const double d2 = d1 - sd;
    if (is_call) return df * (fwd * norm_cdf(d1) - strike * norm_cdf(d2));
    return df * (strike * norm_cdf(-d2) - fwd * norm_cdf(-d1));
}

Complex bs_cf(Complex u, double r, double q, double t, double total_variance) {
    return std::exp(kI * u * (r - q) * t - 0.5 * u * (kI + u) * total_variance);
}

double fourier_price(const CharFn& cf, double spot, double strike, double r, double q, double t,
                     const FourierPricingSpec& spec, bool is_call) {
    spec.validate();
    ADOL_REQUIRE(spot > 0.0 && strike > 0.0, DomainError, "fourier_price: spot and strike must be > 0");
    ADOL_REQUIRE(t > 0.0, DomainError, "fourier_price: maturity must be > 0");
    check_normalized(cf);
    const double alpha = spec.damping;
    const double lm = std::log(spot / strike);
    auto f = [&](double v) { return damped_integrand(cf, v, alpha, lm).real(); };
    const std::array<double, 4> cuts{1.0, 5.0, 20.0, 60.0};
    const QuadResult res = integrate_adaptive(f, 0.0, spec.u_max, spec.quad, cuts);
    const double call =
        spot * std::exp(alpha * lm) * std::exp(-r * t) / std::numbers::pi * res.value.real();
    if (is_call) return call;
    return call - spot * std::exp(-q * t) + strike * std::exp(-r * t);
}

std::vector<LadderPoint> fourier_ladder_fft(const CharFn& cf, double spot,
                                            const std::vector<double>& strikes, double r,
                                            double q, double t, const FourierPricingSpec& spec) {
    spec.validate();
    check_normalized(cf);
    const int n = spec.n_points;
    const double alpha = spec.damping;
    const double eta = spec.u_max / n;
    const double lambda = 2.0 * std::numbers::pi / (n * eta);
    const double b = 0.5 * n * lambda;

    fftw_complex* in = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    for (int j = 0; j < n; ++j) {
        const double v = eta * j;
        // log-moneyness grid k = -b + lambda m, relative to log(spot)
        const Complex x = damped_integrand(cf, v, alpha, 0.0) * std::exp(kI * v * b);
        const double w = (j == 0 ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0)) / 3.0;
        const Complex val = x * eta * w;
        in[j][0] = val.real();
        in[j][1] = val.imag();
    }
    fftw_execute(plan);
    std::vector<double> kgrid(static_cast<std::size_t>(n));
    std::vector<double> calls(static_cast<std::size_t>(n));
    for (int m = 0; m < n; ++m) {
        const double k = -b + lambda * m;
        kgrid[static_cast<std::size_t>(m)] = k;
        calls[static_cast<std::size_t>(m)] =
            spot * std::exp(-alpha * k) * std::exp(-r * t) / std::numbers::pi * out[m][0];
    }
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);

    std::vector<LadderPoint> ladder;
    for (double K : strikes) {
        ADOL_REQUIRE(K > 0.0, DomainError, "fourier_ladder_fft: strikes must be > 0");
        const double k = std::log(K / spot);
        const double pos = (k + b) / lambda;
        const auto i = static_cast<long>(std::floor(pos));
        ADOL_REQUIRE(i >= 1 && i + 2 < n, DomainError,
                     "fourier_ladder_fft: strike outside the FFT log-strike range");
        const double s = pos - static_cast<double>(i);
        const auto at = [&](long j) { return calls[static_cast<std::size_t>(j)]; };
        // Catmull-Rom cubic through four neighbouring grid prices.
        const double p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
        const double c =
            p1 + 0.5 * s *
                     (p2 - p0 + s * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                                     s * (3.0 * (p1 - p2) + p3 - p0)));
        const double put = c - spot * std::exp(-q * t) + K * std::exp(-r * t);
        ladder.push_back({K, c, put});
    }
    return ladder;
}

double implied_vol(double price, double spot, double strike, double r, double q, double t,
                   bool is_call) {
    ADOL_REQUIRE(spot > 0.0 && strike > 0.0 && t > 0.0, DomainError,
                 "implied_vol: spot, strike and maturity must be > 0");
    const double df_q = spot * std::exp(-q * t);
    const double df_k = strike * std::exp(-r * t);
    const double lower = is_call ? std::max(df_q - df_k, 0.0) : std::max(df_k - df_q, 0.0);
    const double upper = is_call ? df_q : df_k;
    if (!(price > lower && price < upper)) {
        std::ostringstream os;
        os << "implied_vol: price " << price << " outside the no-arbitrage bounds (" << lower
           << ", " << upper << ")";
        throw DomainError(os.str());
    }
    auto f = [&](double vol) { return bs_price(spot, strike, r, q, vol * vol * t, is_call, t) - price; };
    double lo = 0.0;
    double hi = 1.0;
    while (f(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e3) throw NumericalError("implied_vol: could not bracket the root");
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double fx = f(x);
        if (std::abs(fx) <= 1e-12 * std::max(1.0, price)) return x;
        if (fx > 0.0) hi = x;
        else lo = x;
        const double fwd = spot * std::exp((r - q) * t);
        const double sd = x * std::sqrt(t);
        const double d1 = (std::log(fwd / strike) + 0.5 * sd * sd) / sd;
        const double vega = std::exp(-r * t) * fwd * norm_pdf(d1) * std::sqrt(t);
        double next = vega > 0.0 ? x - fx / vega : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo < 1e-15) return next;
        x = next;
    }
    return x;
}

// ---------------------------------------------------------------------------

void VarSwapSpec::validate(double t_mat) const {
    ADOL_REQUIRE(!observation_times.empty(), ValidationError,
                 "varswap.observation_times must not be empty");
    double prev = 0.0;
    for (double t : observation_times) {
        ADOL_REQUIRE(t > prev, ValidationError, "varswap.observation_times must be increasing and > 0");
        prev = t;
    }
    ADOL_REQUIRE(prev <= t_mat * (1.0 + 1e-12), ValidationError,
                 "varswap.observation_times must not exceed the maturity");
    ADOL_REQUIRE(u_step > 1e-6 && u_step < 1e-1, ValidationError,
                 "varswap.u_step must lie in (1e-6, 1e-1)");
    ADOL_REQUIRE(mc_states >= 1, ValidationError, "varswap.mc_states must be >= 1");
    ADOL_REQUIRE(mc_steps >= 1, ValidationError, "varswap.mc_steps must be >= 1");
}

StateSamples sample_states(const AdolModel& model, const std::vector<double>& times,
                           int n_states, int n_steps, std::uint64_t seed) {
    StateSamples out;
    out.times = times;
    if (times.empty()) return out;
    McSpec spec;
    spec.n_paths = static_cast<std::size_t>(n_states);
    spec.n_steps = n_steps;
    spec.seed = seed;
    spec.antithetic = false;
    const QPaths paths = simulate_q(model, spec, times);
    out.sigma.assign(times.size(), std::vector<double>(spec.n_paths));
    out.v.assign(times.size(), std::vector<double>(spec.n_paths));
    for (std::size_t k = 0; k < times.size(); ++k) {
        for (std::size_t p = 0; p < spec.n_paths; ++p) {
            out.sigma[k][p] = paths.sigma(p, k);
            out.v[k][p] = paths.v(p, k);
        }
    }
    return out;
}

namespace {

AdolModel rebased(const AdolModel& model, double t2) {
    AdolModel m = model;
    m.t_mat = t2;
    m.eps = std::min(model.eps, 0.5 * t2);
    return m;
}

CfCoefficients leg_coefficients(Complex u, const AdolModel& leg, const CorrectionConfig& cfg) {
    return cfg.mode == CfMode::closed_form ? coeffs_closed_form(u, leg) : coeffs_affine_ode(u, leg, cfg.ode);
}

std::size_t find_time(const StateSamples& s, double t) {
    for (std::size_t k = 0; k < s.times.size(); ++k)
        if (std::abs(s.times[k] - t) <= 1e-12 * std::max(1.0, t)) return k;
    throw DomainError("forward_cf: no frozen state sample at the requested start time");
}

}  // namespace

ForwardCfResult forward_cf(Complex u, double t1, double t2, const AdolModel& model,
                           const CorrectionConfig& cfg, const StateSamples* states,
                           std::size_t state_index) {
    ADOL_REQUIRE(t1 >= 0.0 && t1 < t2 && t2 <= model.t_mat * (1.0 + 1e-12), DomainError,
                 "forward_cf: need 0 <= t1 < t2 <= T");
    if (u == Complex(0.0, 0.0)) return {Complex(1.0, 0.0), 0.0};
    const AdolModel leg = rebased(model, t2);
    const CfCoefficients co = leg_coefficients(u, leg, cfg);
    if (t1 == 0.0) return {std::exp(co.exponent(0.0, leg.sigma0, leg.v0)), 0.0};

    StateSamples local;
    if (states == nullptr) {
        VarSwapSpec defaults;
        local = sample_states(model, {t1}, defaults.mc_states, defaults.mc_steps, defaults.seed);
        states = &local;
        state_index = 0;
    } else {
        ADOL_REQUIRE(state_index < states->times.size() &&
                         std::abs(states->times[state_index] - t1) <= 1e-12 * std::max(1.0, t1),
                     DomainError, "forward_cf: state sample time does not match t1");
    }
    const auto& sig = states->sigma[state_index];
    const auto& vv = states->v[state_index];
    const std::size_t n = sig.size();
    std::vector<double> re(n), im(n);
    for (std::size_t p = 0; p < n; ++p) {
        const Complex z = std::exp(co.exponent(t1, sig[p], vv[p]));
        re[p] = z.real();
        im[p] = z.imag();
    }
    const double mr = pairwise_sum(re) / static_cast<double>(n);
    const double mi = pairwise_sum(im) / static_cast<double>(n);
    double var = 0.0;
    for (std::size_t p = 0; p < n; ++p)
        var += (re[p] - mr) * (re[p] - mr) + (im[p] - mi) * (im[p] - mi);
    const double se = n > 1 ? std::sqrt(var / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    return {Complex(mr, mi), se};
}

VarSwapResult varswap_strike(const AdolModel& model, const VarSwapSpec& spec,
                             const CorrectionConfig& cfg) {
    model.validate();
    spec.validate(model.t_mat);
    const auto& obs = spec.observation_times;
    const double T = obs.back();

    std::vector<double> starts;
    for (std::size_t i = 0; i + 1 < obs.size(); ++i) starts.push_back(obs[i]);
    const StateSamples states = sample_states(model, starts, spec.mc_states, spec.mc_steps, spec.seed);
    const std::size_t n_states = starts.empty() ? 1 : static_cast<std::size_t>(spec.mc_states);

    // Second differences per state for steps h, h/2, h/4, summed over legs.
    const std::array<double, 3> steps{spec.u_step, 0.5 * spec.u_step, 0.25 * spec.u_step};
    std::array<std::vector<Complex>, 3> d2;
    for (auto& d : d2) d.assign(n_states, Complex{});

    double prev = 0.0;
    for (std::size_t leg_i = 0; leg_i < obs.size(); ++leg_i) {
        const double t1 = prev;
        const double t2 = obs[leg_i];
        prev = t2;
        const AdolModel leg = rebased(model, t2);
        for (std::size_t s = 0; s < steps.size(); ++s) {
            const double h = steps[s];
            const CfCoefficients cp = leg_coefficients(Complex(h, 0.0), leg, cfg);
            const CfCoefficients cm = leg_coefficients(Complex(-h, 0.0), leg, cfg);
            for (std::size_t p = 0; p < n_states; ++p) {
                double sg = leg.sigma0, v = leg.v0;
                if (t1 > 0.0) {
                    sg = states.sigma[leg_i - 1][p];
                    v = states.v[leg_i - 1][p];
                }
                const Complex zp = std::exp(cp.exponent(t1, sg, v));
                const Complex zm = std::exp(cm.exponent(t1, sg, v));
                d2[s][p] += (zp - 2.0 + zm) / (h * h);
            }
        }
    }

    std::vector<double> per_state(n_states);
    std::array<double, 3> mean_d{};
    double imag = 0.0;
    for (std::size_t s = 0; s < 3; ++s) {
        std::vector<double> re(n_states);
        std::vector<double> im(n_states);
        for (std::size_t p = 0; p < n_states; ++p) {
            re[p] = d2[s][p].real();
            im[p] = d2[s][p].imag();
        }
        mean_d[s] = pairwise_sum(re) / static_cast<double>(n_states);
        imag = std::max(imag, std::abs(pairwise_sum(im) / static_cast<double>(n_states)));
    }
    for (std::size_t p = 0; p < n_states; ++p)
        per_state[p] = -(4.0 * d2[1][p].real() - d2[0][p].real()) / 3.0 / T;

    VarSwapResult out;
    out.imag_residue = imag;
    if (imag > 1e-8) {
        std::ostringstream os;
        os << "varswap_strike: imaginary residue " << imag << " exceeds 1e-8";
        throw NumericalError(os.str());
    }
    out.strike = pairwise_sum(per_state) / static_cast<double>(n_states);
    out.strike_coarse = -mean_d[1] / T;
    const double denom = mean_d[1] - mean_d[2];
    out.richardson_ratio = denom != 0.0 ? (mean_d[0] - mean_d[1]) / denom : 0.0;
    if (n_states > 1) {
        double var = 0.0;
        for (double x : per_state) var += (x - out.strike) * (x - out.strike);
        out.std_error = std::sqrt(var / static_cast<double>(n_states - 1) / static_cast<double>(n_states));
    }
    return out;
}

double varswap_affine_analytic(const AdolModel& model, const VarSwapSpec& spec,
                               const StateSamples* states) {
    model.validate();
    spec.validate(model.t_mat);
    const auto& obs = spec.observation_times;
    std::vector<double> starts(obs.begin(), obs.end() - 1);
    StateSamples local;
    if (states == nullptr) {
        local = sample_states(model, starts, spec.mc_states, spec.mc_steps, spec.seed);
        states = &local;
    }
    const double drift = model.r - model.q;
    double total = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double dt = obs[i] - prev;
        const double a = drift * dt;
        const double decay = std::abs(model.kappa * dt) < 1e-12
                                 ? dt
                                 : -std::expm1(-2.0 * model.kappa * dt) / (2.0 * model.kappa);
        auto leg_moment = [&](double sigma) {
            const double w = sigma * sigma * decay;
            return w + (a - 0.5 * w) * (a - 0.5 * w);
        };
        if (prev == 0.0) {
            total += leg_moment(model.sigma0);
        } else {
            const auto& sig = states->sigma[find_time(*states, prev)];
            std::vector<double> vals(sig.size());
            for (std::size_t p = 0; p < sig.size(); ++p) vals[p] = leg_moment(sig[p]);
            total += pairwise_sum(vals) / static_cast<double>(vals.size());
        }
        prev = obs[i];
    }
    return total / obs.back();
}

}  // namespace adol
