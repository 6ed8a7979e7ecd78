#include <adol/charfn.hpp>
#include <adol/error.hpp>
#include <adol/montecarlo.hpp>
#include <adol/parallel.hpp>
#include <adol/rng.hpp>

#include <algorithm>
#include <cmath>

namespace adol {

void McSpec::validate() const {
    ADOL_REQUIRE(n_paths >= 1, ValidationError, "mc.n_paths must be >= 1");
    ADOL_REQUIRE(n_steps >= 1, ValidationError, "mc.n_steps must be >= 1");
    ADOL_REQUIRE(t_start >= 0.0, ValidationError, "mc.t_start must be >= 0");
    ADOL_REQUIRE(!antithetic || n_paths % 2 == 0, ValidationError,
                 "mc.n_paths must be even in antithetic mode");
}

namespace {

struct Step {
    double dt;
    double m_int;    // integral of m over the step
    double decay;    // exp(-m_int)
    double var_v;    // variance of the v transition
    double var_sig;  // integral of nu^2 over the step
    int record;      // record slot reached at the end of the step, or -1
};

std::vector<Step> build_steps(const AdolModel& model, const McSpec& spec,
                              const std::vector<double>& record_times) {
    const double T = model.t_mat;
    const double t0 = spec.t_start > 0.0 ? spec.t_start : model.eps;
    ADOL_REQUIRE(t0 < T, ValidationError, "mc.t_start must be smaller than the maturity");
    std::vector<double> grid{0.0, t0};
    for (int i = 1; i <= spec.n_steps; ++i)
        grid.push_back(t0 + (T - t0) * static_cast<double>(i) / spec.n_steps);
    for (double r : record_times) {
        ADOL_REQUIRE(r > 0.0 && r <= T * (1.0 + 1e-12), DomainError,
                     "simulate_q: record times must lie in (0, T]");
        grid.push_back(std::min(r, T));
    }
    std::sort(grid.begin(), grid.end());
    std::vector<double> merged{grid.front()};
    for (double g : grid)
        if (g - merged.back() > 1e-13 * T) merged.push_back(g);
    merged.back() = T;

    const GreenPieces green(model);
    const DoConstants c = model.constants();
    std::vector<Step> steps;
    for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
        const double a = merged[i];
        const double b = merged[i + 1];
        Step s{};
        s.dt = b - a;
        s.m_int = m_integral(a, b, model);
        s.decay = std::exp(-s.m_int);
        const double ab = green.alpha1(b);
        s.var_v = (green.nu2_alpha2_integral(b) - green.nu2_alpha2_integral(a)) / (ab * ab);
        s.var_sig = c.b_h * c.b_h * (std::pow(b, 2.0 * c.h) - std::pow(a, 2.0 * c.h)) / (2.0 * c.h);
        s.record = -1;
        for (std::size_t k = 0; k < record_times.size(); ++k)
            if (std::abs(std::min(record_times[k], T) - b) <= 1e-13 * T) s.record = static_cast<int>(k);
        steps.push_back(s);
    }
    return steps;
}

}  // namespace

QPaths simulate_q(const AdolModel& model, const McSpec& spec,
                  const std::vector<double>& record_times) {
    model.validate();
    spec.validate();
    ADOL_REQUIRE(model.theta == 0.0, ValidationError, "simulate_q supports theta = 0 only");
    const std::vector<Step> steps = build_steps(model, spec, record_times);

    QPaths out;
    out.times = record_times;
    out.antithetic = spec.antithetic;
    const std::size_t n_rec = record_times.size();
    for (PathMatrix* pm : {&out.log_s, &out.sigma, &out.v}) {
        pm->n_paths = spec.n_paths;
        pm->n_times = n_rec;
        pm->data.assign(spec.n_paths * n_rec, 0.0);
    }

    const double drift = model.r - model.q;
    const double rho = model.rho;
    const double rho_c = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    const double xi = model.xi;
    const double kappa = model.kappa;
    const double limit = 1e3 * model.sigma0;
    const std::size_t per_stream = spec.antithetic ? 2 : 1;
    const std::size_t n_streams = spec.n_paths / per_stream;
    std::vector<unsigned char> unstable(spec.n_paths, 0);

    parallel_for(n_streams, spec.threads, [&](std::size_t stream) {
        NormalStream normal(spec.seed, stream);
        double x[2] = {0.0, 0.0};
        double lsig[2] = {std::log(model.sigma0), std::log(model.sigma0)};
        double v[2] = {model.v0, model.v0};
        for (const Step& st : steps) {
            const double z1 = normal();
            const double z2 = normal();
            const double sq_dt = std::sqrt(st.dt);
            const double sd_sig = std::sqrt(st.var_sig);
            const double sd_v = std::sqrt(st.var_v);
            for (std::size_t a = 0; a < per_stream; ++a) {
                const double sgn = a == 0 ? 1.0 : -1.0;
                const double e1 = sgn * z1;
                const double e2 = sgn * z2;
                const double sig = std::exp(lsig[a]);
                x[a] += (drift - 0.5 * sig * sig) * st.dt + sig * sq_dt * (rho * e2 + rho_c * e1);
                lsig[a] += -kappa * st.dt - xi * st.m_int * v[a] - 0.5 * xi * xi * st.var_sig +
                           xi * sd_sig * e2;
                v[a] = v[a] * st.decay + sd_v * e2;
                const std::size_t path = stream * per_stream + a;
                if (std::abs(std::exp(lsig[a])) > limit) unstable[path] = 1;
                if (st.record >= 0) {
                    const auto k = static_cast<std::size_t>(st.record);
                    out.log_s(path, k) = x[a];
                    out.sigma(path, k) = std::exp(lsig[a]);
                    out.v(path, k) = v[a];
                }
            }
        }
    });
    out.unstable_paths = static_cast<std::size_t>(std::count(unstable.begin(), unstable.end(), 1));
    return out;
}

PathStats path_statistics(const std::vector<double>& values, bool antithetic) {
    std::vector<double> items;
    if (antithetic) {
        ADOL_REQUIRE(values.size() % 2 == 0, DomainError, "path_statistics: odd antithetic sample");
        items.resize(values.size() / 2);
        for (std::size_t j = 0; j < items.size(); ++j)
            items[j] = 0.5 * (values[2 * j] + values[2 * j + 1]);
    } else {
        items = values;
    }
    PathStats st;
    st.n_effective = items.size();
    if (items.empty()) return st;
    const double n = static_cast<double>(items.size());
    st.estimate = pairwise_sum(items) / n;
    if (items.size() > 1) {
        std::vector<double> sq(items.size());
        for (std::size_t j = 0; j < items.size(); ++j)
            sq[j] = (items[j] - st.estimate) * (items[j] - st.estimate);
        st.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
    }
    return st;
}

PathStats mc_price(const AdolModel& model, const McSpec& spec, double strike, bool is_call) {
    ADOL_REQUIRE(strike >= 0.0, DomainError, "mc_price: strike must be >= 0");
    const QPaths paths = simulate_q(model, spec, {model.t_mat});
    const double df = std::exp(-model.r * model.t_mat);
    std::vector<double> pay(spec.n_paths);
    for (std::size_t p = 0; p < spec.n_paths; ++p) {
        const double s = model.s0 * std::exp(paths.log_s(p, 0));
        pay[p] = df * std::max(is_call ? s - strike : strike - s, 0.0);
    }
    return path_statistics(pay, spec.antithetic);
}

PathStats mc_discounted_spot(const AdolModel& model, const McSpec& spec) {
    const QPaths paths = simulate_q(model, spec, {model.t_mat});
    const double scale = std::exp(-(model.r - model.q) * model.t_mat);
    std::vector<double> vals(spec.n_paths);
    for (std::size_t p = 0; p < spec.n_paths; ++p) vals[p] = std::exp(paths.log_s(p, 0)) * scale;
    return path_statistics(vals, spec.antithetic);
}

PathStats mc_quadratic_variation(const AdolModel& model, const McSpec& spec,
                                 const std::vector<double>& observation_times) {
    ADOL_REQUIRE(!observation_times.empty(), ValidationError,
                 "mc_quadratic_variation: no observation times");
    for (std::size_t i = 1; i < observation_times.size(); ++i)
        ADOL_REQUIRE(observation_times[i] > observation_times[i - 1], ValidationError,
                     "mc_quadratic_variation: observation times must increase");
    ADOL_REQUIRE(observation_times.front() > 0.0 && observation_times.back() <= model.t_mat,
                 ValidationError, "mc_quadratic_variation: observation times must lie in (0, T]");
    const QPaths paths = simulate_q(model, spec, observation_times);
    const double T = observation_times.back();
    std::vector<double> qv(spec.n_paths);
    for (std::size_t p = 0; p < spec.n_paths; ++p) {
        double prev = 0.0;
        double acc = 0.0;
        for (std::size_t k = 0; k < observation_times.size(); ++k) {
            const double d = paths.log_s(p, k) - prev;
            acc += d * d;
            prev = paths.log_s(p, k);
        }
        qv[p] = acc / T;
    }
    return path_statistics(qv, spec.antithetic);
}

}  // namespace adol
