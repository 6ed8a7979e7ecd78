#include <adol/charfn.hpp>
#include <adol/error.hpp>
#include <adol/rng.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

namespace adol {

namespace {

// (1 - e^{-2 kappa dt}) / (2 kappa), continuous at kappa = 0.
double decay_integral(double kappa, double dt) {
    const double x = 2.0 * kappa * dt;
    if (std::abs(x) < 1e-10) return dt * (1.0 - 0.5 * x);
    return -std::expm1(-x) / (2.0 * kappa);
}

double inv_nu(double t, const DoConstants& c) {
    if (t == 0.0) {
        ADOL_REQUIRE(c.h < 0.5, DomainError, "1/nu(0) is undefined for H >= 1/2");
        return 0.0;
    }
    return 1.0 / nu_t(t, c);
}

// Dense output of the affine coefficient ODE on ascending times.
struct AffineTable {
    std::vector<double> t;
    std::vector<std::array<Complex, 4>> y;
    std::vector<std::array<Complex, 4>> dy;

    Complex eval(std::size_t comp, double x) const {
        if (x <= t.front()) return y.front()[comp];
        if (x >= t.back()) return y.back()[comp];
        const auto it = std::upper_bound(t.begin(), t.end(), x);
        const auto j = static_cast<std::size_t>(it - t.begin()) - 1;
        const double h = t[j + 1] - t[j];
        const double s = (x - t[j]) / h;
        const double s2 = s * s;
        const double s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1;
        const double h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2;
        const double h11 = s3 - s2;
        return h00 * y[j][comp] + h10 * h * dy[j][comp] + h01 * y[j + 1][comp] +
               h11 * h * dy[j + 1][comp];
    }
};

}  // namespace

std::string to_string(CfMode mode) { return mode == CfMode::closed_form ? "closed-form" : "affine-ode"; }

std::string to_string(JMethod method) {
    switch (method) {
        case JMethod::quadrature: return "quadrature";
        case JMethod::quadratic_at_varsigma: return "quadratic-at-varsigma";
        case JMethod::quadratic_at_stationary: return "quadratic-at-stationary-point";
    }
    return "?";
}

CfMode parse_cf_mode(const std::string& s) {
    if (s == "closed-form") return CfMode::closed_form;
    if (s == "affine-ode") return CfMode::affine_ode;
    throw ValidationError("unknown cf mode '" + s + "' (expected closed-form or affine-ode)");
}

JMethod parse_j_method(const std::string& s) {
    if (s == "quadrature") return JMethod::quadrature;
    if (s == "quadratic-at-varsigma") return JMethod::quadratic_at_varsigma;
    if (s == "quadratic-at-stationary-point") return JMethod::quadratic_at_stationary;
    throw ValidationError("unknown j method '" + s + "'");
}

Complex CfCoefficients::exponent(double t, Complex sigma, Complex v) const {
    return alpha(t) + gamma(t) * sigma * sigma + beta_bar(t) * sigma * v + gamma_bar(t) * sigma;
}

double kappa_m_over_nu(double a, double b, const AdolModel& model) {
    const DoConstants c = model.constants();
    const double e1 = 1.5 - c.h;
    const double e2 = e1 + model.m_pi;
    const double k = model.kappa * (std::pow(b, e1) - std::pow(a, e1)) / e1;
    const double m = model.m_rho * (std::pow(b, e2) - std::pow(a, e2)) / e2;
    return (k + m) / c.b_h;
}

Complex gamma_closed_form(Complex u, double t, const AdolModel& model) {
    const double om = 1.0 - model.rho;
    return -0.5 * u * (1.0 + u * om * om) * decay_integral(model.kappa, model.t_mat - t);
}

Complex affine_gamma_closed(Complex u, double t, const AdolModel& model) {
    return -0.5 * u * (kI + u) * decay_integral(model.kappa, model.t_mat - t);
}

CfCoefficients coeffs_closed_form(Complex u, const AdolModel& model) {
    model.validate();
    const DoConstants c = model.constants();
    ADOL_REQUIRE(c.h < 0.5, DomainError, "coeffs_closed_form: beta_bar requires H < 1/2");
    const double T = model.t_mat;
    const double drift = model.r - model.q;
    CfCoefficients out;
    out.alpha = [=](double t) { return -kI * u * drift * (t - T); };
    out.gamma = [=](double t) { return gamma_closed_form(u, t, model); };
    out.beta_bar = [=](double t) {
        const double bracket = std::exp(model.kappa * (t - T)) / nu_t(T, c) - inv_nu(t, c) +
                               kappa_m_over_nu(t, T, model);
        return kI * model.rho * u * bracket;
    };
    out.gamma_bar = [=](double t) -> Complex {
        if (model.theta == 0.0) return 0.0;
        if (model.kappa == 0.0) return model.theta * u * (u + 1.0) * (t - T);
        return model.theta * u * (u + 1.0) / model.kappa * std::expm1(model.kappa * (t - T));
    };
    return out;
}

CfCoefficients coeffs_affine_ode(Complex u, const AdolModel& model, const OdeSpec& spec) {
    model.validate();
    const DoConstants c = model.constants();
    const double T = model.t_mat;
    const double kappa = model.kappa;
    const double kt = kappa * model.theta;
    const Complex iu = kI * u;
    const Complex half_uu = 0.5 * u * (kI + u);
    const double drift = model.r - model.q;

    // y = (alpha, gamma, beta_bar, gamma_bar)
    auto rhs = [=](double t, std::span<const Complex> y) {
        const Complex g = y[1];
        const Complex b = y[2];
        const Complex gb = y[3];
        Complex dg = 2.0 * kappa * g + half_uu;
        Complex db = 0.0;
        if (b != 0.0) {
            const double nu = nu_t(std::max(t, 1e-300), c);
            dg -= 0.5 * nu * nu * b * b + iu * model.rho * nu * b;
            db = (kappa + m_t(std::max(t, 0.0), model)) * b;
        }
        return ComplexVector{-iu * drift - kt * gb, dg, db, kappa * gb - 2.0 * kt * g};
    };

    OdeSpec s = spec;
    s.max_step = std::min(spec.max_step, T / 512.0);
    auto table = std::make_shared<AffineTable>();
    integrate_ode(rhs, T, 0.0, ComplexVector(4, Complex{}), s,
                  [&](double t, std::span<const Complex> y) {
                      const ComplexVector d = rhs(t, y);
                      table->t.push_back(t);
                      table->y.push_back({y[0], y[1], y[2], y[3]});
                      table->dy.push_back({d[0], d[1], d[2], d[3]});
                  });
    std::reverse(table->t.begin(), table->t.end());
    std::reverse(table->y.begin(), table->y.end());
    std::reverse(table->dy.begin(), table->dy.end());

    CfCoefficients out;
    out.alpha = [table](double t) { return table->eval(0, t); };
    out.gamma = [table](double t) { return table->eval(1, t); };
    out.beta_bar = [table](double t) { return table->eval(2, t); };
    out.gamma_bar = [table](double t) { return table->eval(3, t); };
    return out;
}

Complex cf_zero(Complex u, const AdolModel& model, CfMode mode) {
    const CfCoefficients co =
        mode == CfMode::closed_form ? coeffs_closed_form(u, model) : coeffs_affine_ode(u, model);
    return std::exp(co.exponent(0.0, model.sigma0, model.v0));
}

// ---------------------------------------------------------------------------

GreenPieces::GreenPieces(const AdolModel& model) : model_(model), c_(model.constants()) {
    model_.validate();
    const AdolModel m = model_;
    const DoConstants c = c_;
    auto a1 = [m](double s) { return std::exp(m_integral(m.t_mat, s, m)); };
    nu2a2_ = CumulativeIntegral(
        [c, a1](double s) {
            const double nu = nu_t(s, c);
            const double a = a1(s);
            return nu * nu * a * a;
        },
        m.t_mat, 2.0 * c.h - 1.0);
    drift_ = CumulativeIntegral(
        [c, a1, m](double s) { return a1(s) * nu_t(s, c) * std::exp(-m.kappa * s); }, m.t_mat,
        c.h - 0.5);
}

double GreenPieces::alpha1(double t) const {
    return std::exp(m_integral(model_.t_mat, t, model_));
}

double GreenPieces::tau(double t) const {
    ADOL_REQUIRE(t >= 0.0 && t <= model_.t_mat, DomainError, "tau: t outside [0, T]");
    return 0.5 * nu2a2_.between(t, model_.t_mat);
}

namespace {

// 1/2 B^2 e^{-c T^p} / p [t^{2H} E(n, -c t^p) - T^{2H} E(n, -c T^p)], n = 1 - 2H/p.
Complex tau_expint(double t, double c_exp, const AdolModel& model, const DoConstants& c) {
    const double T = model.t_mat;
    const double p = 1.0 + model.m_pi;
    const double h2 = 2.0 * c.h;
    if (c_exp == 0.0) return c.b_h * c.b_h * (std::pow(T, h2) - std::pow(t, h2)) / (2.0 * h2);
    const double order = 1.0 - h2 / p;
    auto term = [&](double x) -> Complex {
        if (x == 0.0) {
            // t^{2H} (-c t^p)^{order-1} is independent of t; E(order, z) ~ z^{order-1} G(1-order).
            return std::pow(Complex(-c_exp, 0.0), order - 1.0) * gamma_fn(1.0 - order);
        }
        return std::pow(x, h2) * exp_integral_e(order, -c_exp * std::pow(x, p));
    };
    const double pref = 0.5 * c.b_h * c.b_h * std::exp(-c_exp * std::pow(T, p)) / p;
    return pref * (term(t) - term(T));
}

}  // namespace

Complex GreenPieces::tau_closed_form(double t) const {
    return tau_expint(t, 2.0 * model_.m_rho / (1.0 + model_.m_pi), model_, c_);
}

Complex GreenPieces::tau_closed_form_verbatim(double t) const {
    return tau_expint(t, model_.m_rho / (1.0 + model_.m_pi), model_, c_);
}

double GreenPieces::t_of_tau(double tau_value) const {
    const double top = tau(0.0);
    ADOL_REQUIRE(tau_value >= -1e-15 * top && tau_value <= top * (1.0 + 1e-14), DomainError,
                 "t_of_tau: value outside [tau(T), tau(0)]");
    double lo = 0.0;
    double hi = model_.t_mat;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * model_.t_mat; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (tau(mid) > tau_value) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

Complex GreenPieces::a1(Complex u, double t) const {
    const double nu = nu_t(t, c_);
    const double num = nu * (model_.kappa + m_t(t, model_)) + nu_prime(t, c_);
    const double e = std::exp(-model_.kappa * t - 2.0 * m_integral(model_.t_mat, t, model_));
    return 2.0 * kI * model_.rho * u * num / std::pow(nu, 4) * e;
}

double GreenPieces::g_jac(double t) const {
    const double nu = nu_t(t, c_);
    const double a = alpha1(t);
    return -2.0 / (nu * nu * a * a);
}

double heat_kernel(double x, double x_prime, double tau) {
    ADOL_REQUIRE(tau > 0.0, DomainError, "heat_kernel: tau must be > 0");
    const double d = x - x_prime;
    return std::exp(-d * d / (4.0 * tau)) / (2.0 * std::sqrt(std::numbers::pi * tau));
}

// ---------------------------------------------------------------------------

double j_k(double omega, double chi, double u, const GreenPieces& green) {
    const AdolModel& m = green.model();
    const double a = green.alpha1(chi);
    const double g = gamma_closed_form(u, chi, m).real();
    return omega * omega * std::exp(-2.0 * m.kappa * chi) * g * a * a;
}

double j_exponent(double x, double varsigma, double k, double chi, double t) {
    const double d = x - varsigma;
    const double quad = x - d * d / (4.0 * (chi - t));
    if (k == 0.0) return quad;
    const double e = x - 2.0 * chi;
    return k / (e * e) + quad;
}

JExpansion j_expand(double center, double varsigma, double k, double chi, double t) {
    const double D = chi - t;
    const double e = center - 2.0 * chi;
    const double g = center - varsigma;
    JExpansion out;
    out.center = center;
    out.k = k;
    out.a0 = k / (e * e) + center - g * g / (4.0 * D);
    out.a1 = 1.0 - 2.0 * k / (e * e * e) - g / (2.0 * D);
    out.a2 = -1.0 / (4.0 * D) + 3.0 * k / (e * e * e * e);
    return out;
}

double j_stationary_point(double varsigma, double k, double chi, double t) {
    const double d = varsigma - 2.0 * chi;
    const double D2 = 2.0 * (chi - t);
    // y = x - 2 chi solves y^4 - (d + D2) y^3 + 2 k D2 = 0
    const auto roots = solve_quartic(1.0, -(d + D2), 0.0, 0.0, 2.0 * k * D2);
    double best = std::numeric_limits<double>::quiet_NaN();
    double best_dist = std::numeric_limits<double>::infinity();
    for (double y : roots) {
        if (y == 0.0) continue;
        const double x = y + 2.0 * chi;
        if (j_expand(x, varsigma, k, chi, t).a2 >= 0.0) continue;
        const double dist = std::abs(y - d);
        if (dist < best_dist) {
            best_dist = dist;
            best = x;
        }
    }
    if (!std::isfinite(best))
        throw NumericalError("j_stationary_point: no admissible real root with a2 < 0");
    return best;
}

namespace {

Complex closed_from(const JExpansion& e) {
    if (!(e.a2 < 0.0)) {
        std::ostringstream os;
        os << "j_integral: quadratic expansion has a2 = " << e.a2
           << " >= 0; use the quadrature method instead";
        throw NumericalError(os.str());
    }
    return std::sqrt(std::numbers::pi / -e.a2) * std::exp(e.a0 - e.a1 * e.a1 / (4.0 * e.a2));
}

}  // namespace

JResult j_integral(double varsigma, double omega, double chi, const GreenPieces& green,
                   JMethod method, double u, double t, const QuadratureSpec& quad) {
    ADOL_REQUIRE(chi > t && chi <= green.model().t_mat, DomainError,
                 "j_integral: chi must lie in (t, T]");
    const double k = j_k(omega, chi, u, green);
    JResult out;
    if (method == JMethod::quadratic_at_varsigma) {
        out.expansion = j_expand(varsigma, varsigma, k, chi, t);
        out.value = closed_from(out.expansion);
        return out;
    }
    if (method == JMethod::quadratic_at_stationary) {
        const double x = j_stationary_point(varsigma, k, chi, t);
        out.expansion = j_expand(x, varsigma, k, chi, t);
        out.value = closed_from(out.expansion);
        return out;
    }

    ADOL_REQUIRE(k <= 0.0, DomainError,
                 "j_integral: k > 0 makes the integrand unbounded at the pole");
    const double D = chi - t;
    const double scale = varsigma + D;
    const double center = varsigma + 2.0 * D;
    const double half = 40.0 * std::sqrt(2.0 * D);
    const double lo = center - half;
    const double hi = center + half;
    auto f = [&](double x) {
        if (k != 0.0 && x == 2.0 * chi) return 0.0;
        return std::exp(j_exponent(x, varsigma, k, chi, t) - scale);
    };
    const double pole = 2.0 * chi;
    if (k == 0.0 || pole <= lo || pole >= hi) {
        const QuadResult r = integrate_adaptive(f, lo, hi, quad);
        out.value = r.value * std::exp(scale);
        out.error = r.error * std::exp(scale);
        return out;
    }
    // Exclude a symmetric window around the pole and shrink it until stable.
    double delta = std::min({std::sqrt(2.0 * D), pole - lo, hi - pole}) * 0.5;
    Complex prev{};
    double err = 0.0;
    for (int it = 0; it < 40; ++it) {
        const QuadResult left = integrate_adaptive(f, lo, pole - delta, quad);
        const QuadResult right = integrate_adaptive(f, pole + delta, hi, quad);
        const Complex cur = left.value + right.value;
        err = left.error + right.error;
        if (it > 0 && std::abs(cur - prev) <= std::max(quad.abs_tol, quad.rel_tol * std::abs(cur))) {
            out.value = cur * std::exp(scale);
            out.error = (err + std::abs(cur - prev)) * std::exp(scale);
            return out;
        }
        prev = cur;
        delta *= 0.25;
    }
    throw ConvergenceError("j_integral: pole exclusion did not converge", prev.real() * std::exp(scale),
                           prev.imag() * std::exp(scale), err * std::exp(scale));
}

// ---------------------------------------------------------------------------

void CorrectionConfig::validate() const {
    ADOL_REQUIRE(order >= 0 && order <= 2, ValidationError, "cf.order must be 0, 1 or 2");
    ADOL_REQUIRE(sigma_step >= 1e-8 && sigma_step <= 0.1, ValidationError,
                 "cf.sigma_step must lie in [1e-8, 0.1]");
    ADOL_REQUIRE(v_step >= 1e-8 && v_step <= 0.1, ValidationError,
                 "cf.v_step must lie in [1e-8, 0.1]");
    ADOL_REQUIRE(time_panels >= 1 && time_panels <= 256, ValidationError,
                 "cf.time_panels must lie in [1, 256]");
    ADOL_REQUIRE(hermite_nodes >= 1 && hermite_nodes <= 32, ValidationError,
                 "cf.hermite_nodes must lie in [1, 32]");
    quad.validate();
    ode.validate();
}

struct CfEngine::Frequency {
    Complex u;
    CfCoefficients coeffs;
    bool v_free = false;  // z0 does not depend on v
};

struct CfEngine::Node {
    double s;
    double weight;     // Gauss-Legendre weight times ds/dy
    double dt;         // s - t
    double a_s;        // alpha1(s)
    double drift_s;    // cumulative drift kernel at s
    double var_s;      // cumulative nu^2 alpha1^2 at s
    double nu;
    double m;
    double decay_int;  // integral of e^{-2 kappa r} over [0, dt]
    double sig_decay;  // e^{-kappa dt}
    std::shared_ptr<const TimeNodes> child;
};

struct CfEngine::TimeNodes {
    double t;
    double a_t;
    double drift_t;
    double var_t;
    std::vector<Node> nodes;
};

namespace {
constexpr int kGlOrder = 8;
constexpr double kGrading = 5.0;  // s = t + (T - t) y^5 absorbs the nu(s) singularity at s = 0
}  // namespace

CfEngine::CfEngine(const AdolModel& model, const CorrectionConfig& cfg)
    : model_(model), cfg_(cfg) {
    model_.validate();
    cfg_.validate();
    green_ = std::make_shared<GreenPieces>(model_);
    gl_ = gauss_legendre(kGlOrder);
    gh_ = gauss_hermite(cfg_.hermite_nodes);
    if (cfg_.order > 0 && model_.theta == 0.0) root_ = build_nodes(0.0, cfg_.order > 1);
}

std::shared_ptr<const CfEngine::TimeNodes> CfEngine::build_nodes(double t, bool with_children) const {
    const GreenPieces& g = *green_;
    const double T = model_.t_mat;
    auto tn = std::make_shared<TimeNodes>();
    tn->t = t;
    tn->a_t = g.alpha1(t);
    tn->drift_t = g.drift_kernel_integral(t);
    tn->var_t = g.nu2_alpha2_integral(t);
    if (t >= T) return tn;
    const int panels = cfg_.time_panels;
    for (int p = 0; p < panels; ++p) {
        const double y0 = static_cast<double>(p) / panels;
        const double hy = 1.0 / panels;
        for (int j = 0; j < kGlOrder; ++j) {
            const double y = y0 + 0.5 * hy * (1.0 + gl_.nodes[j]);
            const double s = t + (T - t) * std::pow(y, kGrading);
            const double ds = (T - t) * kGrading * std::pow(y, kGrading - 1.0);
            if (s <= t || ds == 0.0) continue;
            Node n;
            n.s = s;
            n.weight = 0.5 * hy * gl_.weights[j] * ds;
            n.dt = s - t;
            n.a_s = g.alpha1(s);
            n.drift_s = g.drift_kernel_integral(s);
            n.var_s = g.nu2_alpha2_integral(s);
            n.nu = nu_t(s, green_->constants());
            n.m = m_t(s, model_);
            n.decay_int = decay_integral(model_.kappa, n.dt);
            n.sig_decay = std::exp(-model_.kappa * n.dt);
            if (with_children) n.child = build_nodes(s, false);
            tn->nodes.push_back(std::move(n));
        }
    }
    return tn;
}

std::shared_ptr<const CfEngine::Frequency> CfEngine::prepare(Complex u) const {
    auto f = std::make_shared<Frequency>();
    f->u = u;
    if (cfg_.mode == CfMode::closed_form) {
        f->coeffs = coeffs_closed_form(u, model_);
        f->v_free = model_.rho == 0.0 || u == 0.0;
    } else {
        f->coeffs = coeffs_affine_ode(u, model_, cfg_.ode);
        f->v_free = true;
    }
    return f;
}

Complex CfEngine::z0(Complex u, double t, Complex sigma, Complex v) const {
    return z(0, u, t, sigma, v);
}

Complex CfEngine::z(int order, Complex u, double t, Complex sigma, Complex v) const {
    ADOL_REQUIRE(order >= 0 && order <= 2, DomainError, "CfEngine::z: order must be 0, 1 or 2");
    ADOL_REQUIRE(t >= 0.0 && t <= model_.t_mat, DomainError, "CfEngine::z: t outside [0, T]");
    if (order > 0)
        ADOL_REQUIRE(model_.theta == 0.0, DomainError,
                     "xi corrections are only available for theta = 0");
    const auto f = prepare(u);
    if (order == 0) return std::exp(f->coeffs.exponent(t, sigma, v));
    const auto tn = (t == 0.0 && root_ && (order == 1 || cfg_.order > 1)) ? root_ : build_nodes(t, order > 1);
    return z_at(*f, order, *tn, sigma, v);
}

Complex CfEngine::z_at(const Frequency& f, int order, const TimeNodes& tn, Complex sigma, Complex v) const {
    if (order == 0) return std::exp(f.coeffs.exponent(tn.t, sigma, v));
    if (tn.t >= model_.t_mat) return 0.0;
    const Complex u = f.u;
    const Complex iu = kI * u;
    const Complex half_uu = 0.5 * u * (kI + u);
    const double drift = model_.r - model_.q;
    const Complex shift = iu * model_.rho * sigma * std::exp(model_.kappa * tn.t);

    Complex acc{};
    for (const Node& n : tn.nodes) {
        const Complex prop = std::exp(-half_uu * sigma * sigma * n.decay_int + iu * drift * n.dt);
        const Complex sig_s = sigma * n.sig_decay;
        const Complex mean = (v * tn.a_t + shift * (n.drift_s - tn.drift_t)) / n.a_s;
        const double sd = std::sqrt(std::max(n.var_s - tn.var_t, 0.0)) / n.a_s;
        Complex ev{};
        for (std::size_t q = 0; q < gh_.nodes.size(); ++q)
            ev += gh_.weights[q] * source(f, order, n, sig_s, mean + sd * gh_.nodes[q]);
        acc += n.weight * prop * ev;
    }
    return acc;
}

Complex CfEngine::source(const Frequency& f, int order, const Node& n, Complex sigma, Complex v) const {
    if (order == 1) return phi1(f, 0, n, sigma, v);
    return phi2(f, n, sigma, v) + phi1(f, 1, n, sigma, v);
}

namespace {

// z0 at a fixed time with the coefficient functions evaluated once
struct FrozenZ0 {
    Complex a, g, b, gb;
    FrozenZ0(const CfCoefficients& c, double s)
        : a(c.alpha(s)), g(c.gamma(s)), b(c.beta_bar(s)), gb(c.gamma_bar(s)) {}
    Complex operator()(Complex sigma, Complex v) const {
        return std::exp(a + g * sigma * sigma + b * sigma * v + gb * sigma);
    }
};

double stencil_step(double rel, Complex state) {
    const double h = rel * std::max(1.0, std::abs(state));
    if (!(h > 1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(state))))
        throw NumericalError("correction: finite-difference stencil underflow");
    return h;
}

}  // namespace

// Phi_1 = nu^2 sigma d^2/(dv dsigma) + (i u rho nu sigma - m v) sigma d/dsigma
Complex CfEngine::phi1(const Frequency& f, int base, const Node& n, Complex sigma, Complex v) const {
    const double h = stencil_step(cfg_.sigma_step, sigma);
    const TimeNodes* child = n.child.get();
    std::shared_ptr<const TimeNodes> local;
    if (base > 0 && child == nullptr) {
        local = build_nodes(n.s, false);
        child = local.get();
    }
    std::optional<FrozenZ0> z0;
    if (base == 0) z0.emplace(f.coeffs, n.s);
    auto g = [&](Complex sg, Complex vv) { return base == 0 ? (*z0)(sg, vv) : z_at(f, base, *child, sg, vv); };
    const Complex d_sigma = (g(sigma + h, v) - g(sigma - h, v)) / (2.0 * h);
    Complex mixed{};
    if (!(base == 0 && f.v_free)) {
        const double k = stencil_step(cfg_.v_step, v);
        mixed = (g(sigma + h, v + k) - g(sigma + h, v - k) - g(sigma - h, v + k) +
                 g(sigma - h, v - k)) /
                (4.0 * h * k);
    }
    return n.nu * n.nu * sigma * mixed + (kI * f.u * model_.rho * n.nu * sigma - n.m * v) * sigma * d_sigma;
}

// Phi_2 = 1/2 nu^2 sigma^2 d^2/dsigma^2
Complex CfEngine::phi2(const Frequency& f, const Node& n, Complex sigma, Complex v) const {
    const double h = stencil_step(cfg_.sigma_step, sigma);
    const FrozenZ0 z0(f.coeffs, n.s);
    auto g = [&](Complex sg) { return z0(sg, v); };
    const Complex d2 = (g(sigma + h) - 2.0 * g(sigma) + g(sigma - h)) / (h * h);
    return 0.5 * n.nu * n.nu * sigma * sigma * d2;
}

Complex CfEngine::total(Complex u) const {
    const auto f = prepare(u);
    const Complex s0 = model_.sigma0;
    const Complex v0 = model_.v0;
    Complex out = std::exp(f->coeffs.exponent(0.0, s0, v0));
    if (model_.xi == 0.0 || cfg_.order == 0) return out;
    ADOL_REQUIRE(model_.theta == 0.0, DomainError, "xi corrections are only available for theta = 0");
    double xp = 1.0;
    for (int i = 1; i <= cfg_.order; ++i) {
        xp *= model_.xi;
        out += xp * z_at(*f, i, *root_, s0, v0);
    }
    return out;
}

Complex CfEngine::correction(int order, Complex u) const {
    ADOL_REQUIRE(order == 1 || order == 2, DomainError, "correction: order must be 1 or 2");
    return z(order, u, 0.0, model_.sigma0, model_.v0);
}

Complex correction(int order, Complex u, const AdolModel& model, const CorrectionConfig& cfg) {
    return CfEngine(model, cfg).correction(order, u);
}

Complex cf_total(Complex u, const AdolModel& model, const CorrectionConfig& cfg) {
    return CfEngine(model, cfg).total(u);
}

// ---------------------------------------------------------------------------

ResidualStats pde_residual(const StateFunction& z, Complex u, const AdolModel& model,
                           const std::vector<ResidualPoint>& points) {
    const DoConstants c = model.constants();
    const Complex iu = kI * u;
    ResidualStats st;
    double sum = 0.0;
    for (const auto& p : points) {
        ADOL_REQUIRE(p.t > 0.0 && p.t < model.t_mat && p.sigma > 0.0, DomainError,
                     "pde_residual: point outside the interior");
        const double ht = std::min({1e-5 * model.t_mat, 0.5 * p.t, 0.5 * (model.t_mat - p.t)});
        const double hs = 1e-4 * std::max(1.0, p.sigma);
        const double hv = 1e-4 * std::max(1.0, std::abs(p.v));
        const double t = p.t, s = p.sigma, v = p.v;
        const Complex z0 = z(t, s, v);
        const Complex zt = (z(t + ht, s, v) - z(t - ht, s, v)) / (2.0 * ht);
        const Complex zsp = z(t, s + hs, v), zsm = z(t, s - hs, v);
        const Complex zvp = z(t, s, v + hv), zvm = z(t, s, v - hv);
        const Complex zs = (zsp - zsm) / (2.0 * hs);
        const Complex zss = (zsp - 2.0 * z0 + zsm) / (hs * hs);
        const Complex zv = (zvp - zvm) / (2.0 * hv);
        const Complex zvv = (zvp - 2.0 * z0 + zvm) / (hv * hv);
        const Complex zsv = (z(t, s + hs, v + hv) - z(t, s + hs, v - hv) - z(t, s - hs, v + hv) +
                             z(t, s - hs, v - hv)) /
                            (4.0 * hs * hv);
        const double nu = nu_t(t, c);
        const double m = m_t(t, model);
        const double xi = model.xi;
        const Complex terms[] = {
            zt,
            0.5 * xi * xi * nu * nu * s * s * zss,
            0.5 * nu * nu * zvv,
            xi * nu * nu * s * zsv,
            (-(model.kappa + xi * m * v) + iu * model.rho * xi * nu * s) * s * zs,
            model.kappa * model.theta * zs,
            (iu * model.rho * nu * s - m * v) * zv,
            (-0.5 * u * (kI + u) * s * s + iu * (model.r - model.q)) * z0,
        };
        Complex total{};
        double biggest = 0.0;
        for (const Complex& x : terms) {
            total += x;
            biggest = std::max(biggest, std::abs(x));
        }
        const double r = biggest > 0.0 ? std::abs(total) / biggest : std::abs(total);
        st.max_normalized = std::max(st.max_normalized, r);
        sum += r;
        ++st.points;
    }
    st.mean_normalized = st.points ? sum / static_cast<double>(st.points) : 0.0;
    return st;
}

std::vector<ResidualPoint> random_interior_points(const AdolModel& model, std::size_t n,
                                                  std::uint64_t seed) {
    Xoshiro256 eng(seed, 0);
    std::uniform_real_distribution<double> ut(model.eps, model.t_mat);
    std::uniform_real_distribution<double> us(0.05, 1.0);
    std::uniform_real_distribution<double> uv(-10.0, 10.0);
    std::vector<ResidualPoint> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = ut(eng);
        t = std::clamp(t, 1.01 * model.eps, 0.999 * model.t_mat);
        pts.push_back({t, us(eng), uv(eng)});
    }
    return pts;
}

}  // namespace adol
