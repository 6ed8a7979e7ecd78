#include <adol/error.hpp>
#include <adol/model.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace adol {

namespace {

void check(bool ok, const char* field, const char* rule) {
    if (!ok) {
        std::ostringstream os;
        os << "AdolModel." << field << ": " << rule;
        throw ValidationError(os.str());
    }
}

}  // namespace

void AdolModel::validate() const {
    check(s0 > 0.0 && std::isfinite(s0), "s0", "must be > 0");
    check(sigma0 > 0.0 && std::isfinite(sigma0), "sigma0", "must be > 0");
    check(std::isfinite(v0), "v0", "must be finite");
    check(std::isfinite(r) && std::isfinite(q) && std::isfinite(mu), "r/q/mu", "must be finite");
    check(kappa >= 0.0, "kappa", "must be >= 0");
    check(theta >= 0.0, "theta", "must be >= 0");
    check(xi >= 0.0, "xi", "must be >= 0");
    check(rho >= -1.0 && rho <= 1.0, "rho", "must lie in [-1, 1]");
    check(lambda == 0.0, "lambda", "market price of vol risk is fixed to 0");
    check(h > 0.0 && h < 1.0, "h", "must lie in (0, 1)");
    check(std::isfinite(m_rho), "m_rho", "must be finite");
    check(m_pi >= 0.0, "m_pi", "must be >= 0");
    check(eps > 0.0, "eps", "must be > 0");
    check(t_mat > 0.0, "t_mat", "must be > 0");
    check(eps < t_mat, "eps", "must be smaller than t_mat");
}

AdolModel AdolModel::table1() {
    AdolModel m;
    m.kappa = 2.0;
    m.h = 0.3;
    m.t_mat = 0.5;
    m.sigma0 = 0.3;
    m.v0 = 5.0;
    m.rho = -0.5;
    m.m_rho = 1.0;
    m.m_pi = 0.5;
    return m;
}

double m_t(double t, const AdolModel& model) {
    ADOL_REQUIRE(t >= 0.0, DomainError, "m_t: t must be >= 0");
    if (model.m_pi == 0.0) return model.m_rho;
    return model.m_rho * std::pow(t, model.m_pi);
}

double m_integral(double a, double b, const AdolModel& model) {
    const double p = 1.0 + model.m_pi;
    return model.m_rho * (std::pow(b, p) - std::pow(a, p)) / p;
}

QDrifts q_drifts(double t, double sigma, double v, const AdolModel& model) {
    ADOL_REQUIRE(t > 0.0, DomainError, "q_drifts: t must be > 0");
    const double m = m_t(t, model);
    return {model.r - model.q, -(model.kappa + model.xi * m * v) * sigma, -m * v};
}

Complex p_drift_v(double t, Complex v, const AdolModel& model) {
    ADOL_REQUIRE(t >= 0.0, DomainError, "p_drift_v: t must be >= 0");
    if (t <= model.eps) return 0.0;
    const DoConstants c = model.constants();
    const double d_h = std::sqrt(std::max(c.d_h_sq, 0.0));
    return kI * (c.h * d_h * std::pow(t, c.h - 1.0)) + ((2.0 * c.h - 1.0) / t) * v;
}

double small_param_bound(double h, double t) {
    ADOL_REQUIRE(t > 0.0, DomainError, "small_param_bound: T must be > 0");
    return 2.0 / (do_constants(h).b_h * std::pow(t, h));
}

SmallParamReport small_param_check(const AdolModel& model, double margin) {
    SmallParamReport rep;
    rep.f_ht = small_param_bound(model.h, model.t_mat);
    rep.xi = model.xi;
    rep.margin = margin;
    rep.admissible = model.xi <= margin * rep.f_ht;
    return rep;
}

}  // namespace adol
