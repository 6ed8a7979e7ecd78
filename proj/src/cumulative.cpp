#include <adol/cumulative.hpp>
#include <adol/error.hpp>
#include <adol/numerics.hpp>

#include <algorithm>
#include <cmath>

namespace adol {

CumulativeIntegral::CumulativeIntegral(std::function<double(double)> f, double t_max,
                                       double exponent, int levels, int order)
    : f_(std::move(f)), t_max_(t_max), exponent_(exponent) {
    ADOL_REQUIRE(t_max > 0.0, DomainError, "CumulativeIntegral: t_max must be > 0");
    ADOL_REQUIRE(exponent > -1.0, DomainError, "CumulativeIntegral: exponent must be > -1");
    ADOL_REQUIRE(levels >= 2 && order >= 2, DomainError, "CumulativeIntegral: bad resolution");
    const auto rule = gauss_legendre(order);
    gl_x_ = rule.nodes;
    gl_w_ = rule.weights;

    nodes_.push_back(0.0);
    for (int j = levels - 1; j >= 0; --j) nodes_.push_back(std::ldexp(t_max, -j));
    partial_.assign(nodes_.size(), 0.0);
    partial_[1] = head_integral(nodes_[1]);
    for (std::size_t j = 2; j < nodes_.size(); ++j)
        partial_[j] = partial_[j - 1] + cell_integral(nodes_[j - 1], nodes_[j]);
}

double CumulativeIntegral::cell_integral(double a, double b) const {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t k = 0; k < gl_x_.size(); ++k) s += gl_w_[k] * f_(c + h * gl_x_[k]);
    return s * h;
}

// s = b y^p with p = 1/(exponent+1) removes the leading power of the integrand.
double CumulativeIntegral::head_integral(double b) const {
    if (b <= 0.0) return 0.0;
    const double p = 1.0 / (exponent_ + 1.0);
    double s = 0.0;
    for (std::size_t k = 0; k < gl_x_.size(); ++k) {
        const double y = 0.5 * (1.0 + gl_x_[k]);
        const double x = b * std::pow(y, p);
        s += gl_w_[k] * f_(x) * b * p * std::pow(y, p - 1.0);
    }
    return 0.5 * s;
}

double CumulativeIntegral::operator()(double t) const {
    ADOL_REQUIRE(t >= 0.0 && t <= t_max_ * (1.0 + 1e-14), DomainError,
                 "CumulativeIntegral: t outside [0, t_max]");
    t = std::min(t, t_max_);
    if (t == 0.0) return 0.0;
    if (t <= nodes_[1]) return head_integral(t);
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    const auto j = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    if (nodes_[j] == t) return partial_[j];
    return partial_[j] + cell_integral(nodes_[j], t);
}

}  // namespace adol
