#pragma once

#include <functional>
#include <vector>

namespace adol {

/// F(t) = integral of f over [0, t] for t in [0, t_max], where f may behave like
/// s^exponent at the origin (exponent > -1). Cells are geometric toward 0 and each
/// carries a fixed Gauss-Legendre rule, so every query is a deterministic sum.
class CumulativeIntegral {
public:
    CumulativeIntegral() = default;
    CumulativeIntegral(std::function<double(double)> f, double t_max, double exponent,
                       int levels = 44, int order = 20);

    double operator()(double t) const;
    /// Integral over [a, b].
    double between(double a, double b) const { return (*this)(b) - (*this)(a); }
    double t_max() const { return t_max_; }
    double integrand(double t) const { return f_(t); }

private:
    double cell_integral(double a, double b) const;
    double head_integral(double b) const;

    std::function<double(double)> f_;
    double t_max_ = 0.0;
    double exponent_ = 0.0;
    std::vector<double> nodes_;     // cell edges, nodes_[0] = 0
    std::vector<double> partial_;   // F at cell edges
    std::vector<double> gl_x_;
    std::vector<double> gl_w_;
};

}  // namespace adol
