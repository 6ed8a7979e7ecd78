#include <adol/error.hpp>
#include <adol/model.hpp>

#include <doctest.h>

#include <cmath>

using namespace adol;
using doctest::Approx;

TEST_CASE("table-1 model is valid") {
    const AdolModel m = AdolModel::table1();
    CHECK_NOTHROW(m.validate());
    CHECK(m.kappa == 2.0);
    CHECK(m.h == 0.3);
    CHECK(m.t_mat == 0.5);
}

TEST_CASE("validation rejects bad fields") {
    AdolModel m = AdolModel::table1();
    m.lambda = 0.1;
    CHECK_THROWS_AS(m.validate(), ValidationError);
    m = AdolModel::table1();
    m.rho = 1.5;
    CHECK_THROWS_AS(m.validate(), ValidationError);
    m = AdolModel::table1();
    m.h = 1.0;
    CHECK_THROWS_AS(m.validate(), ValidationError);
    m = AdolModel::table1();
    m.sigma0 = 0.0;
    CHECK_THROWS_AS(m.validate(), ValidationError);
    m = AdolModel::table1();
    m.eps = 1.0;
    CHECK_THROWS_AS(m.validate(), ValidationError);
}

TEST_CASE("m_t power law") {
    const AdolModel m = AdolModel::table1();
    CHECK(m_t(1.0, m) == Approx(1.0));
    CHECK(m_t(0.0, m) == 0.0);
    CHECK(m_t(0.25, m) == Approx(0.5));
    CHECK(m_integral(0.0, 1.0, m) == Approx(1.0 / 1.5));
}

TEST_CASE("q_drifts") {
    AdolModel m = AdolModel::table1();
    QDrifts d = q_drifts(0.25, 0.3, 5.0, m);
    CHECK(d.drift_sigma == Approx(-2.0 * 0.3));
    CHECK(d.drift_v == Approx(-0.5 * 5.0));
    m.xi = 0.05;
    d = q_drifts(0.25, 0.3, 5.0, m);
    CHECK(d.drift_sigma == Approx(-(2.0 + 0.05 * 0.5 * 5.0) * 0.3));
    CHECK(q_drifts(0.25, 0.3, 0.0, m).drift_v == 0.0);
    m.r = 0.03;
    m.q = 0.01;
    CHECK(q_drifts(0.1, 0.3, 1.0, m).drift_s == Approx(0.02));
}

TEST_CASE("p_drift_v") {
    AdolModel m = AdolModel::table1();
    CHECK(p_drift_v(m.eps, 1.0, m) == Complex(0.0, 0.0));
    CHECK(p_drift_v(0.5 * m.eps, 3.0, m) == Complex(0.0, 0.0));
    const Complex d = p_drift_v(0.5, 1.0, m);
    CHECK(d.real() == Approx(-0.8));
    CHECK(d.imag() == Approx(0.11425690281805732).epsilon(1e-12));
    m.h = 0.5;
    const Complex z = p_drift_v(0.5, 2.0, m);
    CHECK(std::abs(z) <= 1e-12);
    // continuity on (eps, inf)
    m = AdolModel::table1();
    const double t = 0.3;
    CHECK(std::abs(p_drift_v(t + 1e-9, 1.0, m) - p_drift_v(t, 1.0, m)) <= 1e-6);
}

TEST_CASE("small-parameter bound") {
    CHECK(small_param_bound(0.5, 1.0) == Approx(2.0).epsilon(1e-12));
    CHECK(small_param_bound(0.3, 0.5) == Approx(0.8407528823472642).epsilon(1e-12));
    AdolModel m = AdolModel::table1();
    CHECK(small_param_check(m).admissible);
    m.xi = 0.05;
    const SmallParamReport r = small_param_check(m);
    CHECK(r.admissible);
    CHECK(r.margin == 0.25);
    m.xi = 1.0;
    CHECK_FALSE(small_param_check(m).admissible);
    for (double h : {0.1, 0.3, 0.7})
        for (double t = 0.1; t < 1.0; t += 0.1) CHECK(small_param_bound(h, t + 0.1) < small_param_bound(h, t));
}
