import math

import pytest

import adol


def bs_variance(m):
    return m.sigma0**2 * (1 - math.exp(-2 * m.kappa * m.t_mat)) / (2 * m.kappa)


def test_constants():
    c = adol.do_constants(0.3)
    assert c.alpha_h == pytest.approx(0.6895356129907763, rel=1e-12)
    assert c.b_h == pytest.approx(2.928671287828913, rel=1e-12)
    assert adol.do_constants(0.5).d_h_sq == pytest.approx(0.0, abs=1e-12)


def test_cf_normalization_and_lognormal_limit():
    m = adol.AdolModel.table1()
    assert abs(adol.cf_zero(0.0, m) - 1) < 1e-12
    w = bs_variance(m)
    for u in (-5.0, 0.5, 3.0):
        assert abs(adol.cf_zero(u, m) - adol.bs_cf(u, 0.0, 0.0, m.t_mat, w)) < 1e-8


def test_price_matches_black_scholes_at_zero_vol_of_vol():
    m = adol.AdolModel.table1()
    cfg = adol.CorrectionConfig()
    cfg.order = 0
    price = adol.model_price(m, cfg, 1.0)
    assert price == pytest.approx(0.05559980375080709, abs=1e-6)
    iv = adol.implied_vol(price, 1.0, 1.0, 0.0, 0.0, m.t_mat, True)
    assert iv == pytest.approx(math.sqrt(bs_variance(m) / m.t_mat), rel=1e-6)


def test_first_order_against_monte_carlo():
    m = adol.AdolModel.table1()
    m.xi = 0.05
    cfg = adol.CorrectionConfig()
    cfg.order = 1
    cf = adol.model_price(m, cfg, 1.0)
    spec = adol.McSpec()
    spec.n_paths = 40000
    spec.n_steps = 100
    mc = adol.mc_price(m, spec, 1.0)
    assert abs(cf - mc.estimate) <= 4 * mc.std_error


def test_python_callable_cf():
    w = 0.04
    price = adol.fourier_price(lambda u: adol.bs_cf(u, 0.0, 0.0, 1.0, w), 1.0, 1.1, 0.0, 0.0, 1.0)
    assert price == pytest.approx(adol.bs_price(1.0, 1.1, 0.0, 0.0, w, True, 1.0), abs=1e-6)


def test_varswap():
    m = adol.AdolModel.table1()
    spec = adol.VarSwapSpec()
    spec.observation_times = [0.25, 0.5]
    spec.mc_states = 100
    r = adol.varswap_strike(m, spec)
    assert r.strike == pytest.approx(0.038909912254352429, rel=0.01)


def test_errors_surface_as_exceptions():
    m = adol.AdolModel.table1()
    m.rho = 2.0
    with pytest.raises(adol.ValidationError):
        m.validate()
    assert issubclass(adol.ValidationError, adol.Error)
    with pytest.raises(adol.DomainError):
        adol.do_constants(1.5)
