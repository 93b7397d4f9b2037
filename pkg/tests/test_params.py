"""Parameter validation, derived quantities and the deterministic spread path."""

import math

import pytest

from sshat import (
    DegenerateRateError,
    Epsilon,
    InitialState,
    ModelParams,
    epsilon,
    load_config,
    mu_hat,
    spread_path,
)

from _reference import BASE


def test_mu_hat_base_parameters(base_params):
    # lam = 0 makes the risk adjustment vanish.
    assert mu_hat(base_params) == -0.01


def test_mu_hat_zero_gamma_ignores_lambda():
    p = ModelParams(m=1.0, mu=0.02, gamma=0.0, sigma2=1e-4, lam=5.0)
    assert mu_hat(p) == 0.02


def test_mu_hat_risk_adjustment():
    p = ModelParams(m=0.5, mu=-0.01, gamma=0.01, sigma2=1e-4, lam=0.25)
    assert mu_hat(p) == pytest.approx(-0.015, rel=1e-15)


@pytest.mark.parametrize("m", [0.0, -1.0])
def test_rejects_nonpositive_mean_reversion(m):
    with pytest.raises(ValueError):
        ModelParams(m=m, mu=-0.01, gamma=0.007, sigma2=3e-4)


@pytest.mark.parametrize("sigma2", [0.0, -1e-4])
def test_rejects_nonpositive_sigma2(sigma2):
    with pytest.raises(ValueError):
        ModelParams(m=0.72, mu=-0.01, gamma=0.007, sigma2=sigma2)


def test_rejects_negative_gamma():
    with pytest.raises(ValueError):
        ModelParams(m=0.72, mu=-0.01, gamma=-0.001, sigma2=3e-4)


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        ModelParams(m=math.inf, mu=-0.01, gamma=0.007, sigma2=3e-4)
    with pytest.raises(ValueError):
        ModelParams(m=0.72, mu=math.nan, gamma=0.007, sigma2=3e-4)


def test_rejects_mu_hat_zero():
    with pytest.raises(DegenerateRateError):
        ModelParams(m=0.72, mu=0.0, gamma=0.0, sigma2=3e-4, lam=0.0)


@pytest.mark.parametrize("j", [1, 2, 3])
def test_genericity_rejects_near_multiples(j):
    # mu_hat = j*m*(1 + 0.5e-8) sits half a tolerance away from j*m.
    m = 0.72
    with pytest.raises(DegenerateRateError):
        ModelParams(m=m, mu=j * m * (1 + 0.5e-8), gamma=0.0, sigma2=3e-4)


@pytest.mark.parametrize("j", [1, 2, 3])
def test_genericity_accepts_just_outside_band(j):
    m = 0.72
    p = ModelParams(m=m, mu=j * m * (1 + 3e-8), gamma=0.0, sigma2=3e-4)
    assert p.mu_hat == pytest.approx(j * m, rel=1e-7)


def test_genericity_accepts_base(base_params):
    assert base_params.delta_gen == pytest.approx(7.2e-9)


def test_initial_state_requires_positive_l0():
    with pytest.raises(ValueError):
        InitialState(s0=0.0, l0=0.0)
    with pytest.raises(ValueError):
        InitialState(s0=0.0, l0=-0.1)


def test_epsilon_standard_spreads(base_params):
    assert epsilon(InitialState(s0=0.05, l0=0.1), base_params).value == pytest.approx(0.06, abs=1e-16)
    assert epsilon(InitialState(s0=-0.05, l0=0.1), base_params).value == pytest.approx(-0.04, abs=1e-16)


def test_epsilon_at_equilibrium_is_exactly_zero(base_params):
    state = InitialState(s0=base_params.mu_hat, l0=0.1)
    assert epsilon(state, base_params).value == 0.0


def test_epsilon_float_coercion():
    assert float(Epsilon(0.25)) == 0.25


def test_spread_path_initial_condition(base_params):
    state = InitialState(s0=0.05, l0=0.1)
    assert spread_path(state, base_params, 0.0) == 0.05


def test_spread_path_long_time_limit(base_params):
    state = InitialState(s0=0.05, l0=0.1)
    eps = 0.06
    t = 10.0 / base_params.m
    assert abs(spread_path(state, base_params, t) - base_params.mu_hat) < abs(eps) * math.exp(-10) + 1e-15


def test_spread_path_value_against_rk4(base_params):
    # Independent check: integrate ds/dt = m (mu_hat - s) with RK4 and
    # compare to the closed form at t = 1.
    state = InitialState(s0=0.05, l0=0.1)
    m, mh = base_params.m, base_params.mu_hat
    s = state.s0
    n = 4000
    h = 1.0 / n
    for _ in range(n):
        k1 = m * (mh - s)
        k2 = m * (mh - (s + 0.5 * h * k1))
        k3 = m * (mh - (s + 0.5 * h * k2))
        k4 = m * (mh - (s + h * k3))
        s += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    closed = spread_path(state, base_params, 1.0)
    assert closed == pytest.approx(-0.01 + 0.06 * math.exp(-0.72), rel=1e-14)
    assert closed == pytest.approx(s, abs=1e-12)


def test_spread_path_rejects_negative_time(base_params):
    with pytest.raises(ValueError):
        spread_path(InitialState(s0=0.05, l0=0.1), base_params, -0.1)


def test_spread_path_satisfies_its_ode(base_params):
    # Central differences of the path against the drift m (mu_hat - s).
    import random

    rng = random.Random(20240811)
    state = InitialState(s0=0.05, l0=0.1)
    h = 1e-5
    for _ in range(100):
        t = rng.uniform(h, 30.0)
        ds = (spread_path(state, base_params, t + h) - spread_path(state, base_params, t - h)) / (2 * h)
        drift = base_params.m * (base_params.mu_hat - spread_path(state, base_params, t))
        assert abs(ds - drift) < 1e-8


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_load_config_roundtrip(tmp_path):
    cfg = _write(
        tmp_path / "base.cfg",
        "# base configuration\n"
        "m = 0.72\nmu = -0.01\ngamma = 0.007\nsigma2 = 0.0003\nlambda = 0\n"
        "s0 = -0.05\nl0 = 0.1\n",
    )
    params, state = load_config(cfg)
    assert params == ModelParams(**BASE)
    assert state == InitialState(s0=-0.05, l0=0.1)


def test_load_config_rejects_unknown_key(tmp_path):
    cfg = _write(tmp_path / "bad.cfg", "m = 0.72\nM = 1\n")
    with pytest.raises(ValueError, match="unknown key"):
        load_config(cfg)


def test_load_config_rejects_missing_keys(tmp_path):
    cfg = _write(tmp_path / "partial.cfg", "m = 0.72\nmu = -0.01\n")
    with pytest.raises(ValueError, match="missing"):
        load_config(cfg)


def test_load_config_rejects_duplicates_and_garbage(tmp_path):
    with pytest.raises(ValueError, match="duplicate"):
        load_config(_write(tmp_path / "dup.cfg", "m = 0.72\nm = 0.8\n"))
    with pytest.raises(ValueError, match="expected"):
        load_config(_write(tmp_path / "garbage.cfg", "m 0.72\n"))
    with pytest.raises(ValueError, match="invalid number"):
        load_config(_write(tmp_path / "nan.cfg", "m = fast\n"))
