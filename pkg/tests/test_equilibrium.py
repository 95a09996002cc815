import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fakesearch.equilibrium import (Regime, agent_hazard, belief_floor_gap, build_equilibrium,
                                    fixed_point_residual, principal_hazard, sigma_bar, solve_tau_M)
from fakesearch.errors import DomainError, RegimeError
from fakesearch.model import ExponentialBandit, HyperbolicHazard, ModelParams, TabulatedHazard

import oracles

P = ModelParams(0.5, 0.7, 0.4, 0.1, 0.1)
N = HyperbolicHazard()
C = oracles.CANON

# frozen oracle values (tests/oracles.py, scipy.quad + bisection)
SIGMA_BAR = 0.1576882122443357
TAU_M = 0.19819710218024
VALUE_P = 0.7120459151129369
VALUE_A = 0.5238218456484838


def test_sigma_bar_matches_oracle():
    assert sigma_bar(P, N) == pytest.approx(SIGMA_BAR, abs=1e-10)
    assert sigma_bar(P, N) == pytest.approx(oracles.sigma_bar(**C), abs=1e-10)
    integral = 0.75 * math.log(15 / 7) - 0.35 * 8 / 7
    assert sigma_bar(P, N) == pytest.approx(1 - math.exp(-integral), abs=1e-12)


def test_sigma_bar_rises_toward_one_as_theta_approaches_mu():
    vals = [sigma_bar(P.with_(theta=th, beta=0.49), N) for th in (0.6, 0.55, 0.53, 0.52)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] > 0.999


def test_sigma_bar_regime_error_when_a1_fails():
    with pytest.raises(RegimeError):
        sigma_bar(P.with_(rho=1.0), N)


def test_tau_M_matches_bisection_oracle():
    tm = solve_tau_M(0.1, P, N)
    assert tm == pytest.approx(TAU_M, abs=1e-10)
    assert fixed_point_residual(tm, 0.1, P, N, 8 / 7) <= 1e-12


def test_tau_M_limits():
    tP = 8 / 7
    # H_A vanishes at tau_P, so the gap shrinks like sqrt(sigma)
    assert solve_tau_M(1e-9, P, N) == pytest.approx(tP, abs=1e-3)
    assert solve_tau_M(SIGMA_BAR - 1e-9, P, N) == pytest.approx(0.0, abs=1e-6)
    with pytest.raises(RegimeError, match="non-beneficial"):
        solve_tau_M(0.2, P, N)


def test_hazards_hand_values():
    assert agent_hazard(0.6, P, N) == pytest.approx(0.11875, abs=1e-14)
    assert principal_hazard(0.6, P, N) == pytest.approx(0.75, abs=1e-14)
    assert agent_hazard(8 / 7, P, N) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(DomainError):
        agent_hazard(1.5, P, N)
    with pytest.raises(DomainError):
        principal_hazard(0.1, P, N, support=(0.2, 1.0))


def test_beneficial_equilibrium_objects():
    eq = build_equilibrium(P, N)
    assert eq.regime is Regime.BENEFICIAL
    assert eq.value_P == pytest.approx(VALUE_P, abs=1e-10)
    assert eq.value_A == pytest.approx(VALUE_A, abs=1e-10)
    assert eq.value_P > P.theta
    assert eq.faking.atoms == ()
    assert [t for t, _ in eq.stopping.atoms] == [eq.tau_P]
    assert eq.faking_cdf(eq.tau_P) == pytest.approx(1.0, abs=1e-10)
    assert eq.stopping_cdf(eq.tau_P) == pytest.approx(1.0, abs=1e-12)
    assert eq.faking_cdf(0.5 * eq.tau_M) == 0.0 and eq.stopping_cdf(0.5 * eq.tau_M) == 0.0
    assert eq.action(0.7) == 1.0
    ts = np.linspace(eq.tau_M, eq.tau_P, 50)[1:-1]
    assert np.all(eq.faking.pdf(ts) > 0) and np.all(eq.stopping.pdf(ts) > 0)


def test_strategy_values_match_oracles():
    eq = build_equilibrium(P, N)
    assert eq.faking_cdf(0.6) == pytest.approx(oracles.F_A(0.6, 0.1, TAU_M, **C), abs=1e-9)
    assert eq.stopping_cdf(0.6) == pytest.approx(oracles.F_P(0.6, TAU_M, **C), abs=1e-9)
    atom = 1 - oracles.F_P(eq.tau_P, TAU_M, **C)
    assert eq.stopping_atom[1] == pytest.approx(atom, abs=1e-9)
    assert eq.stopping_atom[1] == pytest.approx(0.5013, abs=5e-3)


def test_density_is_derivative_of_cdf():
    eq = build_equilibrium(P, N)
    h = 1e-6
    for t in (0.3, 0.6, 1.0):
        for s in (eq.faking, eq.stopping):
            assert s.pdf(t) == pytest.approx((s.cdf(t + h) - s.cdf(t - h)) / (2 * h), rel=1e-6)


def test_posterior_path():
    eq = build_equilibrium(P, N)
    assert eq.posterior(eq.tau_M) == pytest.approx(oracles.posterior(TAU_M, **C), abs=1e-9)
    assert eq.posterior(0.6) == pytest.approx(0.8623188405797101, abs=1e-12)
    assert eq.posterior(eq.tau_P) == pytest.approx(1.0, abs=1e-12)
    assert eq.posterior(0.1) == 1.0 and eq.posterior(2.0) == 1.0
    ts = np.linspace(eq.tau_M, eq.tau_P, 200)
    mu1 = eq.posterior(ts)
    assert np.all(np.diff(mu1) > 0)
    assert np.min(mu1) - P.theta >= belief_floor_gap(eq) - 1e-9
    with pytest.raises(DomainError):
        eq.posterior(-1.0)


def test_non_beneficial_construction():
    eq = build_equilibrium(P.with_(sigma=0.3), N)
    assert eq.regime is Regime.NON_BENEFICIAL
    assert eq.value_P == 0.7 and eq.value_A == 0.4
    assert eq.stopping.atoms == ((0.0, 1.0),)
    assert eq.faking_cdf(eq.tau_P) == pytest.approx(SIGMA_BAR / 0.3, abs=1e-10)
    assert eq.faking.never_mass == pytest.approx(1 - SIGMA_BAR / 0.3, abs=1e-10)


def test_sigma_equal_to_sigma_bar_is_non_beneficial():
    sb = sigma_bar(P, N)
    assert build_equilibrium(P.with_(sigma=sb), N).regime is Regime.NON_BENEFICIAL


def test_sigma_zero_degenerates_to_first_best():
    eq = build_equilibrium(P.with_(sigma=0.0), N)
    assert eq.tau_M == eq.tau_P
    assert eq.stopping.atoms == ((eq.tau_P, 1.0),)
    assert eq.faking.never_mass == 1.0
    assert eq.value_P == pytest.approx(oracles.u_fb_P(eq.tau_P, **C), abs=1e-10)


@pytest.mark.parametrize("news", [ExponentialBandit(0.9, 2.0), HyperbolicHazard(1.5, 0.8),
                                  TabulatedHazard((0.0, 0.5, 1.0, 2.0, 4.0), (1.0, 0.7, 0.5, 0.3, 0.15))])
def test_other_families_fixed_point(news):
    eq = build_equilibrium(P.with_(sigma=0.05), news)
    if eq.regime is Regime.BENEFICIAL:
        assert fixed_point_residual(eq.tau_M, 0.05, eq.params, news, eq.tau_P) <= 1e-8
        assert eq.faking_cdf(eq.tau_P) == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 0.15), st.floats(0.002, 0.01))
def test_comparative_statics_in_sigma(sigma, d):
    lo, hi = build_equilibrium(P.with_(sigma=sigma), N), build_equilibrium(P.with_(sigma=sigma + d), N)
    if hi.regime is Regime.BENEFICIAL:
        assert hi.tau_M < lo.tau_M
        ts = np.linspace(0, 1.2, 120)
        assert np.all(hi.faking.cdf(ts) >= lo.faking.cdf(ts) - 1e-10)
        assert np.all(hi.stopping.cdf(ts) >= lo.stopping.cdf(ts) - 1e-10)
