import math

import pytest

from fakesearch.errors import RegimeError
from fakesearch.first_best import (AGENT, PRINCIPAL, first_best_duration, first_best_payoff, first_best_slope,
                                   solve_first_best)
from fakesearch.model import ExponentialBandit, HyperbolicHazard, ModelParams

import oracles

P = ModelParams(0.5, 0.7, 0.4, 0.1, 0.1)
N = HyperbolicHazard()


def test_durations_hyperbolic_closed_form():
    # H(t) = 1/(1+t) = phi  =>  t = 1/phi - 1
    assert first_best_duration(PRINCIPAL, P, N) == pytest.approx(1 / P.phi_P - 1, abs=1e-12)
    assert first_best_duration(AGENT, P, N) == pytest.approx(1 / P.phi_A - 1, abs=1e-12)


def test_durations_match_bisection_oracle_other_family():
    n = HyperbolicHazard(1.3, 0.7)
    for player, phi in ((PRINCIPAL, P.phi_P), (AGENT, P.phi_A)):
        assert first_best_duration(player, P, n) == pytest.approx(oracles.tau(phi, 1.3, 0.7), abs=1e-10)


@pytest.mark.parametrize("t", [0.0, 0.3, 1.142857, 3.0, 12.0])
def test_payoff_matches_quadrature_oracle(t):
    assert first_best_payoff(PRINCIPAL, t, P, N) == pytest.approx(oracles.u_fb_P(t, **oracles.CANON), abs=1e-11)
    assert first_best_payoff(AGENT, t, P, N) == pytest.approx(oracles.u_fb_A(t, **oracles.CANON), abs=1e-11)


def test_payoff_at_zero_is_default():
    assert first_best_payoff(PRINCIPAL, 0.0, P, N) == 0.7
    assert first_best_payoff(AGENT, 0.0, P, N) == 0.5


def test_payoff_never_stop():
    # only the discounted arrival flow survives
    expected = oracles.quad(lambda x: math.exp(-0.1 * x) * oracles.dens(x), 0, math.inf) * (0.5 + 0.5 * 0.7)
    assert first_best_payoff(PRINCIPAL, math.inf, P, N) == pytest.approx(expected, rel=1e-9)


def test_duration_maximises_payoff():
    tP = first_best_duration(PRINCIPAL, P, N)
    u = first_best_payoff(PRINCIPAL, tP, P, N)
    for dt in (-0.2, -0.01, 0.01, 0.2):
        assert first_best_payoff(PRINCIPAL, tP + dt, P, N) < u


@pytest.mark.parametrize("player", [PRINCIPAL, AGENT])
@pytest.mark.parametrize("t", [0.1, 0.9, 2.5, 5.0])
def test_slope_matches_finite_difference(player, t):
    h = 1e-5
    fd = (first_best_payoff(player, t + h, P, N) - first_best_payoff(player, t - h, P, N)) / (2 * h)
    assert first_best_slope(player, t, P, N) == pytest.approx(fd, rel=1e-6, abs=1e-10)


def test_agent_waits_longer_under_a2():
    fb = solve_first_best(P, N)
    assert fb.tau_A > fb.tau_P


def test_zero_duration_raises():
    with pytest.raises(RegimeError):
        first_best_duration(PRINCIPAL, P.with_(rho=2.0), N)


def test_defective_news_duration():
    n = ExponentialBandit(0.8, 1.0)
    tP = first_best_duration(PRINCIPAL, P, n)
    assert float(n.hazard(tP)) == pytest.approx(P.phi_P, rel=1e-10)
