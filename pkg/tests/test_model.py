import math

import numpy as np
import pytest

from fakesearch.errors import ConfigError, RegimeError
from fakesearch.model import (NEVER, ExponentialBandit, HyperbolicHazard, ModelParams, TabulatedHazard,
                              beta_lower_bound, is_never, news_from_dict, phi_thresholds, require_valid,
                              validate)

import oracles


def canon(**kw):
    d = dict(mu=0.5, theta=0.7, beta=0.4, rho=0.1, sigma=0.1)
    d.update(kw)
    return ModelParams(**d)


def test_phi_thresholds_canonical():
    th = phi_thresholds(canon())
    assert th.phi_P == pytest.approx(0.1 * 0.7 / (0.5 * 0.3), abs=1e-15)
    assert th.phi_A == pytest.approx(0.1 * 0.5 / (0.4 * 0.5), abs=1e-15)
    assert th.beta_lower == pytest.approx(0.5 * (0.5 / 0.7) * 0.3 / 0.5, abs=1e-15)


def test_beta_lower_bound_equivalent_to_a2():
    # A2 holds exactly when beta exceeds the lower bound
    bl = beta_lower_bound(0.5, 0.7)
    assert canon(beta=bl + 1e-6).phi_P > canon(beta=bl + 1e-6).phi_A
    assert canon(beta=bl - 1e-6).phi_P < canon(beta=bl - 1e-6).phi_A


@pytest.mark.parametrize("field,value", [("mu", 0.0), ("mu", 1.0), ("theta", 1.5), ("beta", -0.1),
                                         ("rho", 0.0), ("rho", -1.0), ("sigma", 1.0), ("sigma", -0.1),
                                         ("mu", math.nan), ("rho", math.inf)])
def test_params_rejects_out_of_range(field, value):
    with pytest.raises(ConfigError):
        canon(**{field: value})


def test_validate_canonical_ok():
    rep = validate(canon(), HyperbolicHazard())
    assert rep.ok
    assert {c.name for c in rep.checks} == {"ordering", "A1", "A2", "hazard_decreasing"}


def test_validate_a2_failure_reason():
    rep = validate(canon(beta=0.1), HyperbolicHazard())
    assert not rep.ok
    assert "phi_A >= phi_P" in rep.reason()
    with pytest.raises(RegimeError, match="phi_A >= phi_P"):
        require_valid(canon(beta=0.1), HyperbolicHazard())


def test_validate_a1_failure_large_rho():
    rep = validate(canon(rho=1.0), HyperbolicHazard())
    assert [c.name for c in rep.failures] == ["A1"]


def test_validate_ordering_failure():
    rep = validate(canon(theta=0.45, beta=0.4), HyperbolicHazard())
    assert "ordering" in {c.name for c in rep.failures}


def test_tabulated_rejects_non_decreasing_values():
    with pytest.raises(ConfigError):
        TabulatedHazard((0.0, 1.0, 2.0), (1.0, 1.0, 0.5))


class _BumpHazard(HyperbolicHazard):
    def hazard(self, t):
        t = np.asarray(t, dtype=float)
        return 1.0 / (1.0 + t) + 0.5 * np.exp(-((t - 2.0) ** 2))


def test_validate_flags_non_monotone_hazard():
    assert "hazard_decreasing" in {c.name for c in validate(canon(), _BumpHazard()).failures}


def test_hyperbolic_matches_closed_forms():
    n = HyperbolicHazard(2.0, 0.5)
    t = np.array([0.0, 0.3, 2.0, 10.0])
    assert np.allclose(n.hazard(t), oracles.H(t, 2.0, 0.5), rtol=1e-14)
    assert np.allclose(n.survival(t), oracles.surv(t, 2.0, 0.5), rtol=1e-14)
    assert np.allclose(n.density(t), oracles.dens(t, 2.0, 0.5), rtol=1e-14)
    lam = [oracles.quad(lambda s: oracles.H(s, 2.0, 0.5), 0, x) for x in t]
    assert np.allclose(n.cumulative_hazard(t), lam, rtol=1e-12)
    assert np.allclose(n.hazard_derivative(t), -2.0 * 0.5 / (1 + 0.5 * t) ** 2, rtol=1e-12)


def test_exponential_bandit_is_defective():
    n = ExponentialBandit(0.6, 2.0)
    assert n.survival_at_infinity == pytest.approx(0.4)
    assert float(n.hazard(0.0)) == pytest.approx(0.6 * 2.0)
    t = 0.7
    lam = oracles.quad(lambda s: float(n.hazard(s)), 0, t)
    assert float(n.cumulative_hazard(t)) == pytest.approx(lam, rel=1e-10)
    h = 1e-6
    fd = (float(n.hazard(t + h)) - float(n.hazard(t - h))) / (2 * h)
    assert float(n.hazard_derivative(t)) == pytest.approx(fd, rel=1e-6)


def test_tabulated_interpolates_and_integrates_exactly():
    knots = (0.0, 0.5, 1.0, 3.0)
    vals = tuple(1.0 / (1.0 + k) for k in knots)
    n = TabulatedHazard(knots, vals)
    assert np.allclose(n.hazard(np.array(knots)), vals, rtol=1e-14)
    t = 2.2
    lam = oracles.quad(lambda s: float(n.hazard(s)), 0.0, 1.0) + oracles.quad(lambda s: float(n.hazard(s)), 1.0, t)
    assert float(n.cumulative_hazard(t)) == pytest.approx(lam, rel=1e-10)
    # extrapolation keeps decaying and the arrival distribution is defective
    assert float(n.hazard(10.0)) < vals[-1]
    assert n.survival_at_infinity > 0


def test_inverse_survival_roundtrip_and_never():
    n = ExponentialBandit(0.5, 1.0)
    u = np.array([0.9, 0.7, 0.55, 0.4, 0.1])
    t = n.inverse_survival(u)
    assert np.allclose(n.survival(t[:3]), u[:3], rtol=1e-12)
    assert np.all(np.isinf(t[3:]))  # below the defect: news never arrives
    assert is_never(NEVER)


def test_news_from_dict_roundtrip():
    for n in (HyperbolicHazard(1.5, 2.0), ExponentialBandit(0.3, 4.0), TabulatedHazard((0.0, 1.0), (2.0, 1.0))):
        assert news_from_dict(n.to_dict()) == n
    with pytest.raises(ConfigError):
        news_from_dict({"family": "nope"})
