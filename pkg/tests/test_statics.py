import numpy as np
import pytest

from fakesearch.errors import RegimeError
from fakesearch.model import ExponentialBandit, HyperbolicHazard, ModelParams
from fakesearch.statics import (agent_hazard_theta_derivative, dtauM_dsigma, dtauM_dtheta,
                                dtauP_dtheta, fosd_check, sensitivity_report)

import oracles

P = ModelParams(0.5, 0.7, 0.4, 0.1, 0.1)
N = HyperbolicHazard()


def _oracle_fd(fn, name, h=1e-5):
    kw = dict(oracles.CANON, sigma=0.1)
    up, dn = dict(kw, **{name: kw[name] + h}), dict(kw, **{name: kw[name] - h})
    return (fn(**up) - fn(**dn)) / (2 * h)


def test_closed_forms_against_oracle_differences():
    tm = lambda sigma, **k: oracles.tau_M(sigma, **k)
    assert dtauM_dsigma(P, N) == pytest.approx(_oracle_fd(tm, "sigma"), rel=1e-5)
    assert dtauM_dtheta(P, N) == pytest.approx(_oracle_fd(tm, "theta"), rel=1e-5)
    tp = lambda **k: oracles.tau(oracles.phi_P(**k))
    assert dtauP_dtheta(P, N) == pytest.approx(_oracle_fd(tp, "theta"), rel=1e-5)


def test_hand_value_dtauP_dtheta():
    # hyperbolic: H'(t) = -H(t)^2, so dtau_P/dtheta = -rho / (phi_P^2 mu (1-theta)^2)
    phi = 0.07 / 0.15
    assert dtauP_dtheta(P, N) == pytest.approx(-0.1 / (phi ** 2 * 0.5 * 0.09), rel=1e-12)


def test_agent_hazard_falls_in_theta():
    ts = np.linspace(0, 8 / 7, 20)
    assert np.all(agent_hazard_theta_derivative(ts, P, N) < 0)


@pytest.mark.parametrize("news", [N, ExponentialBandit(0.9, 2.0)])
def test_report_passes(news):
    rep = sensitivity_report(P.with_(sigma=0.05), news)
    assert rep.passed
    assert all(d.rel_gap < 1e-5 for d in rep.derivatives)
    assert rep.to_dict()["passed"] is True


@pytest.mark.parametrize("name,delta", [("sigma", 0.01), ("sigma", 0.04), ("theta", 0.005), ("theta", 0.01)])
def test_fosd(name, delta):
    v = fosd_check(name, delta, P, N)
    assert v.holds and v.strict and v.max_violation <= 1e-10
    assert v.tau_M[1] < v.tau_M[0]


def test_fosd_flags_regime_change():
    v = fosd_check("sigma", 0.1, P, N)
    assert v.regime_change and not v.holds


def test_statics_need_beneficial_regime():
    with pytest.raises(RegimeError):
        dtauM_dsigma(P.with_(sigma=0.3), N)
