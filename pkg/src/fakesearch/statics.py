"""Comparative statics of the beneficial-search equilibrium.

Closed-form derivatives of the soft and hard deadlines, each paired with a
centered finite difference of the solver, and grid checks that raising
``sigma`` or ``theta`` shifts both equilibrium strategies toward earlier times.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .equilibrium import Regime, build_equilibrium, sigma_bar, solve_tau_M
from .errors import FakeSearchError, RegimeError
from .first_best import PRINCIPAL, first_best_duration
from .model import require_valid

FD_STEP = 1e-4
FD_RTOL = 1e-3


def _deadlines(params, news):
    require_valid(params, news)
    tau_P = first_best_duration(PRINCIPAL, params, news, check=False)
    sbar = sigma_bar(params, news, tau_P)
    if params.sigma >= sbar:
        raise RegimeError(f"sigma={params.sigma:.6g} >= sigma_bar={sbar:.6g}: statics need beneficial search")
    return solve_tau_M(params.sigma, params, news, tau_P, sbar), tau_P


def dtauM_dsigma(params, news):
    p = params
    tau_M, _ = _deadlines(params, news)
    return -(p.theta - p.mu) / ((1.0 - p.sigma) * p.mu * (1.0 - p.theta)
                                * (float(news.hazard(tau_M)) - p.phi_P))


def dtauP_dtheta(params, news):
    p = params
    _, tau_P = _deadlines(params, news)
    return p.rho / (float(news.hazard_derivative(tau_P)) * p.mu * (1.0 - p.theta) ** 2)


def agent_hazard_theta_derivative(t, params, news):
    """``d H_A(t) / d theta``; negative wherever ``H_R(t) > rho / (1 - mu)``."""
    p = params
    return -p.mu * (1.0 - p.mu) / (p.theta - p.mu) ** 2 * (news.hazard(t) - p.rho / (1.0 - p.mu))


def dtauM_dtheta(params, news):
    p = params
    tau_M, tau_P = _deadlines(params, news)
    dlam = float(news.cumulative_hazard(tau_P) - news.cumulative_hazard(tau_M))
    integral = -p.mu * (1.0 - p.mu) / (p.theta - p.mu) ** 2 * (dlam - p.rho / (1.0 - p.mu) * (tau_P - tau_M))
    h_A = (p.mu * (1.0 - p.theta) * float(news.hazard(tau_M)) - p.rho * p.theta) / (p.theta - p.mu)
    return integral / h_A


def _fd(fn, params, news, name, step):
    x = getattr(params, name)
    return (fn(params.with_(**{name: x + step}), news) - fn(params.with_(**{name: x - step}), news)) / (2 * step)


def _tau_M(params, news):
    return _deadlines(params, news)[0]


def _tau_P(params, news):
    return first_best_duration(PRINCIPAL, params, news)


@dataclass(frozen=True)
class Derivative:
    name: str
    closed_form: float
    finite_difference: float

    @property
    def rel_gap(self):
        return abs(self.closed_form - self.finite_difference) / abs(self.closed_form)

    @property
    def passed(self):
        return self.rel_gap <= FD_RTOL and self.closed_form < 0


@dataclass(frozen=True)
class FosdVerdict:
    param: str
    delta: float
    holds: bool
    strict: bool
    identical: bool
    max_violation: float
    tau_M: tuple
    tau_P: tuple
    regime_change: bool = False
    note: str = ""


@dataclass
class SensitivityReport:
    dtauM_dsigma: float
    dtauM_dtheta: float
    dtauP_dtheta: float
    derivatives: list = field(default_factory=list)
    fosd_checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(d.passed for d in self.derivatives) and all(
            v.holds for v in self.fosd_checks if not v.regime_change)

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["derivatives"] = [dict(dataclasses.asdict(x), rel_gap=x.rel_gap, passed=x.passed)
                            for x in self.derivatives]
        d["passed"] = self.passed
        return d


def fosd_check(param_name, delta, params, news, n_grid=400, tol=1e-10):
    """Do both CDFs under ``param + delta`` lie weakly above the baseline CDFs?"""
    if param_name not in ("sigma", "theta"):
        raise ValueError("fosd_check supports 'sigma' and 'theta'")
    base = build_equilibrium(params, news)
    try:
        new = build_equilibrium(params.with_(**{param_name: getattr(params, param_name) + delta}), news)
    except FakeSearchError as exc:
        return FosdVerdict(param_name, delta, False, False, False, float("nan"),
                           (base.tau_M, float("nan")), (base.tau_P, float("nan")), True, str(exc))
    taus = ((base.tau_M, new.tau_M), (base.tau_P, new.tau_P))
    if base.regime is not Regime.BENEFICIAL or new.regime is not Regime.BENEFICIAL:
        return FosdVerdict(param_name, delta, False, False, False, float("nan"), *taus, True,
                           "regime changes across the perturbation")
    t_hi = max(base.tau_P, new.tau_P)
    grid = np.unique(np.concatenate([np.linspace(0.0, 1.05 * t_hi, n_grid),
                                     [base.tau_M, base.tau_P, new.tau_M, new.tau_P]]))
    diffs = np.concatenate([new.faking.cdf(grid) - base.faking.cdf(grid),
                            new.stopping.cdf(grid) - base.stopping.cdf(grid)])
    violation = float(max(0.0, -np.min(diffs)))
    strict = bool(np.max(diffs) > tol)
    identical = bool(np.max(np.abs(diffs)) <= tol)
    holds = violation <= tol and (strict or delta == 0)
    return FosdVerdict(param_name, delta, holds, strict, identical, violation, *taus)


def sensitivity_report(params, news, step=FD_STEP, fosd_deltas=(("sigma", 0.02), ("theta", 0.02))):
    d_sig = dtauM_dsigma(params, news)
    d_mth = dtauM_dtheta(params, news)
    d_pth = dtauP_dtheta(params, news)
    derivs = [
        Derivative("dtauM_dsigma", d_sig, _fd(_tau_M, params, news, "sigma", step)),
        Derivative("dtauM_dtheta", d_mth, _fd(_tau_M, params, news, "theta", step)),
        Derivative("dtauP_dtheta", d_pth, _fd(_tau_P, params, news, "theta", step)),
    ]
    checks = [fosd_check(name, delta, params, news) for name, delta in fosd_deltas]
    return SensitivityReport(d_sig, d_mth, d_pth, derivs, checks)
