"""Commitment remedies: naive search, delegation to the agent, delegation to an intermediary."""
from __future__ import annotations

import dataclasses
import enum
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import _numerics
from .equilibrium import Regime, build_equilibrium, sigma_bar, solve_tau_M
from .errors import FakeSearchError, RegimeError
from .first_best import AGENT, PRINCIPAL, first_best_duration, first_best_payoff
from .model import require_valid
from .payoff import constant_action, principal_payoff_path

log = logging.getLogger(__name__)

GAUSS_NODES = 48


class Conflict(str, enum.Enum):
    MILD = "mild"
    SEVERE = "severe"


def _discounted_survival(t, params, news):
    return math.exp(-params.rho * t) * float(news.survival(t))


def naive_penalty_slope(params, news):
    """Loss per unit of ``sigma`` from a fake arriving after the committed deadline is missed."""
    tau_P = first_best_duration(PRINCIPAL, params, news)
    return _discounted_survival(tau_P, params, news) * (params.theta - params.mu)


def naive_payoff(params, news):
    """Principal commits to stop at ``tau_P`` and to act on every type-1 arrival before it.

    The faker then waits until just before ``tau_P``, and a fake replaces the
    safe default with the prior ``mu``.
    """
    require_valid(params, news)
    tau_P = first_best_duration(PRINCIPAL, params, news, check=False)
    u_fb = first_best_payoff(PRINCIPAL, tau_P, params, news)
    return u_fb - _discounted_survival(tau_P, params, news) * params.sigma * (params.theta - params.mu)


def naive_threshold(params, news):
    """Prior of the faker below which naive commitment beats stopping at once (clamped to 1)."""
    require_valid(params, news)
    tau_P = first_best_duration(PRINCIPAL, params, news, check=False)
    u_fb = first_best_payoff(PRINCIPAL, tau_P, params, news)
    slope = _discounted_survival(tau_P, params, news) * (params.theta - params.mu)
    return min(1.0, (u_fb - params.theta) / slope)


@dataclass(frozen=True)
class Delegation:
    payoff: float
    conflict: Conflict
    sigma_tilde_D: float | None
    tau_A: float


def delegate_agent(params, news):
    """Hand authority to the agent, who stops at ``tau_A`` and acts on all type-1 news.

    The faker fakes just before ``tau_A``; the principal's loss relative to the
    agent's search is the fake's ``theta - mu``.
    """
    require_valid(params, news)
    tau_A = first_best_duration(AGENT, params, news, check=False)
    u_D = (first_best_payoff(PRINCIPAL, tau_A, params, news)
           - _discounted_survival(tau_A, params, news) * (params.theta - params.mu))
    conflict = Conflict.MILD if u_D >= params.theta else Conflict.SEVERE
    s_tilde = None
    if conflict is Conflict.MILD:
        tau_P = first_best_duration(PRINCIPAL, params, news, check=False)
        sbar = sigma_bar(params, news, tau_P)

        def gap(s):
            if s <= 0.0:
                return first_best_payoff(PRINCIPAL, tau_P, params, news) - u_D
            return first_best_payoff(PRINCIPAL, solve_tau_M(s, params, news, tau_P, sbar), params, news) - u_D

        hi = sbar * (1.0 - 1e-12)
        if gap(hi) >= 0.0:
            s_tilde = hi
        elif gap(0.0) <= 0.0:
            s_tilde = 0.0
        else:
            s_tilde = _numerics.root(gap, 0.0, hi)
    return Delegation(u_D, conflict, s_tilde, tau_A)


def intermediary_equilibrium(theta_I, params, news):
    """Equilibrium between the agent and an intermediary with safe payoff ``theta_I``."""
    p_I = params.with_(theta=theta_I)
    eq = build_equilibrium(p_I, news)
    if eq.regime is not Regime.BENEFICIAL:
        raise RegimeError(f"theta_I={theta_I:.6g}: sigma >= sigma_bar(theta_I)={eq.sigma_bar:.6g}")
    return eq


def intermediary_payoff(theta_I, params, news, eq_I=None):
    """Principal's expected payoff ``U(theta_I | theta)`` when the intermediary decides.

    Averages the principal's own stopping payoff (true ``theta`` in the safe
    slots, intermediary-induced faking, risky on every type-1 arrival) over
    the intermediary's stopping distribution: Gauss-Legendre on the density
    part plus the terminal atom.
    """
    if eq_I is None:
        eq_I = intermediary_equilibrium(theta_I, params, news)
    lo, hi = eq_I.tau_M, eq_I.tau_P
    x, w = np.polynomial.legendre.leggauss(GAUSS_NODES)
    s = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * w
    u = principal_payoff_path(np.append(s, hi), eq_I.faking, constant_action(1.0), params, news)
    t_atom, m_atom = eq_I.stopping_atom
    return float(np.dot(w, eq_I.stopping.pdf(s) * u[:-1]) + m_atom * u[-1])


def displayed_decomposition(t, theta_I, params, news, eq_I=None):
    """Alternative reading of ``u_P(t | theta_I, theta)``: first-best value at the soft deadline
    plus flow and terminal terms after it. Kept to report its gap to the direct evaluation,
    which equals the discounted no-news terminal term at ``tau_M``."""
    if eq_I is None:
        eq_I = intermediary_equilibrium(theta_I, params, news)
    tau_M = eq_I.tau_M
    full = principal_payoff_path(np.array([tau_M, t]), eq_I.faking, constant_action(1.0), params, news)
    tail = full[1] - full[0] + _discounted_survival(tau_M, params, news) * params.theta
    return first_best_payoff(PRINCIPAL, tau_M, params, news) + tail


@dataclass(frozen=True)
class IntermediaryResult:
    theta_I: float
    payoff: float
    value_P: float
    no_overrule: bool
    min_belief_gap: float
    candidates: int
    skipped: int
    decomposition_gap: float

    def to_dict(self):
        return dataclasses.asdict(self)


def no_overrule_gap(eq_I, theta, n_grid=200):
    """``min_t mu1(t | theta_I) - theta`` over the intermediary's support."""
    ts = np.linspace(eq_I.tau_M, eq_I.tau_P, n_grid)
    return float(np.min(eq_I.posterior(ts)) - theta)


def _try_payoff(theta_I, params, news):
    try:
        return intermediary_payoff(theta_I, params, news)
    except FakeSearchError as exc:
        log.info("intermediary candidate theta_I=%.6g skipped: %s", theta_I, exc)
        return None


def optimize_intermediary(params, news, n_grid=64, span=None, margin=1e-3, xtol=1e-6, threads=1):
    """Best intermediary bias: coarse grid on ``(max(mu + margin, theta - span), theta]``,
    then bounded Brent refinement around the best grid point."""
    require_valid(params, news)
    eq = build_equilibrium(params, news)
    if eq.regime is not Regime.BENEFICIAL:
        raise RegimeError("intermediary delegation is analysed for sigma < sigma_bar only")
    theta, mu = params.theta, params.mu
    if span is None:
        span = 0.5 * (theta - mu)
    lo = max(mu + margin, theta - span)
    grid = np.linspace(lo, theta, n_grid + 1)[1:]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            vals = list(pool.map(lambda th: _try_payoff(th, params, news), grid))
    else:
        vals = [_try_payoff(th, params, news) for th in grid]
    ok = [i for i, v in enumerate(vals) if v is not None]
    if not ok:
        raise RegimeError("no intermediary candidate keeps beneficial search")
    best = max(ok, key=lambda i: vals[i])
    a = grid[best - 1] if best > 0 else lo
    b = grid[best + 1] if best + 1 < len(grid) else theta
    th_star, u_star = grid[best], vals[best]
    if b > a:
        neg = lambda th: -v if (v := _try_payoff(th, params, news)) is not None else math.inf
        res = optimize.minimize_scalar(neg, bounds=(a, b), method="bounded", options={"xatol": xtol})
        if res.success and -res.fun > u_star:
            th_star, u_star = float(res.x), float(-res.fun)
    eq_I = intermediary_equilibrium(th_star, params, news)
    gap = no_overrule_gap(eq_I, theta)
    t_mid = 0.5 * (eq_I.tau_M + eq_I.tau_P)
    direct = principal_payoff_path(np.array([t_mid]), eq_I.faking, constant_action(1.0), params, news)[0]
    dec_gap = displayed_decomposition(t_mid, th_star, params, news, eq_I) - float(direct)
    return IntermediaryResult(float(th_star), float(u_star), eq.value_P, gap > 0, gap,
                              len(grid), len(grid) - len(ok), float(dec_gap))


@dataclass(frozen=True)
class RemedyComparison:
    u_star: float
    u_naive: float
    u_delegate: float
    conflict: Conflict
    sigma_tilde_N: float | None
    sigma_tilde_D: float | None
    sigma_bar: float
    regime: Regime
    intermediary: IntermediaryResult | None

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["conflict"] = self.conflict.value
        d["regime"] = self.regime.value
        return d


def compare_remedies(params, news, intermediary=True, threads=1):
    eq = build_equilibrium(params, news)
    deleg = delegate_agent(params, news)
    inter = None
    if intermediary and eq.regime is Regime.BENEFICIAL:
        inter = optimize_intermediary(params, news, threads=threads)
    return RemedyComparison(
        u_star=eq.value_P, u_naive=naive_payoff(params, news), u_delegate=deleg.payoff,
        conflict=deleg.conflict, sigma_tilde_N=naive_threshold(params, news),
        sigma_tilde_D=deleg.sigma_tilde_D, sigma_bar=eq.sigma_bar, regime=eq.regime,
        intermediary=inter,
    )
