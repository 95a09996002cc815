"""Equilibrium construction: threshold sigma_bar, soft deadline tau_M, strategies and beliefs.

With beneficial search the faker's hazard of faking and the principal's hazard
of stopping on ``[tau_M, tau_P]`` are pinned down by the opponent's
indifference:

    H_A(t) = (mu (1 - theta) H_R(t) - rho theta) / (theta - mu)
    H_P(t) = (beta (1 - mu) H_R(t) - rho mu) / (mu - beta)

Both integrate in closed form through the cumulative hazard of the news
process, so strategy CDFs are exact exponentials of linear combinations of
``Lambda(t)`` and ``t``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _numerics
from .errors import DomainError, InconsistencyError, RegimeError
from .first_best import AGENT, PRINCIPAL, first_best_duration, first_best_payoff
from .model import ModelParams, NewsProcess, require_valid
from .payoff import constant_action
from .strategy import MixedStrategy

SUPPORT_TOL = 1e-9


class Regime(str, enum.Enum):
    BENEFICIAL = "beneficial"
    NON_BENEFICIAL = "non_beneficial"


def faking_hazard_integral(a, b, params, news):
    """``int_a^b H_A(s) ds`` with the principal's ``theta`` from ``params``."""
    p = params
    dlam = news.cumulative_hazard(b) - news.cumulative_hazard(a)
    return (p.mu * (1.0 - p.theta) * dlam - p.rho * p.theta * (np.asarray(b) - a)) / (p.theta - p.mu)


def stopping_hazard_integral(a, b, params, news):
    """``int_a^b H_P(s) ds``."""
    p = params
    dlam = news.cumulative_hazard(b) - news.cumulative_hazard(a)
    return (p.beta * (1.0 - p.mu) * dlam - p.rho * p.mu * (np.asarray(b) - a)) / (p.mu - p.beta)


def _check_support(t, support):
    if support is None:
        return
    lo, hi = support
    t_arr = np.asarray(t)
    if np.any(t_arr < lo - SUPPORT_TOL) or np.any(t_arr > hi + SUPPORT_TOL):
        raise DomainError(f"t={t!r} outside the mixing support [{lo:.10g}, {hi:.10g}]")


def agent_hazard(t, params, news, support=None):
    """Faker's hazard of faking, ``sigma f_A / (1 - sigma F_A)``, on the mixing support.

    ``support`` defaults to ``[0, tau_P]``, where the expression is non-negative.
    """
    if support is None:
        support = (0.0, first_best_duration(PRINCIPAL, params, news))
    _check_support(t, support)
    p = params
    return (p.mu * (1.0 - p.theta) * news.hazard(t) - p.rho * p.theta) / (p.theta - p.mu)


def principal_hazard(t, params, news, support=None):
    """Principal's hazard of stopping, ``f_P / (1 - F_P)``, on the mixing support."""
    if support is None:
        support = (0.0, first_best_duration(PRINCIPAL, params, news))
    _check_support(t, support)
    p = params
    return (p.beta * (1.0 - p.mu) * news.hazard(t) - p.rho * p.mu) / (p.mu - p.beta)


def sigma_bar(params, news, tau_P=None):
    """Largest faker prior compatible with beneficial search."""
    if tau_P is None:
        require_valid(params, news)
        tau_P = first_best_duration(PRINCIPAL, params, news, check=False)
    h0 = agent_hazard(0.0, params, news, support=(0.0, tau_P))
    total = float(faking_hazard_integral(0.0, tau_P, params, news))
    if h0 <= 0.0 or total <= 0.0:
        raise InconsistencyError(f"faking hazard not positive before tau_P (H_A(0)={h0:.6g})")
    return -math.expm1(-total)


def solve_tau_M(sigma, params, news, tau_P=None, sbar=None):
    """Soft deadline: the ``tau`` in ``(0, tau_P)`` with ``1 - exp(-int_tau^tau_P H_A) = sigma``."""
    if tau_P is None:
        require_valid(params, news)
        tau_P = first_best_duration(PRINCIPAL, params, news, check=False)
    if sbar is None:
        sbar = sigma_bar(params, news, tau_P)
    if sigma >= sbar:
        raise RegimeError(f"sigma={sigma:.6g} >= sigma_bar={sbar:.6g}: no beneficial-search "
                          "equilibrium; build the non-beneficial one instead")
    if sigma <= 0.0:
        return tau_P
    target = -math.log1p(-sigma)
    f = lambda tau: float(faking_hazard_integral(tau, tau_P, params, news)) - target
    return _numerics.root(f, 0.0, tau_P)


def fixed_point_residual(tau_M, sigma, params, news, tau_P):
    return abs(-math.expm1(-float(faking_hazard_integral(tau_M, tau_P, params, news))) - sigma)


def posterior_formula(t, params, news):
    """Posterior after type-1 news while the faker mixes with the indifference hazard."""
    p = params
    return p.theta + (p.theta - p.mu) * p.rho * p.theta / (
        news.hazard(t) * p.mu * (1.0 - p.mu) - p.rho * p.theta)


@dataclass(frozen=True)
class Equilibrium:
    regime: Regime
    params: ModelParams
    news: NewsProcess
    tau_M: float
    tau_P: float
    faking: MixedStrategy
    stopping: MixedStrategy
    action: Callable = field(repr=False)
    belief: Callable = field(repr=False)
    value_P: float
    value_A: float
    sigma_bar: float

    def faking_cdf(self, t):
        if np.any(np.asarray(t) < 0):
            raise DomainError("t must be non-negative")
        return self.faking.cdf(t)

    def stopping_cdf(self, t):
        if np.any(np.asarray(t) < 0):
            raise DomainError("t must be non-negative")
        return self.stopping.cdf(t)

    def posterior(self, t):
        return posterior(t, self)

    @property
    def stopping_atom(self):
        """``(time, mass)`` of the principal's terminal atom."""
        return self.stopping.atoms[-1] if self.stopping.atoms else (self.tau_P, 0.0)

    def summary(self):
        t_atom, m_atom = self.stopping_atom
        return {
            "regime": self.regime.value,
            "tau_M": self.tau_M,
            "tau_P": self.tau_P,
            "sigma_bar": self.sigma_bar,
            "value_P": self.value_P,
            "value_A": self.value_A,
            "stopping_atom_time": t_atom,
            "stopping_atom_mass": m_atom,
            "faking_never_mass": self.faking.never_mass,
        }


def faking_strategy(tau_lo, tau_hi, params, news):
    """``F_A(t) = (1 - exp(-int_{tau_lo}^t H_A)) / sigma`` on ``[tau_lo, tau_hi]``.

    Mass not placed by ``tau_hi`` goes to 'never fake'.
    """
    sigma = params.sigma

    def cont(t):
        return -np.expm1(-faking_hazard_integral(tau_lo, t, params, news)) / sigma

    def dens(t):
        h = (params.mu * (1.0 - params.theta) * news.hazard(t) - params.rho * params.theta) / (
            params.theta - params.mu)
        return h * np.exp(-faking_hazard_integral(tau_lo, t, params, news)) / sigma

    placed = float(cont(tau_hi))
    return MixedStrategy(cont, dens, (tau_lo, tau_hi), (), max(0.0, 1.0 - placed))


def stopping_strategy(tau_lo, tau_hi, params, news):
    """``F_P(t) = 1 - exp(-int_{tau_lo}^t H_P)`` on ``[tau_lo, tau_hi)`` and an atom at ``tau_hi``."""

    def cont(t):
        return -np.expm1(-stopping_hazard_integral(tau_lo, t, params, news))

    def dens(t):
        h = (params.beta * (1.0 - params.mu) * news.hazard(t) - params.rho * params.mu) / (
            params.mu - params.beta)
        return h * np.exp(-stopping_hazard_integral(tau_lo, t, params, news))

    atom = math.exp(-float(stopping_hazard_integral(tau_lo, tau_hi, params, news)))
    return MixedStrategy(cont, dens, (tau_lo, tau_hi), ((tau_hi, atom),), 0.0)


def _belief_on(support, params, news):
    lo, hi = support

    def mu1(t):
        t_arr = np.asarray(t, dtype=float)
        inside = (t_arr >= lo) & (t_arr <= hi)
        val = np.where(inside, posterior_formula(np.clip(t_arr, lo, hi), params, news), 1.0)
        return float(val) if np.ndim(t) == 0 else val

    return mu1


def beneficial_equilibrium(params, news, tau_M, tau_P, sbar):
    """Assemble the beneficial-search profile for a given soft deadline (no solving)."""
    if params.sigma == 0.0:
        faking = MixedStrategy.never()
        stopping = MixedStrategy.point_mass(tau_P)
        belief = lambda t: 1.0 if np.ndim(t) == 0 else np.ones(np.shape(t))
    else:
        faking = faking_strategy(tau_M, tau_P, params, news)
        stopping = stopping_strategy(tau_M, tau_P, params, news)
        belief = _belief_on((tau_M, tau_P), params, news)
    return Equilibrium(
        regime=Regime.BENEFICIAL, params=params, news=news, tau_M=tau_M, tau_P=tau_P,
        faking=faking, stopping=stopping, action=constant_action(1.0), belief=belief,
        value_P=first_best_payoff(PRINCIPAL, tau_M, params, news),
        value_A=first_best_payoff(AGENT, tau_M, params, news),
        sigma_bar=sbar,
    )


def non_beneficial_equilibrium(params, news, tau_P, sbar):
    """Immediate stopping against the faking CDF anchored at 0, truncated at ``tau_P``.

    The faker places ``sigma_bar / sigma`` of his mass on ``[0, tau_P]`` and
    never fakes otherwise; the principal's payoff of any stopping time is then
    at most ``theta``.
    """
    faking = faking_strategy(0.0, tau_P, params, news)
    return Equilibrium(
        regime=Regime.NON_BENEFICIAL, params=params, news=news, tau_M=0.0, tau_P=tau_P,
        faking=faking, stopping=MixedStrategy.point_mass(0.0), action=constant_action(1.0),
        belief=_belief_on((0.0, tau_P), params, news),
        value_P=params.theta, value_A=params.beta, sigma_bar=sbar,
    )


def build_equilibrium(params, news, horizon=None):
    """The beneficial-search equilibrium when ``sigma < sigma_bar``, else the immediate-stop one."""
    require_valid(params, news, horizon)
    tau_P = first_best_duration(PRINCIPAL, params, news, horizon, check=False)
    sbar = sigma_bar(params, news, tau_P)
    if params.sigma < sbar:
        tau_M = solve_tau_M(params.sigma, params, news, tau_P, sbar)
        return beneficial_equilibrium(params, news, tau_M, tau_P, sbar)
    return non_beneficial_equilibrium(params, news, tau_P, sbar)


def posterior(t, eq):
    """Posterior that the risky payoff is 1 after type-1 news at ``t``.

    Equals 1 off the faking support and follows the closed form on it.
    """
    if np.any(np.asarray(t) < 0):
        raise DomainError("t must be non-negative")
    if eq.params.sigma == 0.0:
        return eq.belief(t)
    lo, hi = eq.tau_M, eq.tau_P
    t_arr = np.asarray(t, dtype=float)
    inside = (t_arr >= lo) & (t_arr <= hi)
    if np.any(inside):
        denom = np.asarray(eq.news.hazard(np.clip(t_arr, lo, hi))) * eq.params.mu * (1 - eq.params.mu) \
            - eq.params.rho * eq.params.theta
        if np.any(denom[inside] <= 0):
            raise InconsistencyError("posterior denominator non-positive on the support")
    return eq.belief(t)


def belief_floor_gap(eq):
    """``epsilon``: how far the posterior stays above ``theta`` (attained at ``tau_M``)."""
    p = eq.params
    return (p.theta - p.mu) * p.rho * p.theta / (
        float(eq.news.hazard(eq.tau_M)) * p.mu * (1.0 - p.mu) - p.rho * p.theta)
