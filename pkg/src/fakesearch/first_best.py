"""Single-player benchmarks: each player searches alone, all news is real.

Player ``i`` waits until ``t``, acting on any arrival, and takes the default
action if nothing arrives:

    u_i(t) = int_0^t e^{-rho x} g(x) (mu + (1 - mu) s_i) dx + e^{-rho t} (1 - G(t)) d_i

with ``(d_P, s_P) = (theta, theta)`` and ``(d_A, s_A) = (mu, beta)``. The optimal
duration solves ``H_R(tau_i) = phi_i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import _numerics
from .errors import RegimeError
from .model import default_horizon, require_valid

PRINCIPAL = "P"
AGENT = "A"


def _player(player):
    p = str(player).upper()[:1]
    if p not in (PRINCIPAL, AGENT):
        raise ValueError(f"player must be 'P' or 'A', got {player!r}")
    return p


def default_and_safe(player, params):
    """``(d_i, s_i)``: the player's value of the default action and of the safe action."""
    if _player(player) == PRINCIPAL:
        return params.theta, params.theta
    return params.mu, params.beta


def phi(player, params):
    return params.phi_P if _player(player) == PRINCIPAL else params.phi_A


@dataclass(frozen=True)
class FirstBest:
    tau_P: float
    tau_A: float
    value_P: float
    value_A: float


def first_best_duration(player, params, news, horizon=None, check=True):
    """Root of ``H_R(tau) = phi_i`` on a bracket grown geometrically from 0."""
    if check:
        require_valid(params, news, horizon)
    target = phi(player, params)
    if horizon is None:
        horizon = default_horizon(params)
    f = lambda t: float(news.hazard(t)) - target
    if f(0.0) <= 0.0:
        raise RegimeError(f"H_R(0) <= phi_{_player(player)}: first-best duration is 0")
    lo, hi = _numerics.bracket_root(f, min(1.0 / target, horizon) * 1e-3, horizon)
    return _numerics.root(f, lo, hi)


def first_best_payoff(player, t, params, news):
    """Expected payoff of searching for real news until ``t`` with full authority."""
    if t < 0:
        raise ValueError("t must be non-negative")
    d, s = default_and_safe(player, params)
    if t == 0:
        return d
    rho, mu = params.rho, params.mu
    if math.isinf(t):
        # e^{-rho t} kills the terminal term; integrate to infinity
        integral = _numerics.quad(lambda x: math.exp(-rho * x) * news.density(x), 0.0, math.inf)
        return float((mu + (1.0 - mu) * s) * integral)
    integral = _numerics.quad(lambda x: math.exp(-rho * x) * news.density(x), 0.0, t)
    return float((mu + (1.0 - mu) * s) * integral + math.exp(-rho * t) * news.survival(t) * d)


def first_best_slope(player, t, params, news):
    """Analytic derivative ``d u_i / dt``; positive before ``tau_i`` and negative after."""
    d, s = default_and_safe(player, params)
    gain = params.mu + (1.0 - params.mu) * s - d
    return float(math.exp(-params.rho * t) * news.survival(t) * gain
                 * (news.hazard(t) - d * params.rho / gain))


def solve_first_best(params, news, horizon=None):
    require_valid(params, news, horizon)
    tau_P = first_best_duration(PRINCIPAL, params, news, horizon, check=False)
    tau_A = first_best_duration(AGENT, params, news, horizon, check=False)
    return FirstBest(tau_P, tau_A,
                     first_best_payoff(PRINCIPAL, tau_P, params, news),
                     first_best_payoff(AGENT, tau_A, params, news))
