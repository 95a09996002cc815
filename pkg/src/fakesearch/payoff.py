"""Payoff functionals of the game for arbitrary strategy pairs.

``principal_payoff(t, ...)`` is the principal's expected payoff of stopping at
``t`` (safe action) unless news arrives first; ``agent_payoff(t, ...)`` is the
faker agent's payoff of faking at ``t`` unless the game has ended. Integrals
are split at strategy-support endpoints and atoms and evaluated piecewise by
adaptive quadrature. Products such as ``w1 * mu1`` are computed in unreduced
form so that zero faking density never produces 0/0.

Ties follow the game's rule that a stop at ``t`` beats news at ``t``: a fake
scheduled exactly at the principal's stopping time is not seen, and a stop
scheduled exactly at the agent's faking time pre-empts the fake.
"""
from __future__ import annotations

import math

import numpy as np

from . import _numerics


def constant_action(value=1.0):
    """Response profile that follows type-1 news with fixed probability ``value``."""
    value = float(value)

    def a(t):
        return value if np.ndim(t) == 0 else np.full(np.shape(t), value)

    a.constant = value
    return a


def best_response_action(belief, theta, tie_value=1.0):
    """Act on type-1 news iff the posterior beats the safe payoff; ``tie_value`` when equal."""
    if not 0.0 <= tie_value <= 1.0:
        raise ValueError("tie_value must lie in [0, 1]")

    def a(t):
        b = np.asarray(belief(t), dtype=float)
        out = np.where(b > theta, 1.0, np.where(b < theta, 0.0, tie_value))
        return float(out) if np.ndim(t) == 0 else out

    return a


def belief_from_faking(faking, params, news):
    """Posterior ``Pr(omega = 1 | type-1 news at t)`` for an arbitrary faking strategy.

    At an atom of the faking strategy a type-1 arrival is almost surely fake and
    the belief falls back to the prior ``mu``.
    """
    mu, sigma = params.mu, params.sigma
    atoms = {t for t, m in faking.atoms if m > 0} if sigma > 0 else set()

    def mu1(t):
        if np.ndim(t) == 0 and float(t) in atoms:
            return mu
        g, surv = news.density(t), news.survival(t)
        real = g * (1.0 - sigma * faking.cdf_left(t))
        fake = sigma * faking.pdf(t) * surv
        out = mu * (real + fake) / (mu * real + fake)
        if np.ndim(t) > 0 and atoms:
            out = np.where(np.isin(np.asarray(t), list(atoms)), mu, out)
        return out

    return mu1


class ArrivalKernel:
    """Arrival densities and no-event probabilities seen by each player.

    Principal view (agent fakes with ``faking``): ``w0_P``, ``w1_P`` and
    ``Wphi_P``. Agent view (principal stops with ``stopping``): ``w0_A``,
    ``w1_A``, ``wS_A`` and ``Wphi_A``. Densities cover the absolutely
    continuous parts; atoms are reported by ``*_atom_mass``.
    """

    def __init__(self, params, news, faking=None, stopping=None):
        self.params, self.news = params, news
        self.faking, self.stopping = faking, stopping

    def w0_P(self, s):
        return (1.0 - self.params.mu) * self.news.density(s) * (1.0 - self.params.sigma * self.faking.cdf(s))

    def w1_P(self, s):
        p = self.params
        return (p.mu * self.news.density(s) * (1.0 - p.sigma * self.faking.cdf(s))
                + p.sigma * self.faking.pdf(s) * self.news.survival(s))

    def w1mu_P(self, s):
        """``w1_P * mu1`` in unreduced form."""
        p = self.params
        return p.mu * (self.news.density(s) * (1.0 - p.sigma * self.faking.cdf(s))
                       + p.sigma * self.faking.pdf(s) * self.news.survival(s))

    def Wphi_P(self, t):
        return self.news.survival(t) * (1.0 - self.params.sigma * self.faking.cdf(t))

    def principal_atom_mass(self, t1, t2):
        """Probability of a fake arriving at an atom in ``(t1, t2]`` before real news."""
        return sum(self.params.sigma * m * self.news.survival(ta)
                   for ta, m in self.faking.atoms if t1 < ta <= t2)

    def w0_A(self, s):
        return (1.0 - self.params.mu) * self.news.density(s) * (1.0 - self.stopping.cdf(s))

    def w1_A(self, s):
        return self.params.mu * self.news.density(s) * (1.0 - self.stopping.cdf(s))

    def wS_A(self, s):
        return self.stopping.pdf(s) * self.news.survival(s)

    def Wphi_A(self, t):
        return self.news.survival(t) * (1.0 - self.stopping.cdf(t))

    def agent_atom_mass(self, t1, t2):
        return sum(m * self.news.survival(ta) for ta, m in self.stopping.atoms if t1 < ta <= t2)

    def principal_flow(self, t1, t2):
        """``int_{t1}^{t2} (w0_P + w1_P) ds`` plus atom arrivals in ``(t1, t2]``."""
        f = lambda s: self.w0_P(s) + self.w1_P(s)
        return _piecewise_integral(f, t1, t2, self.faking.breakpoints) + self.principal_atom_mass(t1, t2)

    def agent_flow(self, t1, t2):
        f = lambda s: self.w0_A(s) + self.w1_A(s) + self.wS_A(s)
        return _piecewise_integral(f, t1, t2, self.stopping.breakpoints) + self.agent_atom_mass(t1, t2)


def _piecewise_integral(f, a, b, breakpoints):
    if b <= a:
        return 0.0
    nodes = [a] + [p for p in breakpoints if a < p < b] + [b]
    return sum(_numerics.quad(f, lo, hi) for lo, hi in zip(nodes[:-1], nodes[1:]))


def _cumulative_integral(f, ts, breakpoints):
    """``int_0^t f`` for every ``t`` in ``ts`` (any order; ``inf`` allowed)."""
    ts = np.asarray(ts, dtype=float)
    finite = np.unique(ts[np.isfinite(ts)])
    nodes = np.unique(np.concatenate([[0.0], finite, [p for p in breakpoints if p > 0]]))
    if np.isinf(ts).any():
        nodes = np.append(nodes, np.inf)
    pieces = [_numerics.quad(f, lo, hi) for lo, hi in zip(nodes[:-1], nodes[1:])]
    cum = np.concatenate([[0.0], np.cumsum(pieces)])
    return cum[np.searchsorted(nodes, ts)]


def _action_fn(action):
    if action is None:
        return constant_action(1.0)
    if isinstance(action, (int, float)):
        return constant_action(action)
    return action


def principal_payoff_path(ts, faking, action, params, news):
    """Vector of principal payoffs ``u_P(t)`` for stopping times ``ts`` (``inf`` = never stop)."""
    a = _action_fn(action)
    theta, mu, sigma, rho = params.theta, params.mu, params.sigma, params.rho

    def flow(s):
        g, surv = news.density(s), news.survival(s)
        keep = 1.0 - sigma * faking.cdf(s)
        fake = sigma * faking.pdf(s) * surv
        act = a(s)
        w0 = (1.0 - mu) * g * keep
        w1 = mu * g * keep + fake
        w1mu = mu * (g * keep + fake)
        return math.exp(-rho * s) * (w0 * theta + (1.0 - act) * w1 * theta + act * w1mu)

    ts = np.asarray(ts, dtype=float)
    out = _cumulative_integral(flow, ts, faking.breakpoints)
    for tm, m in faking.atoms:
        if m == 0.0:
            continue
        act = a(tm)
        bump = math.exp(-rho * tm) * sigma * m * news.survival(tm) * ((1.0 - act) * theta + act * mu)
        out = out + bump * (ts > tm)
    finite = np.isfinite(ts)
    tf = np.where(finite, ts, 0.0)
    terminal = np.exp(-rho * tf) * news.survival(tf) * (1.0 - sigma * faking.cdf_left(tf)) * theta
    return out + np.where(finite, terminal, 0.0)


def principal_payoff(t, faking, action, params, news):
    """Principal's payoff of stopping at ``t`` given the faking strategy and response profile."""
    if t == 0:
        return params.theta
    return float(principal_payoff_path(np.array([t]), faking, action, params, news)[0])


def agent_payoff_path(ts, stopping, action, params, news):
    """Vector of faker-agent payoffs ``u_A(t)`` for faking times ``ts`` (``inf`` = never fake)."""
    a = _action_fn(action)
    mu, beta, rho = params.mu, params.beta, params.rho

    def flow(s):
        g, surv = news.density(s), news.survival(s)
        alive = 1.0 - stopping.cdf(s)
        act = a(s)
        w0 = (1.0 - mu) * g * alive
        w1 = mu * g * alive
        ws = stopping.pdf(s) * surv
        return math.exp(-rho * s) * ((w0 + ws) * beta + w1 * ((1.0 - act) * beta + act))

    ts = np.asarray(ts, dtype=float)
    out = _cumulative_integral(flow, ts, stopping.breakpoints)
    for tm, m in stopping.atoms:
        if m == 0.0:
            continue
        out = out + math.exp(-rho * tm) * m * news.survival(tm) * beta * (ts >= tm)
    finite = np.isfinite(ts)
    tf = np.where(finite, ts, 0.0)
    act = np.asarray(a(tf), dtype=float)
    terminal = (np.exp(-rho * tf) * news.survival(tf) * (1.0 - stopping.cdf(tf))
                * ((1.0 - act) * beta + mu * act))
    return out + np.where(finite, terminal, 0.0)


def agent_payoff(t, stopping, action, params, news):
    """Faker's payoff of faking at ``t`` (``NEVER`` to wait passively) given the principal's play."""
    return float(agent_payoff_path(np.array([t]), stopping, action, params, news)[0])
