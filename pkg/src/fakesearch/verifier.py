"""Certification of a candidate equilibrium.

Analytic part: payoffs along the mixing support must equal the claimed
values, and no off-support time (including 'never') may do strictly better.
Statistical part: a seeded Monte Carlo run of the game itself, compared with
the analytic values, the posterior path and the no-news belief martingale.
"""
from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .equilibrium import Equilibrium, Regime, beneficial_equilibrium
from .payoff import (ArrivalKernel, _piecewise_integral, agent_payoff_path, belief_from_faking,
                     best_response_action, principal_payoff_path)

ANALYTIC_TOL = 1e-5
NON_BENEFICIAL_TOL = 1e-6
SE_BAND = 3.0
CHUNK = 1 << 16


@dataclass
class CheckResult:
    check: str
    residual: float
    tolerance: float
    passed: bool

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclass
class PosteriorBin:
    lo: float
    hi: float
    count: int
    empirical: float
    expected: float
    se: float

    @property
    def z(self):
        return abs(self.empirical - self.expected) / self.se if self.se > 0 else 0.0


@dataclass
class VerificationReport:
    max_indifference_residual_P: float = math.nan
    max_indifference_residual_A: float = math.nan
    max_deviation_gain_P: float = math.nan
    max_deviation_gain_A: float = math.nan
    agent_atom_jump: float = math.nan
    mc_value_P: float = math.nan
    mc_se_P: float = math.nan
    mc_value_A: float = math.nan
    mc_se_A: float = math.nan
    mc_posterior_bins: list = field(default_factory=list)
    mc_martingale: list = field(default_factory=list)
    n_draws: int = 0
    seed: int | None = None
    checks: list = field(default_factory=list)

    @property
    def certified(self):
        return bool(self.checks) and all(c.passed for c in self.checks)

    def merge(self, other):
        """Fill fields left unset here from ``other`` and append its checks."""
        out = dataclasses.replace(self, checks=list(self.checks) + list(other.checks))
        for f in dataclasses.fields(self):
            if f.name == "checks":
                continue
            mine = getattr(self, f.name)
            if mine is None or mine == [] or mine == 0 or (isinstance(mine, float) and math.isnan(mine)):
                setattr(out, f.name, getattr(other, f.name))
        return out

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["certified"] = self.certified
        return d


def _add(checks, name, residual, tol, passed=None):
    residual = float(residual)
    if passed is None:
        passed = residual <= tol
    checks.append(CheckResult(name, residual, tol, bool(passed)))


def _action_for(eq):
    if eq.regime is Regime.BENEFICIAL:
        return eq.action
    return best_response_action(belief_from_faking(eq.faking, eq.params, eq.news), eq.params.theta)


def check_indifference(eq: Equilibrium, n_grid=200, n_off=60, tol=ANALYTIC_TOL, horizon=None,
                       delta_frac=1e-4):
    """Evaluate both players' payoffs on and off the equilibrium support."""
    p, news = eq.params, eq.news
    if horizon is None:
        horizon = 3.0 * eq.tau_P
    action = _action_for(eq)
    checks = []
    rep = VerificationReport(checks=checks)

    if eq.regime is Regime.NON_BENEFICIAL:
        ts = np.linspace(0.0, horizon, n_grid + 1)
        u_P = principal_payoff_path(np.append(ts, np.inf), eq.faking, action, p, news)
        u_P[0] = p.theta
        rep.max_indifference_residual_P = abs(u_P[0] - eq.value_P)
        rep.max_deviation_gain_P = max(0.0, float(np.max(u_P[1:] - eq.value_P)))
        _add(checks, "principal_no_gain_over_theta", rep.max_deviation_gain_P, NON_BENEFICIAL_TOL)
        sup_hi = eq.faking.support[1]
        ts_A = np.append(np.linspace(0.0, sup_hi, n_grid), np.inf) if eq.faking.never_mass > 0 \
            else np.linspace(0.0, sup_hi, n_grid)
        u_A = agent_payoff_path(ts_A, eq.stopping, action, p, news)
        rep.max_indifference_residual_A = float(np.max(np.abs(u_A - eq.value_A)))
        off = np.linspace(sup_hi, horizon, n_off)[1:]
        u_off = agent_payoff_path(off, eq.stopping, action, p, news)
        rep.max_deviation_gain_A = max(0.0, float(np.max(u_off - eq.value_A)))
        _add(checks, "agent_indifference", rep.max_indifference_residual_A, tol)
        _add(checks, "agent_no_deviation_gain", rep.max_deviation_gain_A, tol)
        return rep

    lo, hi = eq.tau_M, eq.tau_P
    ts_P = np.linspace(lo, hi, n_grid)
    u_P = principal_payoff_path(ts_P, eq.faking, action, p, news)
    rep.max_indifference_residual_P = float(np.max(np.abs(u_P - eq.value_P)))

    delta = delta_frac * hi
    ts_A = np.linspace(lo, max(lo, hi - delta), n_grid)
    if eq.faking.never_mass > 1e-9:
        # 'never' carries mass, so it belongs to the support
        ts_A = np.append(ts_A, np.inf)
    u_A = agent_payoff_path(ts_A, eq.stopping, action, p, news)
    rep.max_indifference_residual_A = float(np.max(np.abs(u_A - eq.value_A)))

    before = np.linspace(0.0, lo, n_off, endpoint=False)[1:] if lo > 0 else np.empty(0)
    after = np.linspace(hi, horizon, n_off)[1:]
    off = np.concatenate([before, after, [np.inf]])
    gain_P = principal_payoff_path(off, eq.faking, action, p, news) - eq.value_P
    rep.max_deviation_gain_P = max(0.0, float(np.max(gain_P)))
    off_A = off if eq.faking.never_mass <= 1e-9 else off[:-1]
    gain_A = agent_payoff_path(off_A, eq.stopping, action, p, news) - eq.value_A
    rep.max_deviation_gain_A = max(0.0, float(np.max(gain_A)))

    jump = float(agent_payoff_path(np.array([hi]), eq.stopping, action, p, news)[0]) - eq.value_A
    rep.agent_atom_jump = jump

    _add(checks, "principal_indifference", rep.max_indifference_residual_P, tol)
    _add(checks, "agent_indifference", rep.max_indifference_residual_A, tol)
    _add(checks, "principal_no_deviation_gain", rep.max_deviation_gain_P, tol)
    _add(checks, "agent_no_deviation_gain", rep.max_deviation_gain_A, tol)
    if eq.stopping.atom_mass(hi) > 0:
        _add(checks, "agent_jump_at_atom", jump, 0.0, passed=jump < 0)
    return rep


def perturb_tau_M(eq: Equilibrium, factor=1.05):
    """Negative control: rebuild the strategies from a shifted soft deadline, keep the old values."""
    if eq.regime is not Regime.BENEFICIAL:
        raise ValueError("perturbation applies to beneficial-search equilibria")
    tau = min(eq.tau_M * factor, eq.tau_P)
    bad = beneficial_equilibrium(eq.params, eq.news, tau, eq.tau_P, eq.sigma_bar)
    return dataclasses.replace(bad, value_P=eq.value_P, value_A=eq.value_A)


# -- Monte Carlo -------------------------------------------------------------


@dataclass
class _Moments:
    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def of(cls, x):
        if len(x) == 0:
            return cls()
        m = float(np.mean(x))
        return cls(len(x), m, float(np.sum((x - m) ** 2)))

    def merge(self, o):
        # Chan et al. pairwise update
        if o.n == 0:
            return self
        if self.n == 0:
            return o
        n = self.n + o.n
        d = o.mean - self.mean
        return _Moments(n, self.mean + d * o.n / n, self.m2 + o.m2 + d * d * self.n * o.n / n)

    @property
    def se(self):
        if self.n < 2:
            return math.nan
        return math.sqrt(self.m2 / (self.n - 1) / self.n)


def _simulate_chunk(eq, action, m, seed_seq, edges, mart_times):
    p, news = eq.params, eq.news
    rng = np.random.default_rng(seed_seq)
    omega = rng.random(m) < p.mu
    faker = rng.random(m) < p.sigma
    t_real = news.sample_arrivals(rng, m)
    t_fake = np.where(faker, eq.faking.sample(rng, m), np.inf)
    t_stop = eq.stopping.sample(rng, m)
    u_act = rng.random(m)

    fake_first = t_fake < t_real
    t_news = np.minimum(t_real, t_fake)
    type1 = np.where(fake_first, True, omega)
    stopped = t_stop <= t_news  # a stop beats simultaneous news
    t_event = np.where(stopped, t_stop, t_news)
    finite = np.isfinite(t_event)
    t_safe = np.where(finite, t_event, 0.0)
    a = np.asarray(action(t_safe), dtype=float) if getattr(action, "constant", None) is None \
        else np.full(m, action.constant)
    risky = ~stopped & type1 & (u_act < a)
    disc = np.where(finite, np.exp(-p.rho * t_safe), 0.0)
    w = omega.astype(float)
    pay_P = disc * np.where(risky, w, p.theta)
    pay_A = disc * np.where(risky, w, p.beta)

    seen1 = ~stopped & type1 & np.isfinite(t_news)
    idx = np.searchsorted(edges, t_news[seen1], side="right") - 1
    ok = (idx >= 0) & (idx < len(edges) - 1)
    nb = len(edges) - 1
    counts = np.bincount(idx[ok], minlength=nb)[:nb]
    ones = np.bincount(idx[ok], weights=w[seen1][ok], minlength=nb)[:nb]

    mart = [(int(np.sum(t_event > t)), int(np.sum((t_event > t) & omega))) for t in mart_times]
    return (_Moments.of(pay_P), _Moments.of(pay_A[faker]), counts, ones, mart)


def _expected_bin_posterior(eq, lo, hi):
    k = ArrivalKernel(eq.params, eq.news, eq.faking, eq.stopping)
    alive = lambda s: 1.0 - eq.stopping.cdf_left(s)
    bps = eq.faking.breakpoints
    num = _piecewise_integral(lambda s: k.w1mu_P(s) * alive(s), lo, hi, bps)
    den = _piecewise_integral(lambda s: k.w1_P(s) * alive(s), lo, hi, bps)
    return num / den if den > 0 else math.nan


def simulate(eq: Equilibrium, n=100_000, seed=0, threads=1, n_bins=10, n_mart=5, chunk=CHUNK,
             se_band=SE_BAND):
    """Seeded Monte Carlo run of the game under the equilibrium profile.

    Draws are split into fixed-size chunks with seeds spawned from ``seed``;
    chunk results merge in chunk order, so the report does not depend on
    ``threads``. The agent value is the faker's conditional mean.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    action = _action_for(eq)
    lo, hi = (eq.tau_M, eq.tau_P) if eq.regime is Regime.BENEFICIAL else eq.faking.support
    edges = np.linspace(lo, hi, n_bins + 1) if hi > lo else np.array([lo, lo])
    mart_times = np.linspace(0.0, eq.tau_P, n_mart + 1)[:-1] if eq.tau_P > 0 else np.zeros(1)
    sizes = [chunk] * (n // chunk) + ([n % chunk] if n % chunk else [])
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    job = lambda args: _simulate_chunk(eq, action, args[0], args[1], edges, mart_times)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(job, zip(sizes, seeds)))
    else:
        parts = [job(a) for a in zip(sizes, seeds)]

    mP, mA = _Moments(), _Moments()
    counts = np.zeros(len(edges) - 1, dtype=np.int64)
    ones = np.zeros(len(edges) - 1)
    mart = np.zeros((len(mart_times), 2), dtype=np.int64)
    for P, A, c, o, mt in parts:
        mP, mA = mP.merge(P), mA.merge(A)
        counts += c
        ones += o
        mart += np.array(mt, dtype=np.int64).reshape(-1, 2)

    bins = []
    for k in range(len(edges) - 1):
        if counts[k] == 0 or edges[k + 1] <= edges[k]:
            continue
        exp = _expected_bin_posterior(eq, edges[k], edges[k + 1])
        se = math.sqrt(max(exp * (1 - exp), 0.0) / counts[k])
        bins.append(PosteriorBin(float(edges[k]), float(edges[k + 1]), int(counts[k]),
                                 float(ones[k] / counts[k]), exp, se))
    mu = eq.params.mu
    martingale = []
    for t, (nq, n1) in zip(mart_times, mart):
        if nq == 0:
            continue
        se = math.sqrt(mu * (1 - mu) / nq)
        martingale.append({"t": float(t), "count": int(nq), "freq": float(n1 / nq), "se": se})

    checks = []
    rep = VerificationReport(mc_value_P=mP.mean, mc_se_P=mP.se, mc_value_A=mA.mean, mc_se_A=mA.se,
                             mc_posterior_bins=bins, mc_martingale=martingale, n_draws=n,
                             seed=seed, checks=checks)
    _add(checks, "mc_value_P", abs(mP.mean - eq.value_P), se_band * mP.se)
    if mA.n > 1:
        _add(checks, "mc_value_A", abs(mA.mean - eq.value_A), se_band * mA.se)
    if bins:
        worst = max(bins, key=lambda b: b.z)
        _add(checks, "mc_posterior_bins", abs(worst.empirical - worst.expected), se_band * worst.se)
    if martingale:
        worst = max(martingale, key=lambda r: abs(r["freq"] - mu) / r["se"])
        _add(checks, "mc_no_news_martingale", abs(worst["freq"] - mu), se_band * worst["se"])
    return rep


def verify(eq: Equilibrium, n=100_000, seed=0, threads=1, tol=ANALYTIC_TOL):
    """Analytic certification followed by the Monte Carlo oracle."""
    return check_indifference(eq, tol=tol).merge(simulate(eq, n=n, seed=seed, threads=threads))
