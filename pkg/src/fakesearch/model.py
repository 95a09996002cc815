"""Model primitives: preference parameters, the real-news arrival process and regime checks.

A news process is described by its hazard rate ``H_R``. Everything else
(survival, CDF ``G``, density ``g``, inverse-CDF sampling) is derived from the
hazard and its cumulative integral. Distributions may be defective: when the
cumulative hazard stays bounded, news never arrives with positive probability.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ._numerics import is_finite
from .errors import ConfigError, DomainError, RegimeError

NEVER = math.inf
"""Time value for an event that never happens (no arrival, no fake, no stop)."""


def is_never(t):
    return t == NEVER


@dataclass(frozen=True)
class ModelParams:
    """The five primitives of the game.

    mu: prior probability that the risky payoff is 1.
    theta: principal's safe payoff.
    beta: agent's safe payoff.
    rho: common discount rate.
    sigma: prior probability that the agent can fake news.

    Construction rejects non-finite or non-positive inputs; the economic
    ordering ``beta < mu < theta`` is checked by :func:`validate` so that
    violating configurations can still be reported on.
    """

    mu: float
    theta: float
    beta: float
    rho: float
    sigma: float

    def __post_init__(self):
        for name in ("mu", "theta", "beta", "rho", "sigma"):
            value = getattr(self, name)
            if not is_finite(value):
                raise ConfigError(name, f"must be a finite number, got {value!r}")
            object.__setattr__(self, name, float(value))
        for name in ("mu", "theta", "beta"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ConfigError(name, "must lie in (0, 1)")
        if self.rho <= 0.0:
            raise ConfigError("rho", "must be positive")
        # sigma = 0 is the no-faker limit, used for first-best consistency checks
        if not 0.0 <= self.sigma < 1.0:
            raise ConfigError("sigma", "must lie in [0, 1)")

    @property
    def phi_P(self):
        return self.rho * self.theta / (self.mu * (1.0 - self.theta))

    @property
    def phi_A(self):
        return self.rho * self.mu / (self.beta * (1.0 - self.mu))

    def with_(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class PhiThresholds:
    phi_P: float
    phi_A: float
    beta_lower: float


def beta_lower_bound(mu, theta):
    """Smallest agent safe payoff for which the principal's first-best search is shorter."""
    if not is_finite(mu, theta):
        raise ConfigError("mu/theta", "must be finite")
    if not 0.0 < mu < theta < 1.0:
        raise ConfigError("mu/theta", "require 0 < mu < theta < 1")
    return mu * (mu / theta) * ((1.0 - theta) / (1.0 - mu))


def phi_thresholds(params):
    return PhiThresholds(params.phi_P, params.phi_A, beta_lower_bound(params.mu, params.theta))


def _as_time(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0) or np.any(np.isnan(arr)):
        raise DomainError(f"time must be non-negative, got {t!r}")
    return arr


def _ret(x, like):
    return float(x) if np.ndim(like) == 0 else x


class NewsProcess:
    """Arrival-time distribution of real news, defined through a decreasing hazard.

    Subclasses implement ``hazard``, ``cumulative_hazard``, ``hazard_derivative``
    and ``inverse_cumulative_hazard``; the survival-analysis identities live here.
    All methods accept scalars or numpy arrays.
    """

    family = "abstract"

    def hazard(self, t):
        raise NotImplementedError

    def cumulative_hazard(self, t):
        raise NotImplementedError

    def hazard_derivative(self, t):
        raise NotImplementedError

    def inverse_cumulative_hazard(self, level):
        """Smallest ``t`` with ``cumulative_hazard(t) == level``; ``inf`` if never reached."""
        raise NotImplementedError

    @property
    def cumulative_hazard_at_infinity(self):
        return math.inf

    def survival(self, t):
        return np.exp(-self.cumulative_hazard(t))

    def cdf(self, t):
        return -np.expm1(-self.cumulative_hazard(t))

    def density(self, t):
        return self.hazard(t) * self.survival(t)

    @property
    def survival_at_infinity(self):
        return math.exp(-self.cumulative_hazard_at_infinity)

    def inverse_survival(self, u):
        """Arrival time at which survival equals ``u``; ``inf`` (never) below the survival floor."""
        u = np.asarray(u, dtype=float)
        level = -np.log(u)
        return _ret(self.inverse_cumulative_hazard(level), u)

    def sample_arrival(self, rng):
        """One real-news arrival time drawn by inverting the survival function; NEVER if none."""
        t = self.inverse_survival(rng.random())
        return NEVER if math.isinf(t) else t

    def sample_arrivals(self, rng, n):
        """Vectorised draws; ``inf`` marks runs in which real news never arrives."""
        return self.inverse_survival(rng.random(n))

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class HyperbolicHazard(NewsProcess):
    """``H_R(t) = a / (1 + b t)``; survival ``(1 + b t) ** (-a / b)``."""

    a: float = 1.0
    b: float = 1.0
    family = "hyperbolic"

    def __post_init__(self):
        for name in ("a", "b"):
            v = getattr(self, name)
            if not is_finite(v) or v <= 0:
                raise ConfigError(f"hazard.{name}", "must be a positive finite number")

    def hazard(self, t):
        t = _as_time(t)
        return _ret(self.a / (1.0 + self.b * t), t)

    def cumulative_hazard(self, t):
        t = _as_time(t)
        return _ret(self.a / self.b * np.log1p(self.b * t), t)

    def hazard_derivative(self, t):
        t = _as_time(t)
        return _ret(-self.a * self.b / (1.0 + self.b * t) ** 2, t)

    def inverse_cumulative_hazard(self, level):
        level = np.asarray(level, dtype=float)
        return _ret(np.expm1(level * self.b / self.a) / self.b, level)

    def to_dict(self):
        return {"family": self.family, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class ExponentialBandit(NewsProcess):
    """News exists with probability ``p`` and then arrives at exponential rate ``lam``.

    Survival ``1 - p + p exp(-lam t)`` is defective (news never arrives with
    probability ``1 - p``), and the hazard decreases from ``p lam`` to 0.
    """

    p: float = 0.8
    lam: float = 1.0
    family = "exponential_bandit"

    def __post_init__(self):
        if not is_finite(self.p) or not 0.0 < self.p < 1.0:
            raise ConfigError("hazard.p", "must lie in (0, 1) for a strictly decreasing hazard")
        if not is_finite(self.lam) or self.lam <= 0:
            raise ConfigError("hazard.lam", "must be a positive finite number")

    def survival(self, t):
        t = _as_time(t)
        return _ret(1.0 - self.p + self.p * np.exp(-self.lam * t), t)

    def hazard(self, t):
        t = _as_time(t)
        e = self.p * np.exp(-self.lam * t)
        return _ret(self.lam * e / (1.0 - self.p + e), t)

    def cumulative_hazard(self, t):
        return -np.log(self.survival(t))

    def hazard_derivative(self, t):
        h = self.hazard(t)
        return h * (h - self.lam)

    @property
    def cumulative_hazard_at_infinity(self):
        return -math.log(1.0 - self.p)

    def inverse_cumulative_hazard(self, level):
        level = np.asarray(level, dtype=float)
        s = np.exp(-level)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = -np.log((s - (1.0 - self.p)) / self.p) / self.lam
        t = np.where(s > 1.0 - self.p, t, np.inf)
        return _ret(np.maximum(t, 0.0), level)

    def to_dict(self):
        return {"family": self.family, "p": self.p, "lam": self.lam}


@dataclass(frozen=True)
class TabulatedHazard(NewsProcess):
    """User-supplied hazard values on knots, interpolated log-linearly.

    The first knot must be 0 and values must be strictly decreasing and
    positive. Past the last knot the last segment's exponential decay is
    continued, so the cumulative hazard converges and the arrival-time
    distribution is defective. Segment integrals of the log-linear
    interpolant are exact.
    """

    knots: tuple
    values: tuple
    family = "tabulated"
    _cum: np.ndarray = field(init=False, repr=False, compare=False)
    _slopes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if knots.ndim != 1 or knots.shape != values.shape or knots.size < 2:
            raise ConfigError("hazard.knots", "need at least two knots with matching values")
        if not (np.all(np.isfinite(knots)) and np.all(np.isfinite(values))):
            raise ConfigError("hazard.values", "knots and values must be finite")
        if knots[0] != 0.0 or np.any(np.diff(knots) <= 0):
            raise ConfigError("hazard.knots", "must start at 0 and be strictly increasing")
        if np.any(values <= 0) or np.any(np.diff(values) >= 0):
            raise ConfigError("hazard.values", "must be positive and strictly decreasing")
        object.__setattr__(self, "knots", tuple(knots.tolist()))
        object.__setattr__(self, "values", tuple(values.tolist()))
        slopes = np.diff(np.log(values)) / np.diff(knots)
        seg = values[:-1] * np.expm1(slopes * np.diff(knots)) / slopes
        object.__setattr__(self, "_slopes", np.append(slopes, slopes[-1]))
        object.__setattr__(self, "_cum", np.concatenate([[0.0], np.cumsum(seg)]))

    def _locate(self, t):
        k = np.asarray(self.knots)
        i = np.clip(np.searchsorted(k, t, side="right") - 1, 0, k.size - 1)
        return i, t - k[i]

    def hazard(self, t):
        t = _as_time(t)
        i, x = self._locate(t)
        return _ret(np.asarray(self.values)[i] * np.exp(self._slopes[i] * x), t)

    def cumulative_hazard(self, t):
        t = _as_time(t)
        i, x = self._locate(t)
        k = self._slopes[i]
        return _ret(self._cum[i] + np.asarray(self.values)[i] * np.expm1(k * x) / k, t)

    def hazard_derivative(self, t, rel_step=1e-6):
        # centred difference of the interpolant (one-sided at 0)
        t = _as_time(t)
        h = rel_step * np.maximum(1.0, t)
        lo = np.maximum(t - h, 0.0)
        return _ret((self.hazard(t + h) - self.hazard(lo)) / (t + h - lo), t)

    @property
    def cumulative_hazard_at_infinity(self):
        return float(self._cum[-1] + self.values[-1] / -self._slopes[-1])

    def inverse_cumulative_hazard(self, level):
        level = np.asarray(level, dtype=float)
        i = np.clip(np.searchsorted(self._cum, level, side="right") - 1, 0, len(self.knots) - 1)
        k = self._slopes[i]
        arg = 1.0 + (level - self._cum[i]) * k / np.asarray(self.values)[i]
        with np.errstate(divide="ignore", invalid="ignore"):
            x = np.log(arg) / k
        t = np.where(arg > 0.0, np.asarray(self.knots)[i] + x, np.inf)
        return _ret(t, level)

    def to_dict(self):
        return {"family": self.family, "knots": list(self.knots), "values": list(self.values)}


NEWS_FAMILIES = {
    "hyperbolic": HyperbolicHazard,
    "exponential_bandit": ExponentialBandit,
    "tabulated": TabulatedHazard,
}


def news_from_dict(spec):
    """Build a news process from ``{"family": name, **parameters}``."""
    spec = dict(spec)
    family = spec.pop("family", "hyperbolic")
    try:
        cls = NEWS_FAMILIES[family]
    except KeyError:
        raise ConfigError("hazard.family", f"unknown family {family!r}; "
                          f"choose from {sorted(NEWS_FAMILIES)}") from None
    if cls is TabulatedHazard:
        return cls(tuple(spec["knots"]), tuple(spec["values"]))
    try:
        return cls(**{k: float(v) for k, v in spec.items()})
    except TypeError as exc:
        raise ConfigError("hazard", str(exc)) from None


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple
    thresholds: PhiThresholds | None
    hazard_at_0: float
    hazard_at_horizon: float
    horizon: float

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    def reason(self):
        return "; ".join(c.detail for c in self.failures)

    def to_dict(self):
        return {
            "ok": self.ok,
            "checks": [asdict(c) for c in self.checks],
            "thresholds": None if self.thresholds is None else asdict(self.thresholds),
            "hazard_at_0": self.hazard_at_0,
            "hazard_at_horizon": self.hazard_at_horizon,
            "horizon": self.horizon,
        }


def default_horizon(params, scale=100.0):
    """Working horizon standing in for t = infinity: ``scale`` first-best duration scales 1/phi_P."""
    return scale / params.phi_P


def validate(params, news, horizon=None, n_grid=400):
    """Check the parameter regime the equilibrium analysis relies on.

    Reports the ordering ``0 < beta < mu < theta < 1``, A1
    (``H_R(0) > phi_P > H_R(horizon)``), A2 (``phi_P > phi_A``) and strict
    hazard monotonicity on a geometric grid over ``[0, horizon]``.
    """
    if horizon is None:
        horizon = default_horizon(params)
    checks = []
    ordered = 0.0 < params.beta < params.mu < params.theta < 1.0
    checks.append(Check("ordering", ordered,
                        "ordering ok" if ordered else "ordering 0 < beta < mu < theta < 1 violated"))
    phi_P, phi_A = params.phi_P, params.phi_A
    h0 = float(news.hazard(0.0))
    hinf = float(news.hazard(horizon))
    a1 = h0 > phi_P > hinf
    checks.append(Check("A1", a1, "H_R(0) > phi_P > H_R(inf)" if a1 else
                        f"A1 violated: need H_R(0)={h0:.6g} > phi_P={phi_P:.6g} > H_R(T_max)={hinf:.6g}"))
    a2 = phi_P > phi_A
    checks.append(Check("A2", a2, "phi_P > phi_A" if a2 else "phi_A >= phi_P"))
    grid = np.concatenate([[0.0], np.geomspace(horizon * 1e-6, horizon, n_grid)])
    h = np.asarray(news.hazard(grid))
    mono = bool(np.all(np.diff(h) < 0) and np.all(h > 0))
    checks.append(Check("hazard_decreasing", mono,
                        "hazard strictly decreasing" if mono else "hazard not strictly decreasing"))
    thresholds = phi_thresholds(params) if 0 < params.mu < params.theta < 1 else None
    return ValidationReport(tuple(checks), thresholds, h0, hinf, horizon)


def require_valid(params, news, horizon=None):
    report = validate(params, news, horizon)
    if not report.ok:
        raise RegimeError(report.reason())
    return report
