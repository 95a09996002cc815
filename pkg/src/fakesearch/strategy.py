"""Mixed strategies over times in [0, inf]: a density part, atoms, and mass at 'never'."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InconsistencyError

MASS_TOL = 1e-9


def _zero(t):
    return np.zeros_like(np.asarray(t, dtype=float)) + 0.0


@dataclass(frozen=True)
class MixedStrategy:
    """CDF on ``[0, inf]`` split into an absolutely continuous part, atoms and a never-mass.

    ``continuous_cdf(t)`` is the mass of the density part on ``[0, t]`` and must
    be vectorised; ``density`` is its derivative. The density part lives on
    ``support = (lo, hi)``; ``kinks`` lists interior points where the density
    jumps. ``cdf`` is right-continuous: an atom at ``t`` is
    included in ``cdf(t)``.
    """

    continuous_cdf: Callable = field(default=_zero, repr=False)
    density: Callable = field(default=_zero, repr=False)
    support: tuple = (0.0, 0.0)
    atoms: tuple = ()
    never_mass: float = 0.0
    kinks: tuple = ()

    def __post_init__(self):
        atoms = tuple(sorted((float(t), float(m)) for t, m in self.atoms))
        object.__setattr__(self, "atoms", atoms)
        if any(m < 0 or t < 0 or not math.isfinite(t) for t, m in atoms) or self.never_mass < -MASS_TOL:
            raise InconsistencyError("atom masses and never-mass must be non-negative at finite times")
        total = self.continuous_mass + sum(m for _, m in atoms) + self.never_mass
        if abs(total - 1.0) > MASS_TOL:
            raise InconsistencyError(f"strategy masses sum to {total!r}, not 1")

    @property
    def continuous_mass(self):
        lo, hi = self.support
        return float(self.continuous_cdf(hi)) if hi > lo else 0.0

    @property
    def atom_times(self):
        return tuple(t for t, _ in self.atoms)

    @property
    def breakpoints(self):
        """Times at which payoff integrands may be non-smooth."""
        pts = set(self.atom_times)
        if self.support[1] > self.support[0]:
            pts.update(self.support)
            pts.update(float(k) for k in self.kinks)
        return tuple(sorted(pts))

    def _atoms_upto(self, t, inclusive):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for ta, m in self.atoms:
            out = out + m * ((t >= ta) if inclusive else (t > ta))
        return out

    def _cont(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.support
        if hi <= lo:
            return np.zeros_like(t)
        return np.asarray(self.continuous_cdf(np.clip(t, lo, hi)), dtype=float) * (t >= lo)

    def cdf(self, t):
        """``Pr(T <= t)``, atoms at ``t`` included."""
        out = self._cont(t) + self._atoms_upto(t, True)
        return float(out) if np.ndim(t) == 0 else out

    def cdf_left(self, t):
        """``Pr(T < t)``."""
        out = self._cont(t) + self._atoms_upto(t, False)
        return float(out) if np.ndim(t) == 0 else out

    def pdf(self, t):
        """Density of the absolutely continuous part (0 off its support)."""
        t_arr = np.asarray(t, dtype=float)
        lo, hi = self.support
        inside = (t_arr >= lo) & (t_arr <= hi) & (hi > lo)
        out = np.where(inside, self.density(np.clip(t_arr, lo, max(hi, lo))), 0.0)
        return float(out) if np.ndim(t) == 0 else out

    def atom_mass(self, t):
        return sum(m for ta, m in self.atoms if ta == t)

    def sample(self, rng, n, iterations=64):
        """Inverse-CDF draws; ``inf`` marks 'never'.

        A uniform ``u`` maps to the smallest ``t`` with ``cdf(t) >= u``
        (bisection over the support, snapped onto atoms).
        """
        u = rng.random(n)
        return self.invert(u, iterations)

    def invert(self, u, iterations=64):
        u = np.asarray(u, dtype=float)
        finite_mass = 1.0 - self.never_mass
        pts = list(self.atom_times)
        if self.support[1] > self.support[0]:
            pts.extend(self.support)
        if not pts:
            return np.full_like(u, np.inf)
        lo = np.full_like(u, min(pts))
        hi = np.full_like(u, max(pts))
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            ok = self.cdf(mid) >= u
            hi = np.where(ok, mid, hi)
            lo = np.where(ok, lo, mid)
        for ta, _ in self.atoms:
            hit = (self.cdf_left(ta) < u) & (u <= self.cdf(ta))
            hi = np.where(hit, ta, hi)
        return np.where(u > finite_mass, np.inf, hi)

    @classmethod
    def point_mass(cls, t):
        return cls(atoms=((t, 1.0),))

    @classmethod
    def never(cls):
        return cls(never_mass=1.0)

    @classmethod
    def piecewise_uniform(cls, edges, masses, atoms=(), never_mass=0.0):
        """Density constant on each ``[edges[k], edges[k+1]]`` carrying ``masses[k]``."""
        edges = np.asarray(edges, dtype=float)
        masses = np.asarray(masses, dtype=float)
        cum = np.concatenate([[0.0], np.cumsum(masses)])
        rates = masses / np.diff(edges)

        def cont(t):
            return np.interp(t, edges, cum)

        def dens(t):
            t = np.asarray(t, dtype=float)
            k = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, len(rates) - 1)
            return rates[k]

        return cls(cont, dens, (float(edges[0]), float(edges[-1])), tuple(atoms), never_mass,
                   tuple(float(e) for e in edges[1:-1]))
