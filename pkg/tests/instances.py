"""Random parameter/strategy instances for the property suites."""
import numpy as np

from fakesearch.model import HyperbolicHazard, ModelParams
from fakesearch.strategy import MixedStrategy


def random_params(rng):
    mu = rng.uniform(0.2, 0.8)
    theta = rng.uniform(mu + 0.05, 0.97)
    beta = rng.uniform(0.05, mu - 0.02)
    return ModelParams(mu, theta, beta, rng.uniform(0.02, 0.3), rng.uniform(0.05, 0.9))


def random_news(rng):
    return HyperbolicHazard(rng.uniform(0.5, 2.0), rng.uniform(0.3, 2.0))


def random_strategy(rng, t_max=4.0, gap=None):
    """Piecewise-uniform density, up to two atoms and a never-mass.

    With ``gap=(lo, hi)`` no mass is placed inside ``(lo, hi]``.
    """
    k = rng.integers(1, 4)
    edges = np.sort(rng.uniform(0.0, t_max, k + 1))
    n_atoms = rng.integers(0, 3)
    atom_t = rng.uniform(0.0, t_max, n_atoms)
    if gap is not None:
        lo, hi = gap
        edges = np.where((edges > lo) & (edges <= hi), lo, edges)
        edges = np.unique(edges)
        if len(edges) < 2 or np.any((edges[:-1] < hi) & (edges[1:] > lo)):
            edges = np.array([max(0.0, lo - 1.0), lo]) if lo > 0 else np.array([hi + 0.1, hi + 1.0])
        atom_t = np.where((atom_t > lo) & (atom_t <= hi), hi + 0.5, atom_t)
    w = rng.dirichlet(np.ones(len(edges) - 1 + n_atoms + 1))
    masses, atoms, never = w[:len(edges) - 1], w[len(edges) - 1:-1], w[-1]
    return MixedStrategy.piecewise_uniform(edges, masses, atoms=tuple(zip(atom_t, atoms)), never_mass=never)
