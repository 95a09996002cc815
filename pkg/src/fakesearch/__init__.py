"""Delegated search with fabricated news: equilibrium solver, verifier and remedies."""
from .errors import (ConfigError, DomainError, FakeSearchError, InconsistencyError, RegimeError,
                     ToleranceError, VerificationError)
from .model import (NEVER, ExponentialBandit, HyperbolicHazard, ModelParams, NewsProcess,
                    TabulatedHazard, beta_lower_bound, news_from_dict, phi_thresholds, validate)
from .first_best import first_best_duration, first_best_payoff, solve_first_best
from .strategy import MixedStrategy
from .payoff import agent_payoff, principal_payoff
from .equilibrium import Equilibrium, Regime, build_equilibrium, sigma_bar, solve_tau_M

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DomainError", "FakeSearchError", "InconsistencyError", "RegimeError",
    "ToleranceError", "VerificationError",
    "NEVER", "ExponentialBandit", "HyperbolicHazard", "ModelParams", "NewsProcess", "TabulatedHazard",
    "beta_lower_bound", "news_from_dict", "phi_thresholds", "validate",
    "first_best_duration", "first_best_payoff", "solve_first_best",
    "MixedStrategy", "agent_payoff", "principal_payoff",
    "Equilibrium", "Regime", "build_equilibrium", "sigma_bar", "solve_tau_M",
]
