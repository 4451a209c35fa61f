"""Configured bounds and defaults.

Every operation takes explicit keyword overrides; ``SETTINGS`` supplies the
defaults and the command line builds its own copy with
``dataclasses.replace``.
"""
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class Settings:
    # graph-core
    exact_pair_capacity: int = 28
    exact_density_capacity: int = 20
    density_samples: int = 10_000
    # subdivision search
    containment_budget: int = 2_000_000
    # simplex
    phi_capacity: int = 12
    oracle_restarts: int = 1_000
    oracle_iterations: int = 400
    grid_step: int = 200
    grid_budget: int = 250_000
    oracle_tolerance: float = 1e-9
    # embedding
    epsilon: Fraction = Fraction(1, 5)
    regularity: Fraction = Fraction(1, 20)
    beta: Fraction = Fraction(1, 5)
    delta: Fraction = Fraction(1, 100)
    intra_density: Fraction = Fraction(1, 4)
    # geometry
    perturbation_retries: int = 50
    fundamental_cycles: int = 64
    # extremal
    resample_limit: int = 1_000
    # orchestration
    workers: int = 1


SETTINGS = Settings()
