"""Parameter containers and random-stream construction.

The chain has 2L+1 sites with logical indices -L..L. Each of the 2L bonds
(x, x+1) carries an exponential clock of rate 1; the boundary clocks run at
A*L^-a (left, refresh from Exponential(1/beta_minus)) and B*L^-b (right,
refresh from Exponential(1/beta_plus)). Temperatures are T = 1/(k_B*beta).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Independent reproducible stream for (seed, replica index).

    Philox is counter-based, so streams derived from distinct (seed, index)
    pairs are statistically independent and cheap to construct.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(index)])))


@dataclass(frozen=True)
class ModelParams:
    L: int
    A: float = 1.0
    B: float = 1.0
    a: float = 0.0
    b: float = 0.0
    beta_minus: float = 1.0
    beta_plus: float = 1.0
    k_B: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if not (self.A > 0 and self.B > 0):
            raise ValueError("boundary amplitudes A, B must be positive")
        if not (self.beta_minus > 0 and self.beta_plus > 0):
            raise ValueError("inverse temperatures must be positive")
        if not self.k_B > 0:
            raise ValueError("k_B must be positive")

    # -- derived quantities ------------------------------------------------

    @property
    def n_sites(self) -> int:
        return 2 * self.L + 1

    @property
    def n_bonds(self) -> int:
        return 2 * self.L

    @property
    def left_rate(self) -> float:
        return self.A * float(self.L) ** (-self.a)

    @property
    def right_rate(self) -> float:
        return self.B * float(self.L) ** (-self.b)

    @property
    def total_rate(self) -> float:
        return self.n_bonds + self.left_rate + self.right_rate

    @property
    def T_minus(self) -> float:
        return 1.0 / (self.k_B * self.beta_minus)

    @property
    def T_plus(self) -> float:
        return 1.0 / (self.k_B * self.beta_plus)

    # -- index helpers -----------------------------------------------------

    def site_index(self, x: int) -> int:
        """Array index of logical site x in a length-(2L+1) energy array."""
        if not -self.L <= x <= self.L:
            raise ValueError(f"site {x} outside [-{self.L}, {self.L}]")
        return x + self.L

    def sites(self) -> np.ndarray:
        """Logical site indices -L..L in array order."""
        return np.arange(-self.L, self.L + 1)

    def rng(self, index: int = 0) -> np.random.Generator:
        return stream(self.seed, index)


@dataclass(frozen=True)
class EventSchedule:
    """Clock bookkeeping for one chain: 2L bond clocks at rate 1 plus the
    two boundary clocks."""
    n_bonds: int
    left_rate: float
    right_rate: float
    bond_rate: float = 1.0

    @property
    def total_rate(self) -> float:
        return self.n_bonds * self.bond_rate + self.left_rate + self.right_rate


def schedule(params: ModelParams) -> EventSchedule:
    return EventSchedule(
        n_bonds=params.n_bonds,
        left_rate=params.left_rate,
        right_rate=params.right_rate,
    )
