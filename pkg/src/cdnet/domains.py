"""Variable domain declarations.

A domain is either a finite strictly increasing list of ordinal levels or a
uniform grid over a real interval used for sampling message functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class DiscreteOrdinal:
    levels: tuple

    def __post_init__(self):
        levels = tuple(float(v) for v in self.levels)
        if len(levels) == 0:
            raise DomainError("ordinal domain needs at least one level")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise DomainError("ordinal levels must be strictly increasing")
        object.__setattr__(self, "levels", levels)

    @property
    def is_discrete(self):
        return True

    @property
    def support(self):
        return np.asarray(self.levels)

    @property
    def top(self):
        return self.levels[-1]

    @property
    def bottom(self):
        return self.levels[0]

    def prev_value(self, v):
        """Value one level below v; -inf below the minimum level."""
        v = np.asarray(v, dtype=float)
        levels = self.support
        idx = np.searchsorted(levels, v, side="right") - 1
        prev = np.where(idx >= 1, levels[np.clip(idx - 1, 0, None)], -np.inf)
        return np.where(v == -np.inf, -np.inf, prev)

    def contains(self, v):
        return bool(np.all(np.isin(np.asarray(v, dtype=float), self.support)))


@dataclass(frozen=True)
class ContinuousGrid:
    lo: float
    hi: float
    grid_points: int = 101

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError("continuous domain needs lo < hi")
        if self.grid_points < 2:
            raise DomainError("grid needs at least 2 points")

    @property
    def is_discrete(self):
        return False

    @property
    def support(self):
        return np.linspace(self.lo, self.hi, self.grid_points)

    @property
    def top(self):
        return self.hi

    @property
    def bottom(self):
        return self.lo

    def contains(self, v):
        v = np.asarray(v, dtype=float)
        return bool(np.all((v >= self.lo) & (v <= self.hi)))


VariableDomain = DiscreteOrdinal | ContinuousGrid
