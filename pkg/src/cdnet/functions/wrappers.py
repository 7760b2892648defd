"""Adapters composing the concrete families into model-specific factors."""

from __future__ import annotations

import numpy as np

from ..errors import DomainError, UnsupportedReduction
from .base import CumulativeFunction


class OrdinalAxisCdf(CumulativeFunction):
    """Continuous base function with some axes restricted to ordinal levels.

    Each wrapped axis carries level codes and their embedded real values on
    the base function's axis (the top embedding may be +inf).  Evaluation maps
    codes to embedded values; backward differences along wrapped axes then
    realize interval probabilities of the base CDF.
    """

    def __init__(self, base, axis_maps):
        """axis_maps: {position: (level_codes, embedded_values)}."""
        self.base = base
        maps = {}
        levels = []
        for pos in range(base.arity):
            if pos in axis_maps:
                codes, embedded = axis_maps[pos]
                codes = np.asarray(codes, dtype=float)
                embedded = np.asarray(embedded, dtype=float)
                if codes.shape != embedded.shape or codes.ndim != 1:
                    raise DomainError("level codes and embedded values must align")
                if np.any(np.diff(codes) <= 0) or np.any(np.diff(embedded) <= 0):
                    raise DomainError("codes and embedded values must be increasing")
                maps[pos] = (codes, embedded)
                levels.append(codes)
            else:
                if base.axis_levels[pos] is not None:
                    raise DomainError("base axes must be continuous")
                levels.append(None)
        self.axis_maps = maps
        self.axis_levels = tuple(levels)

    def _embed(self, z):
        z = np.asarray(z, dtype=float).copy()
        for pos, (codes, embedded) in self.axis_maps.items():
            v = z[..., pos]
            idx = np.searchsorted(codes, v, side="right") - 1
            mapped = np.where(idx >= 0, embedded[np.clip(idx, 0, None)], -np.inf)
            z[..., pos] = np.where(v == -np.inf, -np.inf, mapped)
        return z

    def evaluate(self, z):
        return self.base.evaluate(self._embed(z))

    def _cont_diff(self, positions, z):
        if not positions:
            return self.evaluate(z)
        return self.base._cont_diff(positions, self._embed(z))

    def pin_to_sup(self, positions):
        positions = sorted(set(positions))
        for pos in positions:
            if pos in self.axis_maps and not np.isposinf(self.axis_maps[pos][1][-1]):
                raise UnsupportedReduction(
                    "ordinal axis with a finite top embedding has no closed-form sup limit"
                )
        pinned_base = self.base.pin_to_sup(positions)
        keep = [i for i in range(self.arity) if i not in positions]
        new_maps = {}
        for new_pos, old_pos in enumerate(keep):
            if old_pos in self.axis_maps:
                new_maps[new_pos] = self.axis_maps[old_pos]
        if not new_maps:
            return pinned_base
        return OrdinalAxisCdf(pinned_base, new_maps)

    def sup_value(self):
        return self.base.sup_value()


class SampledCdfFunction(CumulativeFunction):
    """Univariate CDF sampled on a grid, linearly interpolated.

    Zero below the grid, constant at the top value above it; the derivative
    is the exact piecewise slope of the interpolant.
    """

    axis_levels = (None,)

    def __init__(self, grid, values):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
            raise DomainError("grid and values must be matching 1-D arrays")
        if np.any(np.diff(grid) <= 0):
            raise DomainError("grid must be strictly increasing")
        if np.any(values < -1e-12) or np.any(np.diff(values) < -1e-9):
            raise DomainError("sampled CDF must be nonnegative and nondecreasing")
        self.grid = grid
        self.values = np.maximum.accumulate(np.clip(values, 0.0, None))

    def evaluate(self, z):
        x = np.asarray(z, dtype=float)[..., 0]
        return np.interp(x, self.grid, self.values, left=0.0, right=float(self.values[-1]))

    def _cont_diff(self, positions, z):
        if not positions:
            return self.evaluate(z)
        x = np.asarray(z, dtype=float)[..., 0]
        slopes = np.diff(self.values) / np.diff(self.grid)
        idx = np.clip(np.searchsorted(self.grid, x, side="right") - 1, 0, len(slopes) - 1)
        inside = (x > self.grid[0]) & (x <= self.grid[-1])
        return np.where(inside, slopes[idx], 0.0)

    def sup_value(self):
        return float(self.values[-1])


class ShiftedTailFunction(CumulativeFunction):
    """floor + (1 - floor) * base: breaks negative convergence, nothing else."""

    def __init__(self, base, floor):
        if not 0.0 <= floor < 1.0:
            raise DomainError("floor must be in [0, 1)")
        self.base = base
        self.floor = float(floor)
        self.axis_levels = base.axis_levels

    def evaluate(self, z):
        return self.floor + (1.0 - self.floor) * self.base.evaluate(z)

    def _cont_diff(self, positions, z):
        if not positions:
            return self.evaluate(z)
        return (1.0 - self.floor) * self.base._cont_diff(positions, z)

    def pin_to_sup(self, positions):
        return ShiftedTailFunction(self.base.pin_to_sup(positions), self.floor)

    def sup_value(self):
        return self.floor + (1.0 - self.floor) * self.base.sup_value()
