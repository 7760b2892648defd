"""Dense monotone tables over ordinal level tuples."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from ..errors import DomainError, UnsupportedReduction
from .base import CumulativeFunction


def _axis_backward_diff(arr, axis):
    """Backward difference along an axis with the below-minimum value as 0."""
    shifted = np.roll(arr, 1, axis=axis)
    idx = [slice(None)] * arr.ndim
    idx[axis] = 0
    shifted[tuple(idx)] = 0.0
    return arr - shifted


class DiscreteTableFunction(CumulativeFunction):
    """Lookup table indexed by per-axis ordinal levels.

    Construction enforces the sufficient validity condition: every mixed
    backward difference over every axis subset is nonnegative (with the value
    below each axis minimum taken as 0).  Pass validate=False to build a
    deliberately broken table for the mutation checks.
    """

    def __init__(self, levels_per_axis, table, normalized=None, validate=True):
        levels = tuple(np.asarray(lv, dtype=float) for lv in levels_per_axis)
        table = np.asarray(table, dtype=float)
        if table.shape != tuple(len(lv) for lv in levels):
            raise DomainError("table shape does not match level lists")
        for lv in levels:
            if len(lv) == 0 or np.any(np.diff(lv) <= 0):
                raise DomainError("axis levels must be non-empty and strictly increasing")
        self.axis_levels = levels
        self.table = table
        top = float(table[tuple(-1 for _ in levels)])
        self.normalized = bool(abs(top - 1.0) <= 1e-12) if normalized is None else normalized
        if validate:
            if np.any(table < 0):
                raise DomainError("table entries must be nonnegative")
            if top > 1.0 + 1e-12:
                raise DomainError("top-corner value must not exceed 1")
            if self.normalized and abs(top - 1.0) > 1e-12:
                raise DomainError("normalized table must have top-corner value 1")
            axes = range(table.ndim)
            for r in range(1, table.ndim + 1):
                for subset in combinations(axes, r):
                    d = table
                    for ax in subset:
                        d = _axis_backward_diff(d, ax)
                    if np.any(d < -1e-12):
                        raise DomainError(f"mixed difference over axes {subset} is negative")

    def _indices(self, z):
        """Per-axis level indices; -1 encodes below-minimum."""
        z = np.asarray(z, dtype=float)
        idx = np.empty(z.shape, dtype=np.int64)
        for ax, lv in enumerate(self.axis_levels):
            idx[..., ax] = np.searchsorted(lv, z[..., ax], side="right") - 1
        return idx

    def evaluate(self, z):
        idx = self._indices(z)
        below = np.any(idx < 0, axis=-1)
        safe = np.clip(idx, 0, None)
        vals = self.table[tuple(np.moveaxis(safe, -1, 0))]
        return np.where(below, 0.0, vals)

    def _cont_diff(self, positions, z):
        if positions:
            raise DomainError("table axes are discrete")
        return self.evaluate(z)

    def pin_to_sup(self, positions):
        positions = sorted(set(positions))
        keep = [i for i in range(self.arity) if i not in positions]
        if not keep:
            raise UnsupportedReduction("cannot pin every axis; use sup_value")
        sl = tuple(-1 if i in positions else slice(None) for i in range(self.arity))
        return DiscreteTableFunction(
            [self.axis_levels[i] for i in keep], self.table[sl], validate=False
        )

    def sup_value(self):
        return float(self.table[tuple(-1 for _ in self.axis_levels)])
