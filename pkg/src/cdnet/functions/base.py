"""Abstract contract for local cumulative functions.

A function is nonnegative, converges to 1 at the supremum of its arguments
and has nonnegative mixed derivatives / finite differences over every scope
subset.  Discrete axes carry their own level lists; differentiation along a
discrete axis means the backward finite difference with the value below the
minimum level defined as 0 (the coordinate sentinel for "below minimum" is
-inf, which every family must evaluate to 0).
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from ..errors import DomainError, UnsupportedReduction


class CumulativeFunction:
    #: per-axis level arrays; None marks a continuous axis
    axis_levels: tuple = ()

    @property
    def arity(self):
        return len(self.axis_levels)

    def evaluate(self, z):
        """phi(z) for z of shape (..., arity)."""
        raise NotImplementedError

    def _cont_diff(self, positions, z):
        """Derivative w.r.t. the given *continuous* axis positions at z.

        positions is a sorted tuple; an empty tuple means plain evaluation.
        """
        if not positions:
            return self.evaluate(z)
        raise NotImplementedError

    def mixed_diff(self, positions, z):
        """Mixed derivative/backward difference over a set of scope positions.

        Continuous positions differentiate analytically; discrete positions
        expand into the 2^m corner inclusion-exclusion of backward differences.
        """
        positions = tuple(sorted(set(positions)))
        z = np.asarray(z, dtype=float)
        if z.shape[-1] != self.arity:
            raise DomainError(f"expected {self.arity} coordinates, got {z.shape[-1]}")
        disc = [p for p in positions if self.axis_levels[p] is not None]
        cont = tuple(p for p in positions if self.axis_levels[p] is None)
        if not disc:
            return self._cont_diff(cont, z)
        out = np.zeros(np.asarray(z).shape[:-1])
        for r in range(len(disc) + 1):
            for stepped in combinations(disc, r):
                zz = z.copy()
                for p in stepped:
                    zz[..., p] = self._prev_level(p, z[..., p])
                out = out + (-1.0) ** r * self._cont_diff(cont, zz)
        return out

    def _prev_level(self, position, v):
        levels = self.axis_levels[position]
        idx = np.searchsorted(levels, np.asarray(v, dtype=float), side="right") - 1
        prev = np.where(idx >= 1, levels[np.clip(idx - 1, 0, None)], -np.inf)
        return np.where(np.asarray(v, dtype=float) == -np.inf, -np.inf, prev)

    def pin_to_sup(self, positions):
        """Limit of the function as the given arguments go to their suprema."""
        raise UnsupportedReduction(f"{type(self).__name__} cannot pin positions {positions}")

    def sup_value(self):
        """Value at the all-supremum corner."""
        top = [np.inf if lv is None else lv[-1] for lv in self.axis_levels]
        return float(self.evaluate(np.asarray(top)))
