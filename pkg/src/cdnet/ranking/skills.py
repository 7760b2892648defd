"""Per-player skill CDFs sampled on the shared grid."""

from __future__ import annotations

import numpy as np

from ..functions.mvncdf import norm_cdf


class SkillStore:
    """Mapping player id -> sampled skill CDF values on params.skill_grid.

    New players start from a Gaussian CDF centered at the grid midrange with
    spread sigma (the paper leaves the initial skill unspecified).  Values
    are kept nondecreasing, in [0, 1], with the grid-top value exactly 1.
    """

    def __init__(self, params, init_mean=None, init_std=None):
        self.params = params
        self.grid = params.skill_grid
        self.init_mean = (
            0.5 * (params.grid_lo + params.grid_hi) if init_mean is None else init_mean
        )
        self.init_std = params.sigma if init_std is None else init_std
        self._skills = {}

    def __contains__(self, player):
        return True  # every player resolves, unseen ones to the prior

    def known(self, player):
        return player in self._skills

    def players(self):
        return list(self._skills)

    def _initial(self):
        values = norm_cdf((self.grid - self.init_mean) / self.init_std)
        return self._conform(values)

    def _conform(self, values):
        values = np.maximum.accumulate(np.clip(np.asarray(values, float), 0.0, None))
        top = values[-1]
        if top <= 0.0:
            raise ValueError("skill CDF must be positive at the grid top")
        values = np.clip(values / top, 0.0, 1.0)
        values[-1] = 1.0
        return values

    def __getitem__(self, player):
        if player not in self._skills:
            self._skills[player] = self._initial()
        return self._skills[player]

    def __setitem__(self, player, values):
        self._skills[player] = self._conform(values)

    def copy(self):
        out = SkillStore(self.params, self.init_mean, self.init_std)
        out._skills = {k: v.copy() for k, v in self._skills.items()}
        return out

    def mode(self, player):
        """Grid point maximizing the backward difference of the skill CDF."""
        values = self[player]
        pdf = np.diff(values, prepend=0.0)
        return float(self.grid[int(np.argmax(pdf))])
