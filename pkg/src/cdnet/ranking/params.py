"""Rating-model parameters and their JSON config round trip."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ..errors import InvalidParams


@dataclass(frozen=True)
class RatingModelParams:
    """Everything the game-CDN builder and learner need.

    cutpoints carve the latent team-performance axis into rank intervals
    (the below-bottom and above-top thresholds are implicitly -inf/+inf);
    rank_count is the number of rank levels K = len(cutpoints) + 1.  beta is
    the performance-noise scale, sigma the player-score spread, mu the
    player-score location, rho the coupling between consecutive rank slots.
    The skill grid is shared by every player's skill CDF.
    """

    cutpoints: tuple = ()
    beta: float = 25.0 / 6.0
    sigma: float = 25.0 / 3.0
    mu: float = 0.0
    rho: float = 0.5
    grid_lo: float = -100.0 / 3.0
    grid_hi: float = 50.0
    grid_points: int = 201

    def __post_init__(self):
        cp = tuple(float(c) for c in self.cutpoints)
        object.__setattr__(self, "cutpoints", cp)
        if any(b <= a for a, b in zip(cp, cp[1:])):
            raise InvalidParams("cutpoints must be strictly increasing")
        if not self.beta > 0:
            raise InvalidParams("beta must be positive")
        if not self.sigma > 0:
            raise InvalidParams("sigma must be positive")
        if not -1.0 < self.rho < 1.0:
            raise InvalidParams("rho must lie in (-1, 1)")
        if not self.grid_lo < self.grid_hi or self.grid_points < 2:
            raise InvalidParams("skill grid needs lo < hi and at least 2 points")

    @property
    def rank_count(self):
        return len(self.cutpoints) + 1

    @property
    def skill_grid(self):
        return np.linspace(self.grid_lo, self.grid_hi, self.grid_points)

    def team_means(self, slot_count):
        """Ordering-factor means r~_n, nondecreasing across rank slots.

        Anchored just below the first cutpoint so the dominance checks run in
        the well-conditioned part of the rank axis; spacing beta per slot.
        """
        anchor = (self.cutpoints[0] if self.cutpoints else 0.0) - self.beta
        return tuple(anchor + n * self.beta for n in range(slot_count))

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise InvalidParams(f"unknown parameter(s): {sorted(extra)}")
        return cls(**data)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def with_(self, **kw):
        return replace(self, **kw)


def default_params_for_spread(mu, sigma0):
    """The documented defaults: beta = sigma0/2, sigma = sigma0, rho = 0.5,
    grid [mu - 4 sigma0, mu + 6 sigma0] with 201 points."""
    return RatingModelParams(
        beta=sigma0 / 2.0,
        sigma=sigma0,
        mu=mu,
        rho=0.5,
        grid_lo=mu - 4.0 * sigma0,
        grid_hi=mu + 6.0 * sigma0,
        grid_points=201,
    )
