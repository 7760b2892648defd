"""Per-game CDN assembly: skill, team, and ordering factors.

The latent team performance T of a d-player team is 1'U + beta*Z with player
scores U ~ N(mu*1, sigma^2 I) and independent standard normal Z, so the
integral defining the team factor collapses to a (d+1)-dimensional Gaussian
CDF over (U, T).  Rank variables are ordinal codes embedded into the
performance axis through the cutpoints (top embedding +inf), and consecutive
rank slots are tied by a bivariate Gaussian CDF with correlation rho whose
means are nondecreasing across slots, which enforces the stochastic ordering
of team performances.

Internally rank slots are ordered worst to best: slot 1 carries the
stochastically smallest performance.  Rank codes grow with performance, so
an observed standing s (1 = best) among K levels becomes code K - s + 1.
"""

from __future__ import annotations

import numpy as np

from ..domains import ContinuousGrid, DiscreteOrdinal
from ..errors import InvalidMatch, InvalidParams, TeamTooLarge, UnknownPlayer
from ..functions.gaussian import GaussianCdfFunction
from ..functions.wrappers import OrdinalAxisCdf, SampledCdfFunction
from ..graph import CdnGraph

_MAX_TEAM = 4


def rank_axis_map(params):
    """Rank codes 1..K and their cutpoint embeddings (top = +inf)."""
    k = params.rank_count
    codes = np.arange(1, k + 1, dtype=float)
    embedded = np.asarray(list(params.cutpoints) + [np.inf])
    return codes, embedded


def team_gaussian(team_size, params):
    """The raw (teamSize+1)-dimensional Gaussian CDF over (U, T)."""
    if not 1 <= team_size <= _MAX_TEAM:
        raise TeamTooLarge(f"team size {team_size} outside [1, {_MAX_TEAM}]")
    d = team_size
    mean = np.full(d + 1, params.mu)
    mean[d] = d * params.mu
    cov = np.eye(d + 1) * params.sigma**2
    cov[d, :d] = params.sigma**2
    cov[:d, d] = params.sigma**2
    cov[d, d] = d * params.sigma**2 + params.beta**2
    return GaussianCdfFunction(mean, cov)


def team_function(team_size, params):
    """Team factor over (player scores..., rank code): Eq.-15 style integral
    reduced to a Gaussian CDF, rank axis embedded through the cutpoints."""
    base = team_gaussian(team_size, params)
    return OrdinalAxisCdf(base, {team_size: rank_axis_map(params)})


def ordering_function(slot, slot_count, params):
    """Ordering factor joining rank slots `slot` and `slot+1` (0-based)."""
    means = params.team_means(slot_count)
    r_lo, r_hi = means[slot], means[slot + 1]
    if r_lo > r_hi:
        raise InvalidParams("slot means must be nondecreasing")
    b2 = params.beta**2
    base = GaussianCdfFunction(
        [r_lo, r_hi], [[b2, params.rho * b2], [params.rho * b2, b2]]
    )
    amap = rank_axis_map(params)
    return OrdinalAxisCdf(base, {0: amap, 1: amap})


def slot_order(match):
    """Team indices ordered worst to best (ties keep earlier team first)."""
    return sorted(
        range(len(match.teams)),
        key=lambda i: (-match.observed_ranks[i], i),
    )


def standing_to_code(standing, params):
    """Observed standing (1 = best) to rank code (K = best), clipped to the
    fitted alphabet."""
    return float(np.clip(params.rank_count - standing + 1, 1, params.rank_count))


def player_var(player):
    return f"x:{player}"


def rank_var(slot):
    return f"R:{slot + 1}"


def build_match_cdn(match, skills, params):
    """Tree CDN for one game plus the rank evidence dict.

    Teams occupy rank slots worst to best; each player-score variable gets a
    unary skill factor, each team a team factor into its slot's rank
    variable, and consecutive slots an ordering factor.
    """
    order = slot_order(match)
    graph = CdnGraph()
    grid = params.skill_grid
    codes, _ = rank_axis_map(params)
    rank_domain = DiscreteOrdinal(tuple(codes))
    evidence = {}

    for slot, team_idx in enumerate(order):
        team = match.teams[team_idx]
        if len(team) > _MAX_TEAM:
            raise TeamTooLarge(
                f"team {team_idx} has {len(team)} players (max {_MAX_TEAM})"
            )
        rv = rank_var(slot)
        graph.add_variable(rv, rank_domain)
        evidence[rv] = standing_to_code(match.observed_ranks[team_idx], params)
        scope = []
        for player in team:
            if player not in skills:
                raise UnknownPlayer(f"no skill entry for player {player!r}")
            pv = player_var(player)
            graph.add_variable(pv, ContinuousGrid(
                params.grid_lo, params.grid_hi, params.grid_points
            ))
            graph.add_function(
                [pv], SampledCdfFunction(grid, skills[player]), fn_id=f"s:{player}"
            )
            scope.append(pv)
        graph.add_function(
            scope + [rv], team_function(len(team), params), fn_id=f"g:{slot + 1}"
        )

    for slot in range(len(order) - 1):
        graph.add_function(
            [rank_var(slot), rank_var(slot + 1)],
            ordering_function(slot, len(order), params),
            fn_id=f"h:{slot + 1}",
        )
    return graph, evidence
