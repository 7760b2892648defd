"""Online ranking pipeline: cutpoint fitting, skill updates, prediction,
chronological evaluation with baselines, and a synthetic log generator."""

from __future__ import annotations

import logging

import numpy as np

from ..dsp import propagate
from ..errors import InsufficientData
from ..graph import marginalize_unobserved
from .model import build_match_cdn, player_var, slot_order
from .params import default_params_for_spread
from .records import MatchRecord
from .skills import SkillStore

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Fitting


def fit_cutpoints(history, sigma0=None):
    """Cutpoints from pooled team performances, mu from the minimum score.

    Team performance = sum of its players' scores; the threshold between
    adjacent rank levels is the midpoint of the gap between the bordering
    order statistics of the pooled performance sample.  Non-monotone
    boundaries (heavy overlap/ties) pool adjacent levels, logged.
    """
    scored = [m for m in history if m.per_player_scores is not None]
    if not scored:
        raise InsufficientData("cutpoint fitting needs records with player scores")

    perf_by_code = {}
    all_scores = []
    for m in scored:
        k = len(m.teams)
        for i, team_scores in enumerate(m.per_player_scores):
            all_scores.extend(team_scores)
            # worst standing -> code 1, best -> highest code in this game
            code = k - m.observed_ranks[i] + 1
            perf_by_code.setdefault(code, []).append(float(sum(team_scores)))

    mu = float(min(all_scores))
    if sigma0 is None:
        # Wide player-score spread: with mu anchored at the *minimum* score,
        # the prior must still cover the cutpoint region several spreads
        # above it, or the rank evidence barely moves the skills.
        sigma0 = 3.0 * float(np.std(all_scores)) or 1.0

    codes = sorted(perf_by_code)
    pooled = np.sort(np.concatenate([perf_by_code[c] for c in codes]))
    counts = np.cumsum([len(perf_by_code[c]) for c in codes])
    cutpoints = []
    for boundary in counts[:-1]:
        theta = 0.5 * (pooled[boundary - 1] + pooled[boundary])
        if cutpoints and theta <= cutpoints[-1]:
            log.info("pooling adjacent rank levels at boundary %s (non-monotone)",
                     boundary)
            continue
        cutpoints.append(theta)
    if len(codes) <= 1:
        log.warning("single rank level in history; no finite cutpoints")
    params = default_params_for_spread(mu, sigma0)
    return params.with_(cutpoints=tuple(cutpoints))


# ---------------------------------------------------------------------------
# Online learning and prediction


def update_skills(match, skills, params):
    """One multiplicative skill update per player from the game's DSP messages.

    For player k the combined root message over the skill grid is
    s_k times the product of incoming team messages; normalized at the grid
    top it is exactly the conditional skill CDF given the observed ranks,
    which becomes the new s_k.
    """
    graph, evidence = build_match_cdn(match, skills, params)
    for player in match.players:
        others = [player_var(p) for p in match.players if p != player]
        reduced = marginalize_unobserved(graph, others)
        res = propagate(reduced, evidence, root=player_var(player))
        skills[player] = res.conditional_cdf
    return skills


def predict(match, skills, params):
    """Predicted standings (1 = best) per team, ties to the earlier index."""
    for p in match.players:
        if not skills.known(p):
            log.info("cold start for player %r: using the prior skill", p)
    perf = [sum(skills.mode(p) for p in team) for team in match.teams]
    order = sorted(range(len(perf)), key=lambda i: (-perf[i], i))
    standings = [0] * len(perf)
    for place, idx in enumerate(order):
        standings[idx] = place + 1
    return tuple(standings)


def _slot_error(predicted, observed):
    """Fraction of team rank slots predicted incorrectly."""
    wrong = sum(1 for p, o in zip(predicted, observed) if p != o)
    return wrong / len(observed)


def _pairwise_inversion(predicted, observed):
    pairs = 0
    bad = 0
    n = len(observed)
    for i in range(n):
        for j in range(i + 1, n):
            if observed[i] == observed[j]:
                continue
            pairs += 1
            if (predicted[i] < predicted[j]) != (observed[i] < observed[j]):
                bad += 1
    return bad / pairs if pairs else 0.0


class EloBaseline:
    """Conventional Elo for 2-team games: logistic expectation, K = 24."""

    def __init__(self, k_factor=24.0, initial=1500.0):
        self.k = k_factor
        self.initial = initial
        self.ratings = {}

    def _team_rating(self, team):
        return np.mean([self.ratings.get(p, self.initial) for p in team])

    def predict(self, match):
        if len(match.teams) != 2:
            return None
        ra = self._team_rating(match.teams[0])
        rb = self._team_rating(match.teams[1])
        return (1, 2) if ra >= rb else (2, 1)

    def update(self, match):
        if len(match.teams) != 2:
            return
        ra = self._team_rating(match.teams[0])
        rb = self._team_rating(match.teams[1])
        expected_a = 1.0 / (1.0 + 10.0 ** ((rb - ra) / 400.0))
        if match.observed_ranks[0] == match.observed_ranks[1]:
            score_a = 0.5
        else:
            score_a = 1.0 if match.observed_ranks[0] < match.observed_ranks[1] else 0.0
        delta = self.k * (score_a - expected_a)
        for p in match.teams[0]:
            self.ratings[p] = self.ratings.get(p, self.initial) + delta
        for p in match.teams[1]:
            self.ratings[p] = self.ratings.get(p, self.initial) - delta


def evaluate_stream(history, params, seed=0, skills=None):
    """Chronological predict-score-update loop with baselines.

    Returns per-game and cumulative rank-slot error series for the model, a
    uniform-random-ordering baseline, and Elo on 2-team games, plus the
    pairwise-inversion series for the model.
    """
    rng = np.random.default_rng(seed)
    skills = SkillStore(params) if skills is None else skills
    elo = EloBaseline()
    errors = []
    random_errors = []
    elo_errors = []
    inversions = []
    for match in history:
        predicted = predict(match, skills, params)
        errors.append(_slot_error(predicted, match.observed_ranks))
        inversions.append(_pairwise_inversion(predicted, match.observed_ranks))

        perm = rng.permutation(len(match.teams))
        random_pred = tuple(int(p) + 1 for p in perm)
        random_errors.append(_slot_error(random_pred, match.observed_ranks))

        elo_pred = elo.predict(match)
        if elo_pred is not None:
            elo_errors.append(_slot_error(elo_pred, match.observed_ranks))
            elo.update(match)

        update_skills(match, skills, params)

    errors = np.asarray(errors)
    counts = np.arange(1, len(errors) + 1)
    return {
        "per_game_error": errors,
        "cumulative_error": np.cumsum(errors) / counts,
        "pairwise_inversion": np.asarray(inversions),
        "random_error": np.asarray(random_errors),
        "random_final": float(np.mean(random_errors)) if random_errors else 0.0,
        "elo_error": np.asarray(elo_errors),
        "elo_final": float(np.mean(elo_errors)) if elo_errors else None,
        "final_error": float(np.mean(errors)) if len(errors) else 0.0,
        "skills": skills,
    }


# ---------------------------------------------------------------------------
# Synthetic logs


_TEAM_SHAPES = {
    "HeadToHead": (2, 1, 1),
    "SmallTeam": (2, 2, 4),
    "LargeTeam": (2, 4, 4),
    "FreeForAll": (4, 1, 1),
}


def generate_synthetic_log(player_count, game_count, game_type="HeadToHead",
                           noise=0.0, seed=0, skill_mean=25.0, skill_std=25.0 / 3.0):
    """Deterministic match log from latent Gaussian skills.

    Per game: sample disjoint teams, per-player scores = latent skill plus
    N(0, noise^2), standings from summed team scores (1 = best).  Returns the
    records and the latent skills (for clairvoyant baselines).
    """
    rng = np.random.default_rng(seed)
    latent = {
        f"p{i:03d}": float(skill_mean + skill_std * rng.standard_normal())
        for i in range(player_count)
    }
    names = list(latent)
    n_teams, lo, hi = _TEAM_SHAPES[game_type]
    records = []
    for g in range(game_count):
        sizes = [int(rng.integers(lo, hi + 1)) for _ in range(n_teams)]
        picked = rng.choice(len(names), size=sum(sizes), replace=False)
        teams = []
        at = 0
        for s in sizes:
            teams.append(tuple(names[i] for i in picked[at:at + s]))
            at += s
        scores = tuple(
            tuple(latent[p] + noise * rng.standard_normal() for p in team)
            for team in teams
        )
        totals = [sum(s) for s in scores]
        order = sorted(range(n_teams), key=lambda i: (-totals[i], i))
        standings = [0] * n_teams
        for place, idx in enumerate(order):
            standings[idx] = place + 1
        records.append(MatchRecord(
            game_id=f"g{g:05d}",
            game_type=game_type,
            teams=tuple(teams),
            observed_ranks=tuple(standings),
            per_player_scores=scores,
            timestamp=g,
        ))
    return records, latent


def clairvoyant_error(records, latent):
    """Mean slot error of a predictor that knows the latent skills."""
    errs = []
    for m in records:
        totals = [sum(latent[p] for p in team) for team in m.teams]
        order = sorted(range(len(totals)), key=lambda i: (-totals[i], i))
        standings = [0] * len(totals)
        for place, idx in enumerate(order):
            standings[idx] = place + 1
        errs.append(_slot_error(tuple(standings), m.observed_ranks))
    return float(np.mean(errs))
