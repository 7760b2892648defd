"""Match-log records and the two accepted log encodings.

A record holds one multiplayer game: teams (nested player lists), one
observed ordinal rank per team, and optional per-player scores.  After
parsing, ranks are normalized to *standings*: 1 is always the best team, so
downstream code never needs the log's declared polarity.

Flat CSV encoding (one record per line, header optional)::

    game_id,game_type,teams,ranks,scores
    g1,HeadToHead,alice|bob,1;2,17.5;12.0

Teams are '|'-separated, players within a team ';'-separated; scores mirror
the player nesting ('|' between teams, ';' within).  JSONL encoding: one
object per line with keys gameId, gameType, teams, ranks, scores.  See
docs/match_log_schema.json for the machine-readable schema.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from ..errors import InvalidMatch, ParseError

GAME_TYPES = ("LargeTeam", "SmallTeam", "HeadToHead", "FreeForAll")


@dataclass(frozen=True)
class MatchRecord:
    game_id: str
    game_type: str
    teams: tuple            # tuple of tuples of player ids
    observed_ranks: tuple   # standing per team, 1 = best
    per_player_scores: tuple | None = None  # mirrors teams nesting
    timestamp: int = 0

    def __post_init__(self):
        if self.game_type not in GAME_TYPES:
            raise InvalidMatch(f"unknown game type {self.game_type!r}")
        if len(self.teams) < 2:
            raise InvalidMatch("a match needs at least 2 teams")
        if any(len(t) == 0 for t in self.teams):
            raise InvalidMatch("every team must be non-empty")
        if len(self.observed_ranks) != len(self.teams):
            raise InvalidMatch("one rank per team required")
        if self.per_player_scores is not None:
            if tuple(len(s) for s in self.per_player_scores) != tuple(
                len(t) for t in self.teams
            ):
                raise InvalidMatch("scores must mirror the team nesting")

    @property
    def players(self):
        return [p for team in self.teams for p in team]


def _normalize_ranks(ranks, rank_one_best):
    """Map declared ranks to standings where 1 is best, ties preserved."""
    ranks = [float(r) for r in ranks]
    keyed = sorted(set(ranks), reverse=not rank_one_best)
    standing = {r: i + 1 for i, r in enumerate(keyed)}
    return tuple(standing[r] for r in ranks)


def _record_from_fields(game_id, game_type, teams, ranks, scores,
                        rank_one_best, index):
    if len(ranks) != len(teams):
        raise InvalidMatch(f"record {index}: {len(teams)} teams but {len(ranks)} ranks")
    return MatchRecord(
        game_id=str(game_id),
        game_type=str(game_type),
        teams=tuple(tuple(t) for t in teams),
        observed_ranks=_normalize_ranks(ranks, rank_one_best),
        per_player_scores=None if scores is None else tuple(tuple(s) for s in scores),
        timestamp=index,
    )


def parse_csv_log(text, rank_one_best=True):
    records = []
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if r and any(cell.strip() for cell in r)]
    if rows and rows[0][:2] == ["game_id", "game_type"]:
        rows = rows[1:]
    for i, row in enumerate(rows):
        if len(row) < 4:
            raise ParseError(f"record {i}: expected at least 4 columns", line=i + 1)
        game_id, game_type, teams_text, ranks_text = (c.strip() for c in row[:4])
        scores_text = row[4].strip() if len(row) > 4 else ""
        try:
            teams = [t.split(";") for t in teams_text.split("|")]
            if ranks_text:
                ranks = [float(r) for r in ranks_text.split(";")]
            else:
                # Upcoming games carry no outcome; placeholder standings.
                ranks = list(range(1, len(teams) + 1))
            scores = None
            if scores_text:
                scores = [
                    [float(s) for s in team.split(";")]
                    for team in scores_text.split("|")
                ]
            records.append(_record_from_fields(
                game_id, game_type, teams, ranks, scores, rank_one_best, i
            ))
        except (ValueError, InvalidMatch) as e:
            raise ParseError(f"record {i}: {e}", line=i + 1) from None
    return records


def parse_jsonl_log(text, rank_one_best=True):
    records = []
    index = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise ParseError(f"record {index}: invalid JSON ({e.msg})",
                             line=lineno, column=e.colno) from None
        try:
            ranks = obj.get("ranks") or list(range(1, len(obj["teams"]) + 1))
            records.append(_record_from_fields(
                obj["gameId"], obj["gameType"], obj["teams"], ranks,
                obj.get("scores"), rank_one_best, index,
            ))
        except (KeyError, TypeError, ValueError, InvalidMatch) as e:
            raise ParseError(f"record {index}: {e}", line=lineno) from None
        index += 1
    return records


def load_match_log(path, rank_one_best=True):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if str(path).endswith((".jsonl", ".ndjson", ".json")):
        return parse_jsonl_log(text, rank_one_best)
    return parse_csv_log(text, rank_one_best)


def dump_csv_log(records):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["game_id", "game_type", "teams", "ranks", "scores"])
    for r in records:
        scores = ""
        if r.per_player_scores is not None:
            scores = "|".join(
                ";".join(repr(float(s)) for s in team) for team in r.per_player_scores
            )
        writer.writerow([
            r.game_id, r.game_type,
            "|".join(";".join(team) for team in r.teams),
            ";".join(str(int(x)) for x in r.observed_ranks),
            scores,
        ])
    return out.getvalue()
