from .params import RatingModelParams
from .records import MatchRecord, load_match_log, parse_csv_log, parse_jsonl_log
from .skills import SkillStore
from .model import build_match_cdn, ordering_function, team_function
from .pipeline import (
    evaluate_stream,
    fit_cutpoints,
    generate_synthetic_log,
    predict,
    update_skills,
)

__all__ = [
    "MatchRecord",
    "RatingModelParams",
    "SkillStore",
    "build_match_cdn",
    "evaluate_stream",
    "fit_cutpoints",
    "generate_synthetic_log",
    "load_match_log",
    "ordering_function",
    "parse_csv_log",
    "parse_jsonl_log",
    "predict",
    "team_function",
    "update_skills",
]
