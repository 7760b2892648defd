"""HTTP service exposing validity checks, inference, oracles, and ranking.

Error contract: malformed input (parse/schema problems) maps to 422, model
or inference failures (non-tree graphs, invalid tables, zero-density
evidence, ...) to 400.  The CLI translates these to its exit codes.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import dsp, modelfile, oracle
from ..errors import CdnError, ParseError
from ..functions.checks import run_validity_battery
from ..ranking import (
    RatingModelParams,
    SkillStore,
    evaluate_stream,
    fit_cutpoints,
    parse_csv_log,
    parse_jsonl_log,
    predict,
)
from . import schemas


def _parse_log(text, fmt, rank_one_best):
    parser = parse_csv_log if fmt == "csv" else parse_jsonl_log
    return parser(text, rank_one_best=rank_one_best)


def _params_from(maybe_dict, history, sigma0=None):
    if maybe_dict is not None:
        return RatingModelParams.from_dict(maybe_dict)
    return fit_cutpoints(history, sigma0=sigma0)


def create_app():
    app = FastAPI(title="cdnet", version="1.0.0")

    @app.exception_handler(ParseError)
    async def _parse_error(request, exc):
        return JSONResponse(
            status_code=422,
            content=schemas.ErrorResponse(error=str(exc), kind=type(exc).__name__).model_dump(),
        )

    @app.exception_handler(CdnError)
    async def _cdn_error(request, exc):
        return JSONResponse(
            status_code=400,
            content=schemas.ErrorResponse(error=str(exc), kind=type(exc).__name__).model_dump(),
        )

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.post("/check", response_model=schemas.CheckResponse)
    def check(req: schemas.CheckRequest):
        graph = modelfile.parse_model(req.model_text)
        battery = run_validity_battery(
            graph, samples=req.samples, subset_cap=req.subset_cap, seed=req.seed
        )
        s = battery["structure"]
        return schemas.CheckResponse(
            passed=battery["passed"],
            structure=schemas.StructureOut(
                is_bipartite=s.is_bipartite,
                is_connected=s.is_connected,
                is_tree=s.is_tree,
                is_forest=s.is_forest,
                components=s.components,
                cycle=s.cycle,
                edge_count=s.edge_count,
            ),
            positive_convergence=battery["positive_convergence"],
            negative_convergence=battery["negative_convergence"],
            monotonicity=battery["monotonicity"],
        )

    @app.post("/infer", response_model=schemas.InferResponse)
    def infer(req: schemas.InferRequest):
        graph = modelfile.parse_model(req.model_text)
        evidence = dict(req.evidence)
        for v in evidence:
            if v not in graph.variables:
                raise ParseError(f"evidence for unknown variable {v!r}")
        if req.query is not None:
            if req.query not in graph.variables:
                raise ParseError(f"unknown query variable {req.query!r}")
            root = req.query
            unobserved = [
                v for v in graph.variables if v != root and v not in evidence
            ]
        else:
            missing = [v for v in graph.variables if v not in evidence]
            if missing:
                raise ParseError(
                    f"no query given but variables {missing} are unobserved"
                )
            root = min(graph.variables)
            unobserved = []
        if unobserved:
            from ..graph import marginalize_unobserved

            graph = marginalize_unobserved(graph, unobserved)
        res = dsp.propagate(graph, evidence, root=root)
        if res.root_pdf is not None:
            return schemas.InferResponse(
                root=res.root,
                root_pdf=float(np.asarray(res.root_pdf).reshape(())),
                term_counts=res.term_counts,
            )
        return schemas.InferResponse(
            root=res.root,
            support=[float(x) for x in res.support],
            mu=[float(x) for x in res.mu],
            lam=[float(x) for x in res.lam],
            conditional_cdf=[float(x) for x in res.conditional_cdf],
            term_counts=res.term_counts,
        )

    @app.get("/oracle/table1", response_model=schemas.Table1Response)
    def oracle_table1():
        rows = oracle.table1_battery()
        out = []
        for r in rows:
            witness = None
            if r["witness"] is not None:
                witness = {k: str(v) for k, v in r["witness"].items()}
            out.append(schemas.Table1Row(
                a=list(r["a"]), b=list(r["b"]), given=list(r["given"]),
                expected_independent=r["expected_independent"],
                independent=r["independent"],
                max_deviation=str(r["max_deviation"]),
                witness=witness,
                passed=r["pass"],
            ))
        return schemas.Table1Response(passed=all(r.passed for r in out), rows=out)

    @app.post("/oracle/dsp", response_model=schemas.DspSuiteResponse)
    def oracle_dsp(req: schemas.DspSuiteRequest):
        rows = oracle.dsp_equivalence_suite(req.seeds)
        out = [schemas.DspSuiteRow(
            seed=r["seed"], variables=r["variables"], functions=r["functions"],
            assignments=r["assignments"], max_deviation=r["max_deviation"],
            passed=r["pass"],
        ) for r in rows]
        return schemas.DspSuiteResponse(
            passed=all(r.passed for r in out),
            max_deviation=max((r.max_deviation for r in out), default=0.0),
            rows=out,
        )

    @app.post("/rank/fit", response_model=schemas.RankFitResponse)
    def rank_fit(req: schemas.RankFitRequest):
        history = _parse_log(req.log_text, req.format, req.rank_one_best)
        params = fit_cutpoints(history, sigma0=req.sigma0)
        return schemas.RankFitResponse(params=params.to_dict())

    @app.post("/rank/eval", response_model=schemas.RankEvalResponse)
    def rank_eval(req: schemas.RankEvalRequest):
        history = _parse_log(req.log_text, req.format, req.rank_one_best)
        params = _params_from(req.params, history)
        out = evaluate_stream(history, params, seed=req.seed)
        inv = out["pairwise_inversion"]
        return schemas.RankEvalResponse(
            final_error=out["final_error"],
            random_final=out["random_final"],
            elo_final=out["elo_final"],
            per_game_error=[float(x) for x in out["per_game_error"]],
            cumulative_error=[float(x) for x in out["cumulative_error"]],
            pairwise_inversion_final=float(np.mean(inv)) if len(inv) else 0.0,
            params=params.to_dict(),
        )

    @app.post("/rank/predict", response_model=schemas.RankPredictResponse)
    def rank_predict(req: schemas.RankPredictRequest):
        history = _parse_log(req.history_text, req.format, req.rank_one_best)
        upcoming = _parse_log(req.upcoming_text, req.format, req.rank_one_best)
        params = _params_from(req.params, history)
        skills = evaluate_stream(history, params, seed=0)["skills"]
        rows = []
        for match in upcoming:
            cold = [p for p in match.players if not skills.known(p)]
            standings = predict(match, skills, params)
            rows.append(schemas.RankPredictRow(
                game_id=match.game_id,
                predicted_standings=[int(s) for s in standings],
                cold_start_players=cold,
            ))
        return schemas.RankPredictResponse(predictions=rows)

    return app
