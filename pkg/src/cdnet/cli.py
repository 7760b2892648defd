"""Command-line front end.

The CLI is a thin client over the HTTP service: by default it mounts the
FastAPI app in-process; with --server it talks to a running instance over
HTTP.  Exit codes: 0 pass, 1 model/suite failure, 2 input error.
"""

from __future__ import annotations

import json
import os
import sys
import tempfile

import click


class ServiceClient:
    """In-process (default) or remote access to the service."""

    def __init__(self, server=None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import create_app

            self._client = TestClient(create_app())

    def get(self, path):
        return self._client.get(path)

    def post(self, path, payload):
        return self._client.post(path, json=payload)


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(output, text):
    if output:
        _atomic_write(output, text)
    else:
        click.echo(text, nl=False)


def _read(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        click.echo(f"input error: {e}", err=True)
        sys.exit(2)


def _fail_from(resp):
    """Translate a service error to the exit-code contract."""
    try:
        detail = resp.json()
    except ValueError:
        detail = {"error": resp.text, "kind": "Unknown"}
    click.echo(f"{detail.get('kind', 'error')}: {detail.get('error', '')}", err=True)
    sys.exit(2 if resp.status_code == 422 else 1)


def _log_format(path):
    return "jsonl" if str(path).endswith((".jsonl", ".ndjson", ".json")) else "csv"


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="talk to a running service instead of in-process")
@click.pass_context
def main(ctx, server):
    """Cumulative distribution networks: checking, inference, oracles, ranking."""
    ctx.obj = ServiceClient(server)


@main.command()
@click.argument("model_file", type=click.Path())
@click.option("--seed", default=0, show_default=True)
@click.pass_obj
def check(client, model_file, seed):
    """Validate a model file: structure plus the three validity conditions."""
    resp = client.post("/check", {"model_text": _read(model_file), "seed": seed})
    if resp.status_code != 200:
        _fail_from(resp)
    body = resp.json()
    s = body["structure"]
    click.echo(f"structure: bipartite={s['is_bipartite']} connected={s['is_connected']} "
               f"tree={s['is_tree']} edges={s['edge_count']}")
    if s.get("cycle"):
        click.echo(f"cycle: {' - '.join(s['cycle'])}")
    for fid, rep in body["positive_convergence"].items():
        verdict = "pass" if rep["passed"] else f"FAIL (residual {rep['residual']:.3g})"
        click.echo(f"positive convergence {fid}: {verdict}")
    neg = body["negative_convergence"]
    for var, rep in neg["per_variable"].items():
        click.echo(f"negative convergence {var}: {'pass' if rep['passed'] else 'FAIL'}")
    mono = body["monotonicity"]
    click.echo(f"monotonicity: {'pass' if mono['passed'] else 'FAIL'}")
    for f in mono.get("failures", [])[:5]:
        click.echo(f"  witness: {f}")
    click.echo("all checks passed" if body["passed"] else "checks FAILED")
    sys.exit(0 if body["passed"] else 1)


@main.command()
@click.argument("model_file", type=click.Path())
@click.option("--evidence", "evidence_file", type=click.Path(), default=None,
              help="evidence file, one 'variable = value' per line")
@click.option("--query", default=None, help="unobserved variable to condition on")
@click.option("--output", default=None, type=click.Path(),
              help="write the CDF table here instead of stdout")
@click.pass_obj
def infer(client, model_file, evidence_file, query, output):
    """Joint PDF at full evidence, or a conditional CDF for --query."""
    from . import modelfile
    from .errors import ParseError

    model_text = _read(model_file)
    evidence = {}
    if evidence_file:
        try:
            graph = modelfile.parse_model(model_text)
            evidence = modelfile.parse_evidence(_read(evidence_file), graph)
        except ParseError as e:
            click.echo(f"ParseError: {e}", err=True)
            sys.exit(2)
    resp = client.post("/infer", {
        "model_text": model_text, "evidence": evidence, "query": query,
    })
    if resp.status_code != 200:
        _fail_from(resp)
    body = resp.json()
    if body.get("root_pdf") is not None:
        _emit(output, f"rootPdf {body['root_pdf']:.17g}\n")
        return
    lines = ["# support mu lambda conditional_cdf"]
    for s, m, l, c in zip(body["support"], body["mu"], body["lam"],
                          body["conditional_cdf"]):
        lines.append(f"{s:.17g} {m:.17g} {l:.17g} {c:.17g}")
    _emit(output, "\n".join(lines) + "\n")


@main.command()
@click.argument("suite", type=click.Choice(["table1", "dsp"]))
@click.option("--seeds", default=100, show_default=True)
@click.option("--tolerance", default=1e-12, show_default=True)
@click.pass_obj
def oracle(client, suite, seeds, tolerance):
    """Run the fixture battery (table1) or the DSP equivalence suite (dsp)."""
    if suite == "table1":
        resp = client.get("/oracle/table1")
        if resp.status_code != 200:
            _fail_from(resp)
        body = resp.json()
        for r in body["rows"]:
            rel = f"{','.join(r['a'])} _||_ {','.join(r['b'])}"
            if r["given"]:
                rel += f" | {','.join(r['given'])}"
            click.echo(f"{rel}: independent={r['independent']} "
                       f"expected={r['expected_independent']} "
                       f"{'pass' if r['passed'] else 'FAIL'}")
        click.echo("table1 battery: " + ("pass" if body["passed"] else "FAIL"))
        sys.exit(0 if body["passed"] else 1)
    if seeds <= 0:
        click.echo("warning: zero seeds requested, nothing to do")
        sys.exit(0)
    resp = client.post("/oracle/dsp", {"seeds": seeds})
    if resp.status_code != 200:
        _fail_from(resp)
    body = resp.json()
    click.echo("# seed variables functions assignments max_deviation verdict")
    for r in body["rows"]:
        click.echo(f"{r['seed']} {r['variables']} {r['functions']} "
                   f"{r['assignments']} {r['max_deviation']:.3e} "
                   f"{'pass' if r['passed'] else 'FAIL'}")
    ok = body["max_deviation"] <= tolerance
    click.echo(f"max deviation {body['max_deviation']:.3e} over {seeds} seeds: "
               + ("pass" if ok else "FAIL"))
    sys.exit(0 if ok else 1)


@main.group()
def rank():
    """Ranking pipeline: fit parameters, evaluate a log, predict games."""


@rank.command()
@click.argument("log_file", type=click.Path())
@click.option("--output", default=None, type=click.Path(),
              help="write fitted params JSON here")
@click.option("--sigma0", default=None, type=float,
              help="override the player-score spread")
@click.pass_obj
def fit(client, log_file, output, sigma0):
    """Fit cutpoints and defaults from a scored match log."""
    resp = client.post("/rank/fit", {
        "log_text": _read(log_file), "format": _log_format(log_file),
        "sigma0": sigma0,
    })
    if resp.status_code != 200:
        _fail_from(resp)
    params = resp.json()["params"]
    if not params["cutpoints"]:
        click.echo("warning: single rank level, no finite cutpoints", err=True)
    _emit(output, json.dumps(params, indent=2) + "\n")


@rank.command("eval")
@click.argument("log_file", type=click.Path())
@click.option("--params", "params_file", default=None, type=click.Path())
@click.option("--output", default=None, type=click.Path(),
              help="write the two-column error series here")
@click.option("--seed", default=0, show_default=True)
@click.pass_obj
def rank_eval(client, log_file, params_file, output, seed):
    """Chronological predict-then-update evaluation with baselines."""
    payload = {
        "log_text": _read(log_file), "format": _log_format(log_file), "seed": seed,
    }
    if params_file:
        payload["params"] = json.loads(_read(params_file))
    resp = client.post("/rank/eval", payload)
    if resp.status_code != 200:
        _fail_from(resp)
    body = resp.json()
    series = "\n".join(
        f"{i + 1} {c:.17g}" for i, c in enumerate(body["cumulative_error"])
    )
    _emit(output, series + "\n")
    elo = body["elo_final"]
    click.echo(
        f"final error: model={body['final_error']:.4f} "
        f"random={body['random_final']:.4f} "
        f"elo={'n/a' if elo is None else f'{elo:.4f}'} "
        f"pairwise_inversion={body['pairwise_inversion_final']:.4f}",
        err=bool(output),
    )


@rank.command()
@click.argument("history_file", type=click.Path())
@click.argument("upcoming_file", type=click.Path())
@click.option("--params", "params_file", default=None, type=click.Path())
@click.option("--output", default=None, type=click.Path())
@click.pass_obj
def predict(client, history_file, upcoming_file, params_file, output):
    """Predict orderings for upcoming games from a learned history."""
    payload = {
        "history_text": _read(history_file),
        "upcoming_text": _read(upcoming_file),
        "format": _log_format(history_file),
    }
    if params_file:
        payload["params"] = json.loads(_read(params_file))
    resp = client.post("/rank/predict", payload)
    if resp.status_code != 200:
        _fail_from(resp)
    lines = ["# game_id predicted_standings cold_start"]
    for r in resp.json()["predictions"]:
        if r["cold_start_players"]:
            click.echo(f"cold start in {r['game_id']}: "
                       f"{','.join(r['cold_start_players'])} (prior skill used)",
                       err=True)
        lines.append(f"{r['game_id']} "
                     f"{';'.join(str(s) for s in r['predicted_standings'])} "
                     f"{','.join(r['cold_start_players']) or '-'}")
    _emit(output, "\n".join(lines) + "\n")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
