"""Acceptance gate: ten end-to-end criteria, one pass/fail line each.

Each test prints ``ACCEPTANCE <n> [<label>]: PASS`` (or FAIL) so the gate can
be read off a plain ``pytest -v -s`` run.  Numeric tolerances and runtime
budgets are stated inline; derived reference values come from the independent
brute-force oracles, never from the engine under test.
"""

from __future__ import annotations

import time
from fractions import Fraction
from itertools import combinations, product as iproduct

import numpy as np
import pytest
from scipy.integrate import dblquad, quad

from cdnet import (
    CdnGraph,
    ContinuousGrid,
    DiscreteOrdinal,
    conditional_cdf,
    propagate,
)
from cdnet.dsp import marginal_cdf
from cdnet.functions import (
    BivariateCopulaFunction,
    DiscreteTableFunction,
    GaussianCdfFunction,
    GaussianMarginal,
    OrdinalAxisCdf,
    SampledCdfFunction,
    SigmoidMarginal,
)
from cdnet.functions.checks import run_validity_battery
from cdnet.functions.mvncdf import norm_cdf
from cdnet.graph import marginalize_unobserved
from cdnet.oracle import (
    dsp_equivalence_suite,
    mutation_suite,
    numeric_mixed_partial,
    random_monotone_table,
    random_tree_cdn,
    table1_battery,
    table1_fixture,
)
from cdnet.ranking import (
    MatchRecord,
    RatingModelParams,
    SkillStore,
    build_match_cdn,
    evaluate_stream,
    fit_cutpoints,
    generate_synthetic_log,
)
from cdnet.ranking.model import player_var, rank_var, team_gaussian
from cdnet.ranking.pipeline import clairvoyant_error


def report(number, label, ok, detail=""):
    verdict = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {number} [{label}]: {verdict}{suffix}")
    assert ok, f"acceptance criterion {number} failed: {label}{suffix}"


def test_01_table1_battery_exact():
    t0 = time.perf_counter()
    rows = table1_battery()
    verdicts_ok = len(rows) == 8 and all(r["pass"] for r in rows)

    # Printed witnesses, exact: P(x1=0, x3=0 | x2=1) = 75/216 != 80/216 ...
    w = rows[0]["witness"]
    witness_ok = (
        w["conditional"] == Fraction(75, 216) and w["product"] == Fraction(80, 216)
    )

    # ... and the x2=0 equalities 245/384, 91/384, 35/384, 13/384.
    j = table1_fixture()
    p = j.probabilities
    p_x2 = p.sum(axis=(0, 2, 3))
    expected = {
        (0, 0): Fraction(245, 384), (0, 1): Fraction(91, 384),
        (1, 0): Fraction(35, 384), (1, 1): Fraction(13, 384),
    }
    equalities_ok = True
    for (a, c), val in expected.items():
        joint = p[a, 0, c, :].sum() / p_x2[0]
        marg_a = p[a, 0, :, :].sum() / p_x2[0]
        marg_c = p[:, 0, c, :].sum() / p_x2[0]
        equalities_ok &= joint == val and joint == marg_a * marg_c
    elapsed = time.perf_counter() - t0
    report(
        1, "exact independence battery",
        verdicts_ok and witness_ok and equalities_ok and elapsed < 1.0,
        f"8 verdicts, witnesses exact, {elapsed:.2f}s",
    )


def test_02_dsp_equals_oracle_discrete():
    t0 = time.perf_counter()
    rows = dsp_equivalence_suite(100)
    elapsed = time.perf_counter() - t0
    worst = max(r["max_deviation"] for r in rows)
    report(
        2, "discrete inference vs inclusion-exclusion",
        len(rows) == 100 and worst <= 1e-12 and elapsed < 30.0,
        f"max deviation {worst:.2e}, {elapsed:.1f}s",
    )


def test_03_dsp_equals_oracle_continuous():
    t0 = time.perf_counter()
    s2 = 0.025
    g = CdnGraph()
    for v in ("x", "y", "z"):
        g.add_variable(v, ContinuousGrid(-2.0, 2.0, 61))
    g.add_function(
        ["x", "y"],
        GaussianCdfFunction([0.0, 0.0], [[s2, 0.3 * s2], [0.3 * s2, 1.2 * s2]]),
    )
    g.add_function(
        ["y", "z"],
        GaussianCdfFunction([0.0, 0.0], [[1.2 * s2, -0.25 * s2], [-0.25 * s2, 0.9 * s2]]),
    )
    rng = np.random.default_rng(7)
    pts = rng.normal(0.0, 0.7 * np.sqrt(s2), size=(50, 3))
    a = {"x": pts[:, 0], "y": pts[:, 1], "z": pts[:, 2]}

    pdf = np.asarray(propagate(g, a, root="y").root_pdf)
    oracle_h = np.asarray(numeric_mixed_partial(g, ["x", "y", "z"], a, step=1e-3))
    oracle_h2 = np.asarray(numeric_mixed_partial(g, ["x", "y", "z"], a, step=5e-4))

    rel = float(np.max(np.abs(pdf - oracle_h) / np.abs(oracle_h)))
    ratio = float(np.abs(pdf - oracle_h).sum() / np.abs(pdf - oracle_h2).sum())
    elapsed = time.perf_counter() - t0
    report(
        3, "continuous inference vs central differences",
        rel <= 1e-3 and 3.5 <= ratio <= 4.5 and elapsed < 60.0,
        f"max rel {rel:.2e}, halving ratio {ratio:.3f}, {elapsed:.1f}s",
    )


def test_04_gaussian_derivative_identity():
    # 1000 random (dimension, subset, point) probes, analytic vs central diff.
    rng = np.random.default_rng(42)
    fns = {}
    for d in (1, 2, 3):
        A = rng.normal(0.0, 1.0, size=(d, d))
        cov = A @ A.T + d * np.eye(d)
        cov /= np.mean(np.diag(cov))
        fns[d] = GaussianCdfFunction(rng.normal(0.0, 0.5, size=d), cov)
    steps = {1: 1e-5, 2: 1e-3, 3: 3e-3}

    worst = 0.0
    for i in range(1000):
        d = int(rng.integers(1, 4))
        fn = fns[d]
        subsets = [
            s for r in range(1, d + 1) for s in combinations(range(d), r)
        ]
        subset = subsets[int(rng.integers(0, len(subsets)))]
        z = fn.mean + rng.uniform(-2.0, 2.0, size=d) * np.sqrt(np.diag(fn.cov))
        h = steps[len(subset)]
        got = float(fn.mixed_diff(list(subset), z))
        ref = 0.0
        for signs in iproduct((1.0, -1.0), repeat=len(subset)):
            zz = z.copy()
            for p, s in zip(subset, signs):
                zz[p] += s * h / 2.0
            ref += np.prod(signs) * float(fn.evaluate(zz))
        ref /= h ** len(subset)
        worst = max(worst, abs(got - ref))

    # The two closed-form spot values, to 6 decimals.
    std = GaussianCdfFunction([0.0, 0.0], np.eye(2))
    v1 = float(std.mixed_diff([0], np.zeros(2)))
    v2 = float(std.mixed_diff([0, 1], np.zeros(2)))
    trivials_ok = (
        abs(v1 - 0.5 / np.sqrt(2.0 * np.pi)) < 5e-7
        and abs(v2 - 1.0 / (2.0 * np.pi)) < 5e-7
    )
    report(
        4, "Gaussian derivative identity",
        worst <= 1e-6 and trivials_ok,
        f"max |analytic - numeric| {worst:.2e}",
    )


def test_05_message_term_counts():
    ok = True
    observed = {}
    for d in range(1, 9):
        rng = np.random.default_rng(d)
        g = CdnGraph()
        names = [f"x{i}" for i in range(d)]
        for v in names:
            g.add_variable(v, DiscreteOrdinal((0, 1)))
        fid = g.add_function(
            names,
            DiscreteTableFunction(
                [(0, 1)] * d,
                random_monotone_table(rng, (2,) * d, allow_zeros=False),
            ),
        )
        evidence = {v: 1.0 for v in names[1:]}
        res = propagate(g, evidence, root=names[0])
        observed[d] = res.term_counts[fid]
        ok &= res.term_counts[fid] == 2 ** (d - 1)
    report(
        5, "message expansion term counts",
        ok, f"degrees 1-8 -> {sorted(observed.values())}",
    )


def test_06_validity_checks_and_mutations():
    # One graph touching every shipped function family.
    g = CdnGraph()
    g.add_variable("a", DiscreteOrdinal((0, 1)))
    g.add_variable("b", DiscreteOrdinal((0, 1, 2)))
    g.add_function(["a", "b"], DiscreteTableFunction(
        [(0, 1), (0, 1, 2)], np.array([[0.1, 0.2, 0.4], [0.3, 0.5, 1.0]])
    ))
    g.add_variable("x", ContinuousGrid(-4, 4))
    g.add_variable("y", ContinuousGrid(-4, 4))
    g.add_function(["x", "y"], GaussianCdfFunction(
        [0.0, 0.0], [[1.0, 0.4], [0.4, 1.0]]
    ))
    g.add_variable("u", ContinuousGrid(-4, 4))
    g.add_variable("v", ContinuousGrid(-4, 4))
    g.add_function(["u", "v"], BivariateCopulaFunction(
        1.6, GaussianMarginal(), SigmoidMarginal()
    ))
    g.add_variable("w", ContinuousGrid(-4, 4))
    wgrid = np.linspace(-4, 4, 41)
    wvals = norm_cdf(wgrid / 1.5)
    g.add_function(["w"], SampledCdfFunction(wgrid, wvals / wvals[-1]))
    g.add_variable("s", ContinuousGrid(-4, 4))
    g.add_variable("r", DiscreteOrdinal((1, 2, 3)))
    g.add_function(["s", "r"], OrdinalAxisCdf(
        GaussianCdfFunction([0.0, 0.0], [[1.0, 0.3], [0.3, 1.0]]),
        {1: (np.array([1.0, 2.0, 3.0]), np.array([-0.5, 0.5, np.inf]))},
    ))
    families_ok = run_validity_battery(g, samples=30)["passed"]

    rows = mutation_suite(50)
    detected = sum(1 for r in rows if r["detected"] and r["witness"] is not None)
    report(
        6, "validity conditions and mutation detection",
        families_ok and detected == 50,
        f"all families valid, {detected}/50 mutations caught with witnesses",
    )


def test_07_root_invariance_and_normalization():
    worst_rel = 0.0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        g = random_tree_cdn(rng, max_vars=6)
        names = list(g.variables)
        grids = [g.variables[v].domain.support for v in names]
        mesh = np.meshgrid(*grids, indexing="ij")
        a = {v: m.reshape(-1) for v, m in zip(names, mesh)}
        ref = np.asarray(propagate(g, a, root=names[0]).root_pdf)
        scale = max(float(np.max(np.abs(ref))), 1e-300)
        for root in names[1:]:
            got = np.asarray(propagate(g, a, root=root).root_pdf)
            worst_rel = max(worst_rel, float(np.max(np.abs(got - ref))) / scale)

    # Every emitted conditional CDF ends at 1 +- 1e-9.
    tops = []
    for seed in range(10):
        rng = np.random.default_rng(100 + seed)
        g = random_tree_cdn(rng, max_vars=5)
        names = list(g.variables)
        query = names[0]
        evidence = {
            v: float(g.variables[v].domain.support[-1]) for v in names[1:]
        }
        _, cond = conditional_cdf(g, query, evidence)
        tops.append(float(cond[-1]))
    cg = CdnGraph()
    for v in ("x", "y"):
        cg.add_variable(v, ContinuousGrid(-3, 3, 31))
    cg.add_function(["x", "y"], GaussianCdfFunction(
        [0.0, 0.0], [[1.0, 0.5], [0.5, 1.0]]
    ))
    _, cond = conditional_cdf(cg, "y", {"x": 0.4})
    tops.append(float(cond[-1]))
    tops_ok = tops and all(abs(t - 1.0) <= 1e-9 for t in tops)
    report(
        7, "root invariance and conditional normalization",
        worst_rel <= 1e-10 and tops_ok,
        f"max relative root deviation {worst_rel:.2e}, "
        f"{len(tops)} conditional tops at 1",
    )


def _ordering_params():
    return RatingModelParams(
        cutpoints=(21.0, 25.0, 29.0), beta=4.0, sigma=8.0, mu=25.0,
        grid_lo=-7.0, grid_hi=73.0, grid_points=81,
    )


def test_08_stochastic_ordering_of_rank_slots():
    params = _ordering_params()
    skills = SkillStore(params)
    matches = [
        MatchRecord("m2", "HeadToHead", (("a",), ("b",)), (1, 2)),
        MatchRecord("m3", "FreeForAll", (("a",), ("b",), ("c",)), (1, 2, 3)),
    ]
    ok = True
    for match in matches:
        graph, _ = build_match_cdn(match, skills, params)
        reduced = marginalize_unobserved(
            graph, [player_var(p) for p in match.players]
        )
        n = len(match.teams)
        cdfs = []
        for slot in range(n):
            others = [rank_var(s) for s in range(n) if s != slot]
            _, cdf = marginal_cdf(
                marginalize_unobserved(reduced, others), rank_var(slot)
            )
            cdfs.append(np.asarray(cdf))
        for lo, hi in zip(cdfs, cdfs[1:]):
            ok &= bool(np.all(lo >= hi - 1e-9))
    report(8, "stochastic ordering of rank slots", ok, "2- and 3-team games")


def test_09_ranking_end_to_end():
    t0 = time.perf_counter()
    noise = 0.25 * (25.0 / 3.0)
    records, latent = generate_synthetic_log(
        200, 2000, "HeadToHead", noise=noise, seed=0
    )
    params = fit_cutpoints(records)
    out = evaluate_stream(records, params, seed=0)
    elapsed = time.perf_counter() - t0

    final_quartile = float(np.mean(out["per_game_error"][1500:]))
    random_final = out["random_final"]
    windows = out["cumulative_error"].reshape(10, 200).mean(axis=1)
    monotone = bool(np.all(np.diff(windows) <= 1e-9))
    floor = clairvoyant_error(records, latent)

    ok = (
        final_quartile < 0.40
        and abs(random_final - 0.5) <= 0.03
        and monotone
        and floor < 0.15
        and elapsed < 300.0
    )
    report(
        9, "ranking pipeline on the synthetic log", ok,
        f"final-quartile error {final_quartile:.3f}, random {random_final:.3f}, "
        f"clairvoyant floor {floor:.3f}, smoothed series "
        f"{'non-increasing' if monotone else 'NOT monotone'}, {elapsed:.0f}s",
    )


def test_10_team_factor_closed_form():
    params = _ordering_params()
    rng = np.random.default_rng(17)
    mu, sigma, beta = params.mu, params.sigma, params.beta

    def normal_pdf(u, loc):
        return np.exp(-0.5 * ((u - loc) / sigma) ** 2) / (sigma * np.sqrt(2 * np.pi))

    worst = 0.0
    fn1 = team_gaussian(1, params)
    for _ in range(25):
        xu, t = rng.normal(mu, 1.2 * sigma), rng.normal(mu, 1.5 * sigma)
        got = float(fn1.evaluate(np.array([xu, t])))
        want, _err = quad(
            lambda u: normal_pdf(u, mu) * float(norm_cdf((t - u) / beta)),
            mu - 10 * sigma, xu, epsabs=1e-10, limit=200,
        )
        worst = max(worst, abs(got - want))

    fn2 = team_gaussian(2, params)
    for _ in range(25):
        x1, x2 = rng.normal(mu, sigma, size=2)
        t = rng.normal(2 * mu, 2 * sigma)
        got = float(fn2.evaluate(np.array([x1, x2, t])))
        want, _err = dblquad(
            lambda u2, u1: (
                normal_pdf(u1, mu) * normal_pdf(u2, mu)
                * float(norm_cdf((t - u1 - u2) / beta))
            ),
            mu - 10 * sigma, x1,
            mu - 10 * sigma, x2,
            epsabs=1e-9,
        )
        worst = max(worst, abs(got - want))
    report(
        10, "team factor vs direct integration",
        worst <= 1e-5, f"max |closed form - quadrature| {worst:.2e}",
    )
