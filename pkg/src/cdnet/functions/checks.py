"""Validity checks for cumulative functions and assembled graphs.

Three batteries mirror the defining conditions of a CDF product:
positive convergence (each factor reaches 1 at its supremum), negative
convergence (every variable has at least one neighboring factor vanishing at
its infimum) and monotonicity (nonnegative mixed differences — a sufficient
condition — plus the necessary-and-sufficient per-variable derivative form).
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

_TOL_CONVERGENCE = 1e-6
_TOL_MONOTONE = -1e-10


def _top_probe(fn, budget):
    """Probe points approaching the all-supremum corner, nearest last."""
    probes = []
    for i in range(budget):
        corner = []
        for lv in fn.axis_levels:
            if lv is not None:
                corner.append(lv[-1])
            else:
                corner.append(np.inf if i == budget - 1 else 8.0 * 2.0 ** i)
        probes.append(np.asarray(corner, dtype=float))
    return probes


def check_positive_convergence(fn, probe_budget=4):
    """Does fn tend to 1 at the supremum of all its arguments?

    Report-valued; the condition is sufficient for a valid product, not
    necessary (factors may converge to other constants that cancel).
    """
    best = -np.inf
    for z in _top_probe(fn, probe_budget):
        best = max(best, float(fn.evaluate(z)))
    residual = abs(1.0 - best)
    return {
        "passed": residual <= _TOL_CONVERGENCE,
        "sup_estimate": best,
        "residual": residual,
        "note": "sufficient condition only; convergence to 1 is not necessary",
    }


def check_negative_convergence(graph, probe_budget=4):
    """Per variable: does some neighboring factor vanish at its infimum?"""
    per_variable = {}
    for v, node in graph.variables.items():
        witnesses = []
        ok = False
        for f in graph.neighbors_of_variable(v):
            pos = f.scope.index(v)
            infimum = np.inf
            for i in range(probe_budget):
                z = []
                for p, lv in enumerate(f.fn.axis_levels):
                    if p == pos:
                        z.append(-np.inf if i == probe_budget - 1 else -8.0 * 2.0 ** i)
                    else:
                        z.append(np.inf if lv is None else lv[-1])
                infimum = min(infimum, float(f.fn.evaluate(np.asarray(z))))
            if infimum <= _TOL_CONVERGENCE:
                ok = True
                witnesses.append((f.id, infimum))
                break
            witnesses.append((f.id, infimum))
        per_variable[v] = {
            "passed": ok or not graph.neighbors_of_variable(v),
            "probes": witnesses,
        }
    return {
        "passed": all(r["passed"] for r in per_variable.values()),
        "per_variable": per_variable,
    }


def _sample_assignment(graph, rng):
    out = {}
    for v, node in graph.variables.items():
        d = node.domain
        if d.is_discrete:
            out[v] = float(rng.choice(d.support))
        else:
            out[v] = float(rng.uniform(d.bottom, d.top))
    return out


def check_monotonicity(graph, samples=50, subset_cap=4, seed=0):
    """Sampled check of nonnegative mixed differences plus the per-variable form.

    For every function and every scope subset (size-capped) the mixed
    derivative/backward difference must be >= -1e-10 at sampled points — the
    sufficient condition.  At points where all factors are positive the
    necessary-and-sufficient form sum_c d[phi_c]/phi_c >= 0 is checked per
    variable.  Failures carry a witness point.
    """
    rng = np.random.default_rng(seed)
    failures = []
    for _ in range(samples):
        a = _sample_assignment(graph, rng)
        for f in graph.functions.values():
            z = np.asarray([a[v] for v in f.scope])
            positions = range(len(f.scope))
            for r in range(1, min(len(f.scope), subset_cap) + 1):
                for subset in combinations(positions, r):
                    d = float(f.fn.mixed_diff(subset, z))
                    if d < _TOL_MONOTONE:
                        failures.append({
                            "kind": "mixed_difference",
                            "function": f.id,
                            "subset": [f.scope[p] for p in subset],
                            "point": dict(zip(f.scope, z.tolist())),
                            "value": d,
                        })
        # Per-variable necessary-and-sufficient form where F > 0.
        phi = {f.id: float(f.fn.evaluate(np.asarray([a[v] for v in f.scope])))
               for f in graph.functions.values()}
        if all(p > 0.0 for p in phi.values()):
            for v in graph.variables:
                total = 0.0
                for f in graph.neighbors_of_variable(v):
                    z = np.asarray([a[u] for u in f.scope])
                    total += float(f.fn.mixed_diff([f.scope.index(v)], z)) / phi[f.id]
                if total < _TOL_MONOTONE:
                    failures.append({
                        "kind": "per_variable_sum",
                        "variable": v,
                        "point": dict(a),
                        "value": total,
                    })
    return {"passed": not failures, "failures": failures}


def run_validity_battery(graph, samples=50, subset_cap=4, seed=0):
    """Structure report plus all three checks, for the CLI and the service."""
    from ..graph import validate_structure

    structure = validate_structure(graph)
    positive = {
        f.id: check_positive_convergence(f.fn) for f in graph.functions.values()
    }
    negative = check_negative_convergence(graph)
    monotone = check_monotonicity(graph, samples=samples, subset_cap=subset_cap, seed=seed)
    return {
        "structure": structure,
        "positive_convergence": positive,
        "negative_convergence": negative,
        "monotonicity": monotone,
        "passed": (
            all(r["passed"] for r in positive.values())
            and negative["passed"]
            and monotone["passed"]
        ),
    }
