"""Independent brute-force oracles for everything the DSP engine computes.

Everything here is deliberately dumb: direct products, inclusion-exclusion
corner sums, central finite differences and exact rational arithmetic.  The
test suite freezes these against the message-passing engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product as iproduct

import numpy as np

from .domains import DiscreteOrdinal
from .errors import DomainError, InvalidQuery, SubsetTooLarge
from .functions.table import DiscreteTableFunction
from .graph import CdnGraph


# ---------------------------------------------------------------------------
# Exact discrete joints and independence testing


@dataclass(frozen=True)
class DiscreteJoint:
    """Dense joint distribution over ordinal variables, exact-rational aware."""

    variables: tuple
    levels: tuple              # per-variable tuple of level labels
    probabilities: np.ndarray  # object array of Fractions (or floats)

    def __post_init__(self):
        shape = tuple(len(lv) for lv in self.levels)
        if self.probabilities.shape != shape:
            raise DomainError("probability array shape does not match levels")
        total = self.probabilities.sum()
        if any(p < 0 for p in self.probabilities.flat):
            raise DomainError("probabilities must be nonnegative")
        if abs(float(total) - 1.0) > 1e-12:
            raise DomainError(f"probabilities sum to {float(total)}, not 1")

    def axis(self, var):
        return self.variables.index(var)


def independence_test(joint, a_set, b_set, c_set=(), tolerance=0.0):
    """Check A independent of B given C on a dense joint.

    Returns a dict with the verdict, the largest deviation
    |P(a,b|c) - P(a|c)P(b|c)| over level combinations with P(c) > 0, and a
    witness assignment attaining it.  With Fraction-valued joints and the
    default tolerance 0 the verdict is exact.
    """
    a_set, b_set, c_set = tuple(a_set), tuple(b_set), tuple(c_set)
    named = a_set + b_set + c_set
    if len(set(named)) != len(named):
        raise InvalidQuery("A, B, C must be disjoint")
    for v in named:
        if v not in joint.variables:
            raise InvalidQuery(f"unknown variable {v!r}")

    p = joint.probabilities
    ax = {v: joint.axis(v) for v in joint.variables}

    def marg(keep):
        drop = tuple(ax[v] for v in joint.variables if v not in keep)
        return p.sum(axis=drop) if drop else p

    # Arrays indexed in joint-variable order restricted to the kept sets.
    p_abc = marg(set(named))
    p_ac = marg(set(a_set + c_set))
    p_bc = marg(set(b_set + c_set))
    p_c = marg(set(c_set))

    order_abc = [v for v in joint.variables if v in named]
    order_ac = [v for v in joint.variables if v in a_set + c_set]
    order_bc = [v for v in joint.variables if v in b_set + c_set]
    order_c = [v for v in joint.variables if v in c_set]
    sizes = {v: len(joint.levels[ax[v]]) for v in named}

    max_dev = 0
    witness = None
    for idx in iproduct(*[range(sizes[v]) for v in order_abc]):
        at = dict(zip(order_abc, idx))
        if order_c:
            pc = p_c[tuple(at[v] for v in order_c)]
        else:
            pc = p_c.item() if isinstance(p_c, np.ndarray) else p_c
        if pc == 0:
            continue
        lhs = p_abc[tuple(at[v] for v in order_abc)] * pc
        rhs = p_ac[tuple(at[v] for v in order_ac)] * p_bc[tuple(at[v] for v in order_bc)]
        dev = abs(lhs - rhs) / (pc * pc)
        if dev > max_dev:
            max_dev = dev
            witness = {
                v: joint.levels[ax[v]][at[v]] for v in order_abc
            } | {
                "conditional": lhs / (pc * pc),
                "product": rhs / (pc * pc),
            }
    independent = max_dev <= tolerance if tolerance else max_dev == 0
    return {
        "independent": bool(independent),
        "max_deviation": max_dev,
        "witness": None if independent else witness,
    }


_TABLE1_NUMERATORS = (
    343, 392, 105, 168, 105, 120, 87, 120,
    49, 56, 15, 24, 63, 72, 33, 48,
)


def table1_fixture():
    """The paper's 4-binary-variable joint, entries as exact rationals /1800."""
    probs = np.array(
        [Fraction(n, 1800) for n in _TABLE1_NUMERATORS], dtype=object
    ).reshape(2, 2, 2, 2)
    return DiscreteJoint(
        variables=("x1", "x2", "x3", "x4"),
        levels=((0, 1),) * 4,
        probabilities=probs,
    )


def table1_battery():
    """All eight §-style (in)dependence verdicts on the fixture, exact."""
    j = table1_fixture()
    cases = [
        (("x1",), ("x3",), ("x2",), False),
        (("x2",), ("x4",), ("x3",), False),
        (("x1",), ("x2",), (), False),
        (("x2",), ("x3",), (), False),
        (("x3",), ("x4",), (), False),
        (("x1",), ("x4",), (), True),
        (("x1",), ("x3",), (), True),
        (("x2",), ("x4",), (), True),
    ]
    rows = []
    for a, b, c, expect_indep in cases:
        res = independence_test(j, a, b, c)
        rows.append({
            "a": a, "b": b, "given": c,
            "expected_independent": expect_indep,
            "independent": res["independent"],
            "max_deviation": res["max_deviation"],
            "witness": res["witness"],
            "pass": res["independent"] == expect_indep,
        })
    return rows


# ---------------------------------------------------------------------------
# Brute-force CDF / PDF / numeric derivatives on graphs


def brute_force_cdf(graph, assignment):
    """F(x) as a plain loop-and-multiply, independent of CdnGraph.evaluate."""
    out = np.asarray(graph.constant, dtype=float)
    for f in graph.functions.values():
        pts = np.stack(
            np.broadcast_arrays(
                *[np.asarray(assignment[v], dtype=float) for v in f.scope]
            ),
            axis=-1,
        )
        out = out * f.fn.evaluate(pts)
    return out


def brute_force_pdf_discrete(graph, assignment):
    """P(x) by inclusion-exclusion over corner subsets of all variables."""
    names = list(graph.variables)
    for v in names:
        if not isinstance(graph.variables[v].domain, DiscreteOrdinal):
            raise DomainError(f"variable {v!r} is not discrete")
    vals = {v: np.asarray(assignment[v], dtype=float) for v in names}
    prevs = {v: graph.variables[v].domain.prev_value(vals[v]) for v in names}
    total = 0.0
    for r in range(len(names) + 1):
        for stepped in combinations(names, r):
            a = {v: (prevs[v] if v in stepped else vals[v]) for v in names}
            total = total + (-1.0) ** r * brute_force_cdf(graph, a)
    return total


def numeric_mixed_partial(graph, subset, assignment, step=1e-3):
    """Central-difference mixed partial of the product CDF; O(step^2) error."""
    subset = list(subset)
    if len(subset) > 8:
        raise SubsetTooLarge(f"{len(subset)} differentiation variables > 8")
    if step <= 0:
        raise DomainError("step must be positive")
    if not subset:
        return brute_force_cdf(graph, assignment)
    total = 0.0
    for signs in iproduct((1.0, -1.0), repeat=len(subset)):
        a = dict(assignment)
        for v, s in zip(subset, signs):
            a[v] = np.asarray(a[v], dtype=float) + s * step / 2.0
        total = total + np.prod(signs) * brute_force_cdf(graph, a)
    return total / step ** len(subset)


# ---------------------------------------------------------------------------
# Random monotone-table tree CDNs and the DSP equivalence suite


def random_monotone_table(rng, shape, allow_zeros=True):
    """Monotone table by accumulating nonnegative mass, top corner 1."""
    mass = rng.random(shape)
    if allow_zeros:
        mass = np.where(rng.random(shape) < 0.25, 0.0, mass)
    if mass.sum() == 0.0:
        mass.flat[0] = 1.0
    table = mass
    for ax in range(table.ndim):
        table = np.cumsum(table, axis=ax)
    return table / table.flat[-1]


def random_tree_cdn(rng, max_vars=7, max_levels=3):
    """Random tree CDN over ordinal variables with monotone table factors.

    Grows from a single variable: each added factor attaches to exactly one
    existing variable (unary, or binary/ternary introducing fresh variables),
    so the bipartite graph stays a tree.
    """
    n_vars = int(rng.integers(2, max_vars + 1))
    g = CdnGraph()

    def new_var():
        i = len(g.variables)
        k = int(rng.integers(2, max_levels + 1))
        g.add_variable(f"x{i}", DiscreteOrdinal(tuple(range(k))))
        return f"x{i}"

    new_var()
    while len(g.variables) < n_vars:
        anchor = f"x{int(rng.integers(0, len(g.variables)))}"
        grow = min(int(rng.integers(1, 3)), n_vars - len(g.variables))
        scope = [anchor] + [new_var() for _ in range(grow)]
        rng.shuffle(scope)
        shape = tuple(len(g.variables[v].domain.levels) for v in scope)
        g.add_function(scope, DiscreteTableFunction(
            [g.variables[v].domain.levels for v in scope],
            random_monotone_table(rng, shape),
        ))
    # Sprinkle unary factors.
    for _ in range(int(rng.integers(0, 3))):
        v = f"x{int(rng.integers(0, len(g.variables)))}"
        k = len(g.variables[v].domain.levels)
        g.add_function([v], DiscreteTableFunction(
            [g.variables[v].domain.levels], random_monotone_table(rng, (k,))
        ))
    return g


def mutation_suite(seed_count=50):
    """Seeded invalid-model mutations; each must be caught with a witness.

    Even seeds break monotonicity by inflating a table's bottom corner above
    its neighbors; odd seeds break negative convergence by lifting the lower
    tail of every factor touching one variable (lifting a single factor is
    not a graph-level violation when another neighbor still vanishes).
    """
    from dataclasses import replace

    from .functions.checks import check_monotonicity, check_negative_convergence
    from .functions.wrappers import ShiftedTailFunction

    rows = []
    for seed in range(seed_count):
        rng = np.random.default_rng(seed)
        g = random_tree_cdn(rng, max_vars=5)
        if seed % 2 == 0:
            fid = list(g.functions)[int(rng.integers(0, len(g.functions)))]
            fn = g.functions[fid].fn
            table = fn.table.copy()
            table[tuple(0 for _ in table.shape)] = float(table.max()) * 1.5
            mutated = DiscreteTableFunction(
                fn.axis_levels, table, validate=False
            )
            g.functions[fid] = replace(g.functions[fid], fn=mutated)
            report = check_monotonicity(g, samples=40, seed=seed)
            witness = report["failures"][0] if report["failures"] else None
            kind = "decreasing_entry"
        else:
            v = f"x{int(rng.integers(0, len(g.variables)))}"
            for f in g.neighbors_of_variable(v):
                g.functions[f.id] = replace(f, fn=ShiftedTailFunction(f.fn, 0.2))
            report = check_negative_convergence(g)
            bad = report["per_variable"].get(v, {})
            witness = {"variable": v, "probes": bad.get("probes")} if not report["passed"] else None
            kind = "lifted_tail"
        rows.append({
            "seed": seed,
            "kind": kind,
            "detected": not report["passed"],
            "witness": witness,
        })
    return rows


def dsp_equivalence_suite(seed_count=100, max_vars=7, max_levels=3):
    """DSP vs inclusion-exclusion at every joint assignment, per seed."""
    from . import dsp

    rows = []
    for seed in range(seed_count):
        rng = np.random.default_rng(seed)
        g = random_tree_cdn(rng, max_vars=max_vars, max_levels=max_levels)
        names = list(g.variables)
        grids = [g.variables[v].domain.support for v in names]
        mesh = np.meshgrid(*grids, indexing="ij")
        assignment = {v: m.reshape(-1) for v, m in zip(names, mesh)}
        root = names[int(rng.integers(0, len(names)))]
        res = dsp.propagate(g, assignment, root=root)
        oracle_pdf = brute_force_pdf_discrete(g, assignment)
        dev = float(np.max(np.abs(np.asarray(res.root_pdf) - oracle_pdf)))
        rows.append({
            "seed": seed,
            "variables": len(names),
            "functions": len(g.functions),
            "assignments": len(assignment[names[0]]),
            "max_deviation": dev,
            "pass": dev <= 1e-12,
        })
    return rows
