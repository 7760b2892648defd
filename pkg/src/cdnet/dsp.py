"""Exact derivative-sum-product message passing on tree CDNs.

Messages come in (mu, lambda) pairs per edge: mu carries a partially
differentiated product of factors, lambda its derivative in the recipient
variable.  Differentiation along continuous axes is analytic (product rule
plus factor derivatives); along discrete axes it is the exact backward
difference, realized as corner inclusion-exclusion, so discrete inference is
exact to rounding.

All intermediate values may be rescaled by powers of two (exact in floating
point) to avoid underflow on long chains; exponents are folded back into the
final density and cancel in conditional CDFs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import product as iproduct

import numpy as np

from .errors import (
    DegreeTooLarge,
    DomainError,
    EmptyGraph,
    NotATree,
    ScheduleError,
    UnknownVariable,
    ZeroEvidenceDensity,
)
from .graph import validate_structure

log = logging.getLogger(__name__)

_CLAMP_TOL = 1e-12
_MAX_REMAINDER = 20


@dataclass
class MessagePair:
    variable: str
    kind: str                      # "point" or "grid"
    support: np.ndarray            # (B,) observed values or (G,) grid levels
    mu: np.ndarray
    lam: np.ndarray
    mu_prev: np.ndarray | None = None   # discrete targets: mu one level down
    scale_exp: int = 0
    discrete: bool = False


@dataclass
class InferenceResult:
    root: str
    root_pdf: float | np.ndarray | None
    support: np.ndarray | None
    mu: np.ndarray | None
    lam: np.ndarray | None
    conditional_cdf: np.ndarray | None
    term_counts: dict = field(default_factory=dict)


def _rescale(arrays):
    """Divide arrays by a common power of two; return (arrays, exponent)."""
    m = 0.0
    for a in arrays:
        if a is not None and a.size:
            m = max(m, float(np.max(np.abs(a))))
    if m <= 0.0 or not np.isfinite(m):
        return arrays, 0
    k = math.frexp(m)[1]
    s = 2.0 ** (-k)
    return [None if a is None else a * s for a in arrays], k


def _clamp(arr, label):
    neg = arr < 0.0
    if np.any(neg):
        worst = float(np.min(arr))
        if worst < -_CLAMP_TOL:
            log.warning("%s: negative message value %.3e left unclamped", label, worst)
            arr = np.where(neg & (arr > -_CLAMP_TOL), 0.0, arr)
        else:
            log.debug("%s: clamping %d tiny negatives (min %.3e)", label, int(neg.sum()), worst)
            arr = np.where(neg, 0.0, arr)
    return arr


def variable_to_function_message(var_node, incoming, observed_value=None):
    """Combine messages from all neighbor functions except the recipient.

    A leaf variable (no incoming) emits mu = 1, lambda = 0.
    """
    discrete = var_node.domain.is_discrete
    if observed_value is None:
        raise ScheduleError("variable-to-function messages require an observed value")
    vals = np.atleast_1d(np.asarray(observed_value, dtype=float))
    if not incoming:
        one = np.ones_like(vals)
        return MessagePair(
            variable=var_node.id, kind="point", support=vals,
            mu=one, lam=np.zeros_like(vals),
            mu_prev=one.copy() if discrete else None, discrete=discrete,
        )
    mu = np.ones_like(vals)
    scale_exp = 0
    for m in incoming:
        mu = mu * m.mu
        scale_exp += m.scale_exp
    if discrete:
        mu_prev = np.ones_like(vals)
        for m in incoming:
            if m.mu_prev is None:
                raise ScheduleError("discrete message missing previous-level values")
            mu_prev = mu_prev * m.mu_prev
        lam = mu - mu_prev
    else:
        mu_prev = None
        lam = np.zeros_like(vals)
        for j, m in enumerate(incoming):
            term = m.lam
            for jj, other in enumerate(incoming):
                if jj != j:
                    term = term * other.mu
            lam = lam + term
    (mu, lam, mu_prev), k = _rescale([mu, lam, mu_prev])
    return MessagePair(
        variable=var_node.id, kind="point", support=vals, mu=mu, lam=lam,
        mu_prev=mu_prev, scale_exp=scale_exp + k, discrete=discrete,
    )


def function_to_variable_message(fn_node, graph, target, incoming, target_support):
    """Differentiate the local factor product toward the target variable.

    incoming: {variable id: MessagePair} for every scope variable but the
    target, all single-point messages at their observed values.
    target_support: ("point", values) or ("grid", values) on the target axis.
    """
    scope = fn_node.scope
    pos_of = {v: i for i, v in enumerate(scope)}
    if target not in pos_of:
        raise ScheduleError(f"{target!r} not in scope of {fn_node.id!r}")
    remainder = [v for v in scope if v != target]
    if len(remainder) > _MAX_REMAINDER:
        raise DegreeTooLarge(f"function degree {len(scope)} too large to expand")
    for v in remainder:
        if v not in incoming:
            raise ScheduleError(f"missing incoming message for {v!r} at {fn_node.id!r}")

    tvar = graph.variables[target]
    t_discrete = tvar.domain.is_discrete
    tpos = pos_of[target]
    kind, tvals = target_support
    tvals = np.atleast_1d(np.asarray(tvals, dtype=float))

    cont_r = [v for v in remainder if not graph.variables[v].domain.is_discrete]
    disc_r = [v for v in remainder if graph.variables[v].domain.is_discrete]
    scale_exp = sum(incoming[v].scale_exp for v in remainder)

    def expand(target_values, with_target_diff):
        shape = np.broadcast_shapes(
            target_values.shape, *[incoming[v].support.shape for v in remainder]
        )
        total = np.zeros(shape)
        for cont_modes in iproduct(("phi", "msg"), repeat=len(cont_r)):
            for disc_modes in iproduct(("at", "prev"), repeat=len(disc_r)):
                pts = np.empty(shape + (len(scope),))
                pts[..., tpos] = target_values
                coeff = np.ones(shape)
                sign = 1.0
                diffpos = [tpos] if with_target_diff else []
                for v, mode in zip(cont_r, cont_modes):
                    m = incoming[v]
                    pts[..., pos_of[v]] = m.support
                    if mode == "phi":
                        coeff = coeff * m.mu
                        diffpos.append(pos_of[v])
                    else:
                        coeff = coeff * m.lam
                for v, mode in zip(disc_r, disc_modes):
                    m = incoming[v]
                    if mode == "at":
                        pts[..., pos_of[v]] = m.support
                        coeff = coeff * m.mu
                    else:
                        pts[..., pos_of[v]] = graph.variables[v].domain.prev_value(m.support)
                        coeff = coeff * m.mu_prev
                        sign = -sign
                total = total + sign * coeff * fn_node.fn.mixed_diff(diffpos, pts)
        return total

    mu = expand(tvals, False)
    if t_discrete:
        if kind == "grid":
            if mu.ndim != 1:
                raise ScheduleError("batched evidence cannot combine with a grid query")
            # Shift one level down: the value below the bottom level is 0.
            mu_prev = np.concatenate([[0.0], mu[:-1]])
        else:
            mu_prev = expand(tvar.domain.prev_value(tvals), False)
        lam = mu - mu_prev
    else:
        mu_prev = None
        lam = expand(tvals, True)

    mu = _clamp(mu, fn_node.id)
    lam = _clamp(lam, fn_node.id)
    if mu_prev is not None:
        mu_prev = _clamp(mu_prev, fn_node.id)
    (mu, lam, mu_prev), k = _rescale([mu, lam, mu_prev])
    msg = MessagePair(
        variable=target, kind=kind, support=tvals, mu=mu, lam=lam,
        mu_prev=mu_prev, scale_exp=scale_exp + k, discrete=t_discrete,
    )
    return msg, 2 ** len(remainder)


def _component_sweep(graph, evidence_vals, root, comp_vars, comp_fns, term_counts):
    """One leaves-to-root sweep; returns the combined root MessagePair."""
    # Bipartite adjacency restricted to the component.
    fn_nodes = [graph.functions[f] for f in sorted(comp_fns)]
    nbr_fns = {v: [] for v in comp_vars}
    for f in fn_nodes:
        for v in f.scope:
            nbr_fns[v].append(f.id)

    order = []
    parent = {("v", root): None}
    stack = [("v", root)]
    while stack:
        node = stack.pop()
        order.append(node)
        if node[0] == "v":
            for fid in sorted(nbr_fns[node[1]], reverse=True):
                child = ("f", fid)
                if child != parent[node]:
                    parent[child] = node
                    stack.append(child)
        else:
            for v in graph.functions[node[1]].scope:
                child = ("v", v)
                if child != parent[node]:
                    parent[child] = node
                    stack.append(child)

    messages = {}   # child node -> message toward its parent
    for node in reversed(order):
        if parent[node] is None:
            continue
        if node[0] == "v":
            v = node[1]
            incoming = [messages[("f", fid)] for fid in sorted(nbr_fns[v]) if ("f", fid) in messages and parent[("f", fid)] == node]
            messages[node] = variable_to_function_message(
                graph.variables[v], incoming, observed_value=evidence_vals[v]
            )
        else:
            f = graph.functions[node[1]]
            target = parent[node][1]
            incoming = {
                v: messages[("v", v)] for v in f.scope
                if v != target and parent.get(("v", v)) == node
            }
            if target in evidence_vals:
                spec = ("point", evidence_vals[target])
            else:
                spec = ("grid", graph.variables[target].domain.support)
            msg, terms = function_to_variable_message(f, graph, target, incoming, spec)
            term_counts[f.id] = terms
            messages[node] = msg

    # Combine everything arriving at the root.
    incoming = [messages[("f", fid)] for fid in sorted(nbr_fns[root]) if ("f", fid) in messages]
    rvar = graph.variables[root]
    if root in evidence_vals:
        return variable_to_function_message(rvar, incoming, observed_value=evidence_vals[root])
    # Unobserved root: combine grid messages directly.
    support = rvar.domain.support
    if not incoming:
        one = np.ones_like(support)
        return MessagePair(root, "grid", support, one, np.zeros_like(support),
                           discrete=rvar.domain.is_discrete)
    mu = np.ones_like(support)
    scale_exp = 0
    for m in incoming:
        mu = mu * m.mu
        scale_exp += m.scale_exp
    if rvar.domain.is_discrete:
        lam = mu - np.concatenate([[0.0], mu[:-1]])
    else:
        lam = np.zeros_like(support)
        for j, m in enumerate(incoming):
            term = m.lam
            for jj, other in enumerate(incoming):
                if jj != j:
                    term = term * other.mu
            lam = lam + term
    (mu, lam, _), k = _rescale([mu, lam, None])
    return MessagePair(root, "grid", support, mu, lam, scale_exp=scale_exp + k,
                       discrete=rvar.domain.is_discrete)


def propagate(graph, evidence, root):
    """Run DSP toward the root; see conditional_cdf for the query form.

    Every non-root variable must be observed (marginalize unobserved ones
    first).  With the root observed too, root_pdf is the joint PDF at the
    evidence point; otherwise the combined root message normalizes into the
    conditional CDF of the root given the evidence.
    """
    if not graph.variables:
        raise EmptyGraph("graph has no variables")
    if root not in graph.variables:
        raise UnknownVariable(f"unknown root {root!r}")
    report = validate_structure(graph)
    if not report.is_forest:
        raise NotATree(f"graph contains a cycle: {report.cycle}")

    evidence = dict(evidence or {})
    evidence_vals = {}
    for v, val in evidence.items():
        if v not in graph.variables:
            raise UnknownVariable(f"evidence for unknown variable {v!r}")
        arr = np.atleast_1d(np.asarray(val, dtype=float))
        if not graph.variables[v].domain.contains(arr):
            raise DomainError(f"evidence for {v!r} outside its domain")
        evidence_vals[v] = arr
    for v in graph.variables:
        if v != root and v not in evidence_vals:
            raise ScheduleError(
                f"variable {v!r} is neither observed nor the root; marginalize it first"
            )

    comp_of = {}
    for ci, comp in enumerate(report.components):
        for node_id in comp:
            comp_of[node_id] = ci
    root_ci = comp_of[root]

    term_counts = {}
    results = []
    for ci, comp in enumerate(report.components):
        comp_vars = [n for n in comp if n in graph.variables]
        comp_fns = [n for n in comp if n in graph.functions]
        local_root = root if ci == root_ci else min(comp_vars)
        results.append(
            (ci, _component_sweep(graph, evidence_vals, local_root, comp_vars, comp_fns, term_counts))
        )

    root_msg = next(m for ci, m in results if ci == root_ci)
    other_pdf = np.asarray(1.0)
    other_exp = 0
    for ci, m in results:
        if ci != root_ci:
            other_pdf = other_pdf * m.lam
            other_exp += m.scale_exp

    if root in evidence_vals:
        pdf = root_msg.lam * other_pdf * graph.constant
        pdf = pdf * 2.0 ** (root_msg.scale_exp + other_exp)
        pdf = pdf if pdf.shape != (1,) else float(pdf[0])
        return InferenceResult(
            root=root, root_pdf=pdf, support=root_msg.support,
            mu=None, lam=None, conditional_cdf=None, term_counts=term_counts,
        )

    top = float(root_msg.mu[-1])
    if top <= 0.0:
        raise ZeroEvidenceDensity("evidence has zero density under the model")
    cond = np.clip(root_msg.mu / top, 0.0, 1.0)
    fold = 2.0 ** root_msg.scale_exp
    return InferenceResult(
        root=root, root_pdf=None, support=root_msg.support,
        mu=root_msg.mu * fold, lam=root_msg.lam * fold,
        conditional_cdf=cond, term_counts=term_counts,
    )


def conditional_cdf(graph, query, evidence):
    """F(query | evidence) sampled over the query grid, Eq.-10 style ratio."""
    if not evidence:
        raise ScheduleError("conditional query requires nonempty evidence")
    if query in evidence:
        raise ScheduleError("query variable must be unobserved")
    res = propagate(graph, evidence, root=query)
    return res.support, res.conditional_cdf


def marginal_cdf(graph, query):
    """Marginal CDF of one variable: marginalize the rest, then sweep."""
    from .graph import marginalize_unobserved

    others = [v for v in graph.variables if v != query]
    reduced = marginalize_unobserved(graph, others)
    res = propagate(reduced, {}, root=query)
    return res.support, res.conditional_cdf
