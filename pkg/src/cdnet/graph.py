"""Bipartite CDN graph: variables, cumulative-function factors, structure checks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domains import VariableDomain
from .errors import (
    ArityMismatch,
    DuplicateName,
    UnknownVariable,
    UnsupportedReduction,
)


@dataclass(frozen=True)
class VariableNode:
    id: str
    name: str
    domain: VariableDomain


@dataclass(frozen=True)
class FunctionNode:
    id: str
    scope: tuple
    fn: object


@dataclass
class StructureReport:
    is_bipartite: bool
    is_connected: bool
    is_tree: bool
    is_forest: bool
    components: list
    component_is_tree: list
    cycle: list | None
    edge_count: int


class CdnGraph:
    """Joint CDF F(x) = constant * prod_c phi_c(x_c).

    The constant is 1 for freshly built graphs; marginalization folds the
    suprema of fully pinned factors into it.
    """

    def __init__(self):
        self.variables: dict[str, VariableNode] = {}
        self.functions: dict[str, FunctionNode] = {}
        self.constant: float = 1.0
        self._fn_counter = 0

    def add_variable(self, name, domain):
        if name in self.variables:
            raise DuplicateName(f"variable {name!r} already exists")
        node = VariableNode(id=name, name=name, domain=domain)
        self.variables[name] = node
        return node.id

    def add_function(self, scope, fn, fn_id=None):
        scope = tuple(scope)
        if len(scope) == 0 or len(set(scope)) != len(scope):
            raise ArityMismatch("scope must be non-empty without duplicates")
        for v in scope:
            if v not in self.variables:
                raise UnknownVariable(f"unknown variable {v!r} in scope")
        if fn.arity != len(scope):
            raise ArityMismatch(f"function arity {fn.arity} != scope size {len(scope)}")
        if fn_id is None:
            fn_id = f"f{self._fn_counter}"
            self._fn_counter += 1
        if fn_id in self.functions:
            raise DuplicateName(f"function {fn_id!r} already exists")
        self.functions[fn_id] = FunctionNode(id=fn_id, scope=scope, fn=fn)
        return fn_id

    def neighbors_of_variable(self, var_id):
        return [f for f in self.functions.values() if var_id in f.scope]

    def evaluate(self, assignment):
        """F(x) at a full assignment {variable id: value or (B,) array}."""
        vals = {v: np.asarray(assignment[v], dtype=float) for v in self.variables}
        out = None
        for f in self.functions.values():
            pts = np.stack(np.broadcast_arrays(*[vals[v] for v in f.scope]), axis=-1)
            term = f.fn.evaluate(pts)
            out = term if out is None else out * term
        if out is None:
            out = np.asarray(1.0)
        return out * self.constant


def _adjacency(graph):
    adj = {("v", v): [] for v in graph.variables}
    for f in graph.functions.values():
        adj[("f", f.id)] = []
        for v in f.scope:
            adj[("f", f.id)].append(("v", v))
            adj[("v", v)].append(("f", f.id))
    return adj


def validate_structure(graph):
    adj = _adjacency(graph)
    nodes = list(adj)
    seen = {}
    components = []
    cycle = None
    for start in nodes:
        if start in seen:
            continue
        comp = []
        parent = {start: None}
        stack = [start]
        comp_cycle = None
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen[node] = len(components)
            comp.append(node)
            for nb in adj[node]:
                if nb not in parent:
                    parent[nb] = node
                    stack.append(nb)
                elif parent.get(node) != nb and nb in seen and comp_cycle is None:
                    # Cycle witness: both tree branches from the meeting edge.
                    def path_to_root(n):
                        out = []
                        while n is not None:
                            out.append(n[1])
                            n = parent[n]
                        return out
                    comp_cycle = path_to_root(node) + path_to_root(nb)
        components.append(comp)
        if comp_cycle is not None and cycle is None:
            cycle = comp_cycle
    edge_count = sum(len(f.scope) for f in graph.functions.values())
    comp_tree = []
    for comp in components:
        ce = sum(len(graph.functions[n[1]].scope) for n in comp if n[0] == "f")
        comp_tree.append(ce == len(comp) - 1)
    is_connected = len(components) <= 1
    is_forest = edge_count == len(nodes) - len(components)
    return StructureReport(
        is_bipartite=True,
        is_connected=is_connected,
        is_tree=is_connected and is_forest and len(nodes) > 0,
        is_forest=is_forest,
        components=[[n[1] for n in comp] for comp in components],
        component_is_tree=comp_tree,
        cycle=cycle,
        edge_count=edge_count,
    )


def marginalize_unobserved(graph, var_ids):
    """Remove variables by taking each neighboring factor at their suprema."""
    var_ids = set(var_ids)
    for v in var_ids:
        if v not in graph.variables:
            raise UnknownVariable(f"unknown variable {v!r}")
    reduced = CdnGraph()
    reduced.constant = graph.constant
    for v, node in graph.variables.items():
        if v not in var_ids:
            reduced.add_variable(node.name, node.domain)
    for f in graph.functions.values():
        pinned_pos = [i for i, v in enumerate(f.scope) if v in var_ids]
        if not pinned_pos:
            reduced.add_function(f.scope, f.fn, fn_id=f.id)
        elif len(pinned_pos) == len(f.scope):
            reduced.constant *= f.fn.sup_value()
        else:
            new_scope = tuple(v for v in f.scope if v not in var_ids)
            reduced.add_function(new_scope, f.fn.pin_to_sup(pinned_pos), fn_id=f.id)
    return reduced
