"""Declarative text format for models and evidence.

Model files have two sections::

    [variables]
    x  discrete levels=0,1
    y  continuous lo=-4 hi=4 points=101

    [functions]
    phi_a  scope=x,y family=table values=0.1,0.4,0.3,1.0
    phi_b  scope=y family=gaussian mean=0 cov=1
    phi_c  scope=y,y2 family=copula theta=1.5 mx=normal:0,1 my=sigmoid:0,1

Table values are listed in level order, last scope axis fastest (row-major).
Evidence files carry one ``variable = value`` line each.  All parse failures
raise ParseError with a line and column.
"""

from __future__ import annotations

import numpy as np

from .domains import ContinuousGrid, DiscreteOrdinal
from .errors import CdnError, ParseError
from .functions.copula import (
    BivariateCopulaFunction,
    GaussianMarginal,
    SigmoidMarginal,
)
from .functions.gaussian import GaussianCdfFunction
from .functions.table import DiscreteTableFunction
from .graph import CdnGraph


def _split_line(raw):
    """Strip comments; return the meaningful text or None."""
    text = raw.split("#", 1)[0].rstrip()
    return text if text.strip() else None


def _parse_floats(text, lineno, col):
    try:
        return [float(t) for t in text.split(",") if t != ""]
    except ValueError:
        raise ParseError(f"expected a comma-separated number list, got {text!r}",
                         lineno, col) from None


def _parse_kv(tokens, lineno, line):
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ParseError(f"expected key=value, got {tok!r}", lineno,
                             line.index(tok) + 1)
        k, v = tok.split("=", 1)
        if k in out:
            raise ParseError(f"duplicate key {k!r}", lineno, line.index(tok) + 1)
        out[k] = (v, line.index(tok) + len(k) + 2)
    return out


def _marginal(spec, lineno, col):
    if ":" not in spec:
        raise ParseError(f"marginal must be name:params, got {spec!r}", lineno, col)
    name, params = spec.split(":", 1)
    vals = _parse_floats(params, lineno, col)
    if len(vals) != 2:
        raise ParseError("marginal takes exactly two parameters", lineno, col)
    if name == "normal":
        return GaussianMarginal(*vals)
    if name == "sigmoid":
        return SigmoidMarginal(*vals)
    raise ParseError(f"unknown marginal family {name!r}", lineno, col)


def _build_function(name, kv, graph, lineno, line):
    def need(key):
        if key not in kv:
            raise ParseError(f"function {name!r} missing {key!r}", lineno, 1)
        return kv[key]

    scope_text, scol = need("scope")
    scope = [s for s in scope_text.split(",") if s]
    if not scope:
        raise ParseError("empty scope", lineno, scol)
    family, fcol = need("family")

    try:
        fn = _construct_function(family, fcol, kv, scope, scol, graph, lineno, need)
    except ParseError:
        raise
    except CdnError as e:
        raise ParseError(str(e), lineno, 1) from None

    try:
        graph.add_function(scope, fn, fn_id=name)
    except CdnError as e:
        raise ParseError(str(e), lineno, 1) from None


def _construct_function(family, fcol, kv, scope, scol, graph, lineno, need):
    if family == "table":
        levels = []
        for v in scope:
            node = graph.variables.get(v)
            if node is None:
                raise ParseError(f"unknown scope variable {v!r}", lineno, scol)
            if not node.domain.is_discrete:
                raise ParseError(f"table scope variable {v!r} must be discrete",
                                 lineno, scol)
            levels.append(node.domain.levels)
        vtext, vcol = need("values")
        values = _parse_floats(vtext, lineno, vcol)
        shape = tuple(len(lv) for lv in levels)
        if len(values) != int(np.prod(shape)):
            raise ParseError(
                f"table needs {int(np.prod(shape))} values, got {len(values)}",
                lineno, vcol)
        fn = DiscreteTableFunction(levels, np.asarray(values).reshape(shape))
    elif family == "gaussian":
        mtext, mcol = need("mean")
        mean = _parse_floats(mtext, lineno, mcol)
        ctext, ccol = need("cov")
        cov = _parse_floats(ctext, lineno, ccol)
        d = len(mean)
        if len(cov) != d * d:
            raise ParseError(f"cov needs {d * d} row-major entries, got {len(cov)}",
                             lineno, ccol)
        fn = GaussianCdfFunction(mean, np.asarray(cov).reshape(d, d))
    elif family == "copula":
        ttext, tcol = need("theta")
        theta = _parse_floats(ttext, lineno, tcol)[0]
        mx = _marginal(need("mx")[0], lineno, need("mx")[1])
        my = _marginal(need("my")[0], lineno, need("my")[1])
        fn = BivariateCopulaFunction(theta, mx, my)
    else:
        raise ParseError(f"unknown function family {family!r}", lineno, fcol)
    return fn


def parse_model(text):
    graph = CdnGraph()
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _split_line(raw)
        if line is None:
            continue
        stripped = line.strip()
        if stripped.startswith("["):
            if stripped not in ("[variables]", "[functions]"):
                raise ParseError(f"unknown section {stripped!r}", lineno, 1)
            section = stripped
            continue
        if section is None:
            raise ParseError("content before any section header", lineno, 1)
        tokens = stripped.split()
        name = tokens[0]
        if section == "[variables]":
            if len(tokens) < 2:
                raise ParseError("variable line needs a kind", lineno, len(line) + 1)
            kind = tokens[1]
            kv = _parse_kv(tokens[2:], lineno, line)
            try:
                if kind == "discrete":
                    if "levels" not in kv:
                        raise ParseError(f"variable {name!r} missing levels", lineno, 1)
                    levels = _parse_floats(kv["levels"][0], lineno, kv["levels"][1])
                    domain = DiscreteOrdinal(tuple(levels))
                elif kind == "continuous":
                    for key in ("lo", "hi"):
                        if key not in kv:
                            raise ParseError(f"variable {name!r} missing {key!r}", lineno, 1)
                    lo = _parse_floats(kv["lo"][0], lineno, kv["lo"][1])[0]
                    hi = _parse_floats(kv["hi"][0], lineno, kv["hi"][1])[0]
                    points = int(_parse_floats(kv["points"][0], lineno, kv["points"][1])[0]) \
                        if "points" in kv else 101
                    domain = ContinuousGrid(lo, hi, points)
                else:
                    raise ParseError(f"unknown variable kind {kind!r}", lineno,
                                     line.index(kind) + 1)
                graph.add_variable(name, domain)
            except ParseError:
                raise
            except CdnError as e:
                raise ParseError(str(e), lineno, 1) from None
        else:
            kv = _parse_kv(tokens[1:], lineno, line)
            _build_function(name, kv, graph, lineno, line)
    return graph


def parse_evidence(text, graph=None):
    """`variable = value` lines; validated against the graph when given."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _split_line(raw)
        if line is None:
            continue
        if "=" not in line:
            raise ParseError("expected 'variable = value'", lineno, 1)
        name, _, vtext = line.partition("=")
        name = name.strip()
        vtext = vtext.strip()
        if not name:
            raise ParseError("missing variable name", lineno, 1)
        if name in out:
            raise ParseError(f"duplicate evidence for {name!r}", lineno, 1)
        try:
            value = float(vtext)
        except ValueError:
            raise ParseError(f"expected a number, got {vtext!r}", lineno,
                             line.index("=") + 2) from None
        if graph is not None:
            if name not in graph.variables:
                raise ParseError(f"unknown variable {name!r}", lineno, 1)
            if not graph.variables[name].domain.contains(value):
                raise ParseError(f"value {value} outside the domain of {name!r}",
                                 lineno, line.index("=") + 2)
        out[name] = value
    return out


def load_model(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model(fh.read())


def load_evidence(path, graph=None):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_evidence(fh.read(), graph)
