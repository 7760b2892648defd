"""Shared fixtures: small hand-checkable graphs and model texts."""

from __future__ import annotations

import numpy as np
import pytest

from cdnet import CdnGraph, ContinuousGrid, DiscreteOrdinal
from cdnet.functions import DiscreteTableFunction, GaussianCdfFunction

# 2x3 monotone table with top corner 1; every mixed backward difference is
# nonnegative (checked by hand and by the constructor).
TABLE_2X3 = np.array([[0.1, 0.2, 0.4], [0.3, 0.5, 1.0]])

MODEL_DISCRETE = """\
# two ordinal variables joined by one table factor
[variables]
a  discrete levels=0,1
b  discrete levels=0,1,2

[functions]
f1  scope=a,b family=table values=0.1,0.2,0.4,0.3,0.5,1.0
"""

MODEL_CONTINUOUS = """\
[variables]
x  continuous lo=-4 hi=4 points=41
y  continuous lo=-4 hi=4 points=41

[functions]
phi  scope=x,y family=gaussian mean=0,0 cov=1,0.3,0.3,1
"""


def make_discrete_graph():
    g = CdnGraph()
    g.add_variable("a", DiscreteOrdinal((0, 1)))
    g.add_variable("b", DiscreteOrdinal((0, 1, 2)))
    g.add_function(["a", "b"], DiscreteTableFunction([(0, 1), (0, 1, 2)], TABLE_2X3))
    return g


def make_continuous_chain(s2=0.04, points=41):
    g = CdnGraph()
    for v in ("x", "y", "z"):
        g.add_variable(v, ContinuousGrid(-2.0, 2.0, points))
    g.add_function(
        ["x", "y"],
        GaussianCdfFunction([0.0, 0.0], [[s2, 0.3 * s2], [0.3 * s2, 1.2 * s2]]),
    )
    g.add_function(
        ["y", "z"],
        GaussianCdfFunction([0.0, 0.0], [[1.2 * s2, -0.25 * s2], [-0.25 * s2, 0.9 * s2]]),
    )
    return g


@pytest.fixture
def discrete_graph():
    return make_discrete_graph()


@pytest.fixture
def continuous_chain():
    return make_continuous_chain()
