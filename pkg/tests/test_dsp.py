import numpy as np
import pytest

from cdnet import (
    CdnGraph,
    ContinuousGrid,
    DiscreteOrdinal,
    conditional_cdf,
    marginal_cdf,
    propagate,
)
from cdnet.errors import (
    DegreeTooLarge,
    DomainError,
    EmptyGraph,
    NotATree,
    ScheduleError,
    UnknownVariable,
    ZeroEvidenceDensity,
)
from cdnet.functions import DiscreteTableFunction
from cdnet.functions.base import CumulativeFunction
from cdnet.oracle import (
    brute_force_cdf,
    brute_force_pdf_discrete,
    numeric_mixed_partial,
    random_tree_cdn,
)

from .conftest import TABLE_2X3, make_continuous_chain, make_discrete_graph


def all_assignments(graph):
    names = list(graph.variables)
    grids = [graph.variables[v].domain.support for v in names]
    mesh = np.meshgrid(*grids, indexing="ij")
    return {v: m.reshape(-1) for v, m in zip(names, mesh)}


class TestErrors:
    def test_empty_graph(self):
        with pytest.raises(EmptyGraph):
            propagate(CdnGraph(), {}, root="a")

    def test_unknown_root_and_evidence(self):
        g = make_discrete_graph()
        with pytest.raises(UnknownVariable):
            propagate(g, {"a": 0, "b": 0}, root="zz")
        with pytest.raises(UnknownVariable):
            propagate(g, {"zz": 0}, root="a")

    def test_not_a_tree(self):
        g = make_discrete_graph()
        g.add_function(["a", "b"], DiscreteTableFunction([(0, 1), (0, 1, 2)], TABLE_2X3))
        with pytest.raises(NotATree):
            propagate(g, {"b": 0}, root="a")

    def test_evidence_outside_domain(self):
        g = make_discrete_graph()
        with pytest.raises(DomainError):
            propagate(g, {"b": 7.0}, root="a")

    def test_unobserved_non_root(self):
        g = make_discrete_graph()
        with pytest.raises(ScheduleError):
            propagate(g, {}, root="a")  # b neither observed nor the root

    def test_zero_evidence_density(self):
        g = CdnGraph()
        g.add_variable("a", DiscreteOrdinal((0, 1)))
        g.add_variable("b", DiscreteOrdinal((0, 1)))
        # F(a, b=0) = 0 identically: conditioning on b=0 is ill-posed.
        g.add_function(
            ["a", "b"],
            DiscreteTableFunction([(0, 1), (0, 1)], np.array([[0.0, 1.0], [0.0, 1.0]])),
        )
        with pytest.raises(ZeroEvidenceDensity):
            conditional_cdf(g, "a", {"b": 0.0})

    def test_conditional_query_guards(self):
        g = make_discrete_graph()
        with pytest.raises(ScheduleError):
            conditional_cdf(g, "a", {})
        with pytest.raises(ScheduleError):
            conditional_cdf(g, "a", {"a": 0.0, "b": 0.0})

    def test_degree_too_large(self):
        class _Flat(CumulativeFunction):
            def __init__(self, arity):
                self.axis_levels = (None,) * arity

            def evaluate(self, z):
                return np.ones(np.asarray(z).shape[:-1])

        g = CdnGraph()
        names = [f"v{i}" for i in range(22)]
        for v in names:
            g.add_variable(v, ContinuousGrid(-1.0, 1.0, 3))
        g.add_function(names, _Flat(22))
        evidence = {v: 0.0 for v in names[1:]}
        with pytest.raises(DegreeTooLarge):
            propagate(g, evidence, root=names[0])


class TestDiscreteExactness:
    def test_joint_pdf_matches_inclusion_exclusion(self, discrete_graph):
        a = all_assignments(discrete_graph)
        res = propagate(discrete_graph, a, root="a")
        want = brute_force_pdf_discrete(discrete_graph, a)
        np.testing.assert_allclose(np.asarray(res.root_pdf), want, atol=1e-14)
        # PDF values over all assignments sum to the top-corner CDF value (1).
        assert float(np.sum(res.root_pdf)) == pytest.approx(1.0)

    def test_batched_equals_loop(self, discrete_graph):
        a = all_assignments(discrete_graph)
        batched = np.asarray(propagate(discrete_graph, a, root="b").root_pdf)
        for i in range(len(a["a"])):
            single = propagate(
                discrete_graph, {"a": a["a"][i], "b": a["b"][i]}, root="b"
            ).root_pdf
            assert batched[i] == pytest.approx(single, abs=1e-15)

    def test_conditional_matches_difference_ratio(self, discrete_graph):
        support, cond = conditional_cdf(discrete_graph, "a", {"b": 1.0})
        # Oracle: F(a <= v | b=1) = d_b F(v, 1) / d_b F(a_top, 1).
        def diff_b(av):
            return float(
                brute_force_cdf(discrete_graph, {"a": av, "b": 1.0})
                - brute_force_cdf(discrete_graph, {"a": av, "b": 0.0})
            )

        denom = diff_b(1.0)
        np.testing.assert_allclose(cond, [diff_b(0.0) / denom, 1.0], atol=1e-14)
        np.testing.assert_array_equal(support, [0.0, 1.0])

    def test_marginal_cdf(self, discrete_graph):
        support, cdf = marginal_cdf(discrete_graph, "a")
        want = [
            float(brute_force_cdf(discrete_graph, {"a": v, "b": 2.0}))
            for v in (0.0, 1.0)
        ]
        np.testing.assert_allclose(cdf, want, atol=1e-14)

    def test_root_invariance_random_graphs(self):
        for seed in range(10):
            rng = np.random.default_rng(seed)
            g = random_tree_cdn(rng, max_vars=6)
            a = all_assignments(g)
            names = list(g.variables)
            ref = np.asarray(propagate(g, a, root=names[0]).root_pdf)
            scale = max(float(np.max(np.abs(ref))), 1e-300)
            for root in names[1:]:
                got = np.asarray(propagate(g, a, root=root).root_pdf)
                assert float(np.max(np.abs(got - ref))) / scale <= 1e-12

    def test_term_counts_recorded(self, discrete_graph):
        res = propagate(discrete_graph, {"a": 1.0, "b": 1.0}, root="a")
        assert res.term_counts == {"f0": 2}


class TestContinuous:
    def test_joint_pdf_matches_central_differences(self, continuous_chain):
        rng = np.random.default_rng(1)
        pts = rng.normal(0.0, 0.15, size=(20, 3))
        a = {"x": pts[:, 0], "y": pts[:, 1], "z": pts[:, 2]}
        res = propagate(continuous_chain, a, root="y")
        want = numeric_mixed_partial(continuous_chain, ["x", "y", "z"], a, step=1e-3)
        np.testing.assert_allclose(np.asarray(res.root_pdf), want, rtol=1e-4)

    def test_conditional_matches_numeric_ratio(self, continuous_chain):
        ev = {"x": 0.15, "z": -0.1}
        support, cond = conditional_cdf(continuous_chain, "y", ev)
        raw = np.asarray(
            numeric_mixed_partial(
                continuous_chain,
                ["x", "z"],
                {"x": ev["x"], "y": support, "z": ev["z"]},
                step=1e-3,
            )
        )
        np.testing.assert_allclose(cond, raw / raw[-1], atol=1e-6)
        assert cond[-1] == pytest.approx(1.0, abs=1e-12)

    def test_marginal_cdf_is_product_of_pinned_factors(self, continuous_chain):
        support, cdf = marginal_cdf(continuous_chain, "y")
        want = np.asarray(
            brute_force_cdf(
                continuous_chain,
                {"x": np.inf, "y": support, "z": np.inf},
            )
        )
        np.testing.assert_allclose(cdf, want / want[-1], atol=1e-12)


class TestDisconnectedAndScaling:
    def test_cross_component_constants_cancel(self):
        g = make_discrete_graph()
        g.add_variable("c", DiscreteOrdinal((0, 1)))
        g.add_function(["c"], DiscreteTableFunction([(0, 1)], np.array([0.3, 1.0])))
        support, cond = conditional_cdf(g, "a", {"b": 1.0, "c": 0.0})
        # The c component contributes a constant factor that must cancel:
        # the answer equals the single-component conditional.
        g1 = make_discrete_graph()
        _, want = conditional_cdf(g1, "a", {"b": 1.0})
        np.testing.assert_allclose(cond, want, atol=1e-14)

    def test_long_chain_rescaling(self):
        # 200 hops with per-hop factor values ~0.02 at the evidence point:
        # the unscaled product is ~1e-340 and would underflow without the
        # power-of-two rescaling.
        n = 200
        g = CdnGraph()
        table = np.array([[0.02, 0.1], [0.1, 1.0]])
        for i in range(n + 1):
            g.add_variable(f"x{i}", DiscreteOrdinal((0, 1)))
        for i in range(n):
            g.add_function(
                [f"x{i}", f"x{i+1}"],
                DiscreteTableFunction([(0, 1), (0, 1)], table),
            )
        evidence = {f"x{i}": 0.0 for i in range(1, n + 1)}
        support, cond = conditional_cdf(g, "x0", evidence)
        assert np.all(np.isfinite(cond))
        assert cond[-1] == pytest.approx(1.0, abs=1e-12)
        assert 0.0 < cond[0] < 1.0
