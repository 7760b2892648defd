import numpy as np
import pytest

from cdnet import ContinuousGrid, DiscreteOrdinal
from cdnet.errors import DomainError


class TestDiscreteOrdinal:
    def test_levels_coerced_and_ordered(self):
        d = DiscreteOrdinal((0, 1, 2))
        assert d.levels == (0.0, 1.0, 2.0)
        assert d.is_discrete
        assert d.bottom == 0.0 and d.top == 2.0
        np.testing.assert_array_equal(d.support, [0.0, 1.0, 2.0])

    def test_rejects_empty_and_non_increasing(self):
        with pytest.raises(DomainError):
            DiscreteOrdinal(())
        with pytest.raises(DomainError):
            DiscreteOrdinal((0, 0))
        with pytest.raises(DomainError):
            DiscreteOrdinal((1, 0))

    def test_prev_value(self):
        d = DiscreteOrdinal((0, 2, 5))
        np.testing.assert_array_equal(
            d.prev_value([0.0, 2.0, 5.0]), [-np.inf, 0.0, 2.0]
        )
        assert d.prev_value(-np.inf) == -np.inf

    def test_contains(self):
        d = DiscreteOrdinal((0, 1))
        assert d.contains([0, 1])
        assert not d.contains(0.5)


class TestContinuousGrid:
    def test_support_is_uniform(self):
        g = ContinuousGrid(-1.0, 1.0, 5)
        np.testing.assert_allclose(g.support, [-1.0, -0.5, 0.0, 0.5, 1.0])
        assert not g.is_discrete
        assert g.bottom == -1.0 and g.top == 1.0

    def test_rejects_bad_bounds(self):
        with pytest.raises(DomainError):
            ContinuousGrid(1.0, 1.0)
        with pytest.raises(DomainError):
            ContinuousGrid(0.0, 1.0, 1)

    def test_contains_is_interval(self):
        g = ContinuousGrid(0.0, 1.0)
        assert g.contains([0.0, 0.3, 1.0])
        assert not g.contains(1.0001)
