import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wceop.exceptions import DimensionError, UnsupportedExponentError
from wceop.measure import (
    FiniteMeasureSpace,
    SigmaSubalgebra,
    conjugate_exponent,
    indicator,
    is_A_measurable,
    is_measurable,
    lp_norm,
    smallest_A_set_containing,
    smallest_measurable_superset,
    support,
)

from .conftest import functions, spaces


def unit(n):
    return FiniteMeasureSpace(np.ones(n))


class TestSpaces:
    def test_masses_must_be_positive(self):
        for bad in ([1.0, 0.0], [1.0, -2.0], [np.nan], [np.inf], []):
            with pytest.raises(ValueError):
                FiniteMeasureSpace(np.array(bad))

    def test_masses_are_read_only(self):
        space = unit(3)
        with pytest.raises(ValueError):
            space.masses[0] = 5.0

    def test_check_rejects_wrong_length(self):
        with pytest.raises(DimensionError):
            unit(3).check(np.ones(2))

    def test_partition_validation(self):
        with pytest.raises(ValueError, match="appears in blocks"):
            SigmaSubalgebra(((0, 1), (1, 2)), 3)
        with pytest.raises(ValueError, match="not covered"):
            SigmaSubalgebra(((0,),), 2)
        with pytest.raises(ValueError, match="outside"):
            SigmaSubalgebra(((0, 5),), 2)
        with pytest.raises(ValueError, match="empty"):
            SigmaSubalgebra(((0, 1), ()), 2)

    def test_constructors(self):
        assert SigmaSubalgebra.discrete(3).num_blocks == 3
        assert SigmaSubalgebra.trivial(3).blocks == ((0, 1, 2),)
        A = SigmaSubalgebra.from_labels([2, 2, 0, 2])
        assert A.blocks == ((0, 1, 3), (2,))
        np.testing.assert_array_equal(A.labels, [0, 0, 1, 0])

    def test_block_masses(self):
        space = FiniteMeasureSpace(np.array([1.0, 1.0, 2.0, 1.0]))
        A = SigmaSubalgebra(((0, 1), (2, 3)), 4)
        np.testing.assert_allclose(A.block_masses(space), [2.0, 3.0])


class TestNorms:
    def test_examples(self):
        assert lp_norm(np.zeros(2), unit(2), 2) == 0.0
        assert lp_norm(np.ones(2), unit(2), 2) == pytest.approx(math.sqrt(2), rel=1e-15)
        assert lp_norm(np.array([3, -4j]), unit(2), math.inf) == 4.0

    def test_weighted(self):
        space = FiniteMeasureSpace(np.array([2.0, 0.5]))
        # (2 * 1 + 0.5 * 16) ** 0.5 = sqrt(10)
        assert lp_norm(np.array([1.0, 4.0]), space, 2) == pytest.approx(math.sqrt(10))
        assert lp_norm(np.array([1.0, 4.0]), space, 1) == pytest.approx(4.0)

    def test_large_p_does_not_overflow(self):
        f = np.array([1e200, 1e200])
        assert lp_norm(f, unit(2), 4) == pytest.approx(1e200 * 2 ** 0.25)

    def test_bad_exponent(self):
        with pytest.raises(UnsupportedExponentError):
            lp_norm(np.ones(2), unit(2), 0.5)

    def test_conjugate_exponent(self):
        assert conjugate_exponent(2) == 2
        assert conjugate_exponent(1) == math.inf
        assert conjugate_exponent(math.inf) == 1
        assert conjugate_exponent(3) == pytest.approx(1.5)
        with pytest.raises(UnsupportedExponentError):
            conjugate_exponent(0.9)

    @given(spaces(), st.sampled_from([1.0, 1.5, 2.0, 3.0, math.inf]), st.data())
    def test_homogeneous_and_triangle(self, sa, p, data):
        space, _ = sa
        f = data.draw(functions(space.n))
        g = data.draw(functions(space.n))
        c = complex(data.draw(st.floats(-3, 3)), data.draw(st.floats(-3, 3)))
        nf, ng = lp_norm(f, space, p), lp_norm(g, space, p)
        assert lp_norm(c * f, space, p) == pytest.approx(abs(c) * nf, rel=1e-12, abs=1e-300)
        assert lp_norm(f + g, space, p) <= (nf + ng) * (1 + 1e-12)


class TestSupports:
    def test_examples(self):
        assert support(np.zeros(3), 0.0) == frozenset()
        assert support(np.array([1, 0, 2]), 0.0) == {0, 2}
        assert support(np.array([1e-14, 1.0])) == {1}

    def test_measurability_examples(self):
        A = SigmaSubalgebra(((0, 1), (2,)), 3)
        assert is_measurable(np.array([5, 5, 7]), A)
        assert not is_measurable(np.array([5, 6, 7]), A)
        assert is_measurable(np.array([1, 2, 3]), SigmaSubalgebra.discrete(3))
        assert is_A_measurable is is_measurable

    def test_measurability_wrong_length(self):
        with pytest.raises(DimensionError):
            is_measurable(np.ones(2), SigmaSubalgebra.trivial(3))

    def test_smallest_superset_examples(self):
        A = SigmaSubalgebra(((0, 1), (2,)), 3)
        assert smallest_measurable_superset(set(), A) == frozenset()
        assert smallest_measurable_superset({0}, A) == {0, 1}
        B = SigmaSubalgebra(((0, 1), (2, 3)), 4)
        assert smallest_measurable_superset({0, 2}, B) == {0, 1, 2, 3}
        assert smallest_A_set_containing is smallest_measurable_superset

    @given(spaces(), st.data())
    def test_support_of_product(self, sa, data):
        space, _ = sa
        f = data.draw(functions(space.n))
        g = data.draw(functions(space.n))
        assert support(f * g, 0.0) <= support(f, 0.0) & support(g, 0.0)

    @given(spaces(), st.data())
    def test_smallest_superset_is_minimal(self, sa, data):
        space, A = sa
        s = set(data.draw(st.sets(st.integers(0, space.n - 1))))
        out = smallest_measurable_superset(s, A)
        assert s <= out
        assert is_measurable(indicator(out, space.n), A)
        # every block kept meets s, so no smaller measurable set contains s
        for b in A.blocks:
            if set(b) <= out:
                assert s & set(b)
