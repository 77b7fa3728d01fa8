import numpy as np
import pytest

from wceop.exceptions import UnsupportedExponentError
from wceop.oracle import realize, two_norm
from wceop.scenario import generate_instance
from wceop.structure import (
    cesaro_bounded_analysis,
    chain_report,
    decomposition_theorem_check,
    gelfand_estimate,
    i_minus_t_analysis,
    lemma_norm_check,
    null_square_by_support,
    power_bounded_analysis,
    power_norms,
    quasi_complement_check,
    strict_power_criterion,
    verify_ascent_theorem,
    verify_corollary_sums,
    verify_descent_theorem,
)

from .conftest import make_op


@pytest.fixture
def zero3():
    return make_op([1, 2, 3], [[0, 1, 2]], [0, 0, 0], [1, 1, 1])


@pytest.fixture
def expanding(projection):
    return projection.replace(w=1.5 * projection.w)


class TestChains:
    def test_examples(self, projection, nilpotent, zero3):
        ch = chain_report(projection)
        assert ch.null_dims == (0, 1, 1, 1, 1, 1, 1) and ch.ascent == 1
        ch = chain_report(nilpotent)
        assert ch.null_dims == (0, 1, 2, 2, 2, 2, 2) and ch.ascent == 2
        assert ch.range_dims == (2, 1, 0, 0, 0, 0, 0) and ch.descent == 2
        ch = chain_report(zero3, k_max=4)
        assert ch.null_dims == (0, 3, 3, 3, 3) and ch.ascent == 1
        assert ch.as_dict()["tol"] == 1e-8

    def test_k_max_minimum(self, projection):
        with pytest.raises(ValueError):
            chain_report(projection, k_max=2)

    def test_chain_invariants_on_random_instances(self):
        for i in range(30):
            ch = chain_report(generate_instance(3, i))
            assert list(ch.null_dims) == sorted(ch.null_dims)
            assert list(ch.range_dims) == sorted(ch.range_dims, reverse=True)
            k = ch.ascent
            assert all(d == ch.null_dims[k] for d in ch.null_dims[k:])


class TestAscentDescent:
    def test_ascent_examples(self, projection, nilpotent):
        assert verify_ascent_theorem(nilpotent)
        assert verify_ascent_theorem(projection)

    def test_null_square_by_support(self, nilpotent, running):
        assert null_square_by_support(nilpotent) == (2, True)
        # E(uw) has no zeros, so N(T^2) = N(T)
        dim, members = null_square_by_support(running)
        assert dim == chain_report(running).null_dims[1] and members

    def test_descent_examples(self, projection, nilpotent):
        assert verify_descent_theorem(projection) is True
        assert verify_descent_theorem(nilpotent) is None
        assert verify_descent_theorem(projection, C=1.5) is None

    def test_corollary_examples(self, projection, nilpotent, zero3):
        assert verify_corollary_sums(zero3) == (True, None)
        assert verify_corollary_sums(projection) == (True, True)
        assert verify_corollary_sums(nilpotent) == (True, None)

    def test_complements(self, projection, nilpotent, zero3):
        for T in (projection, nilpotent, zero3):
            assert quasi_complement_check(T)
            assert decomposition_theorem_check(T)

    def test_random_instances(self):
        for regime in ("free", "nilpotent", "expanding"):
            for i in range(15):
                T = generate_instance(5, i, regime)
                assert verify_ascent_theorem(T)
                assert verify_descent_theorem(T) in (True, None)
                trivial, full = verify_corollary_sums(T)
                assert trivial and full in (True, None)
                assert quasi_complement_check(T) and decomposition_theorem_check(T)


class TestPowerBoundedness:
    def test_nilpotent_and_zero(self, nilpotent, zero3):
        for T in (nilpotent, zero3):
            pb = power_bounded_analysis(T, 32)
            assert pb.power_bounded_paper and pb.power_bounded_empirical
            assert pb.discrepancies == ()

    def test_expanding_example(self, expanding):
        pb = power_bounded_analysis(expanding, 64)
        assert not pb.power_bounded_paper and not pb.power_bounded_empirical
        assert pb.max_tail_ratio == pytest.approx(1.5, rel=1e-12)
        # ||T^n|| = 1.5^n ||P|| with P an orthogonal projection
        np.testing.assert_allclose(power_norms(expanding, 5), 1.5 ** np.arange(1, 6), rtol=1e-12)
        assert pb.sup_norm_estimate == pytest.approx(1.5 ** 64, rel=1e-12)

    def test_unimodular_emits_discrepancy(self, projection):
        pb = power_bounded_analysis(projection)
        assert not pb.power_bounded_paper
        assert pb.power_bounded_empirical and pb.euw_powers_bounded
        assert [d.check for d in pb.discrepancies] == ["power_bounded_analysis"]
        d = pb.discrepancies[0].as_dict()
        assert d["formula"] is False and d["empirical"] is True

    def test_strict_criterion_ignores_dead_atoms(self):
        # |E(uw)| = 2 on block {1}, but u vanishes there so the bound functional does too
        T = make_op([1, 1], [[0], [1]], [0.5, 0], [1, 4])
        assert T.euw[1] == 0 and strict_power_criterion(T)

    def test_rounded_unit_modulus_is_not_strict(self):
        T = make_op([1], [[0]], [1], [1 - 2.0 ** -52])
        assert T.spectral_radius() < 1 and not strict_power_criterion(T)
        assert power_bounded_analysis(T).discrepancies

    def test_horizon_minimum(self, projection):
        with pytest.raises(ValueError):
            power_bounded_analysis(projection, 8)


class TestCesaroBoundedness:
    def test_examples(self, projection, zero3, expanding):
        cb = cesaro_bounded_analysis(zero3)
        assert cb.cesaro_bounded and cb.cesaro_bounded_empirical
        assert cb.cesaro_sup == pytest.approx(1.0)
        cb = cesaro_bounded_analysis(projection)
        assert cb.cesaro_bounded and cb.cesaro_bounded_empirical
        assert cb.cesaro_sup == pytest.approx(1.0, rel=1e-12)
        cb = cesaro_bounded_analysis(expanding)
        assert not cb.cesaro_bounded and not cb.cesaro_bounded_empirical
        assert cb.discrepancies == ()

    def test_conditions_agree_for_nonnegative_weights(self):
        for regime in ("free", "contractive", "unimodular", "expanding"):
            for i in range(10):
                T = generate_instance(2, i, regime, shape="nonnegative")
                d = cesaro_bounded_analysis(T).as_dict()["conditions"]
                assert d["a_T"] == d["b_aluthge"] == d["c_vn"]

    def test_positive_case_norm_formula(self):
        T = generate_instance(4, 0, "contractive", shape="positive")
        M = realize(T)
        ew2 = T.E(np.abs(T.w) ** 2)
        for n in (1, 2, 7, 20):
            from wceop.structure import cesaro_matrix
            lhs = two_norm(cesaro_matrix(T, n, M), T.space.masses)
            rhs = (1 + np.max(np.abs(T.cesaro_weights(n).v_n * ew2))) / n
            assert lhs == pytest.approx(rhs, rel=1e-10)


class TestIMinusT:
    def test_zero_operator(self, zero3):
        rep = i_minus_t_analysis(zero3)
        assert rep.ascent_i_minus_t == 0 and rep.direct_sum

    def test_nilpotent(self, nilpotent):
        rep = i_minus_t_analysis(nilpotent)
        assert rep.ascent_i_minus_t <= 1 and rep.ascent_i_minus_t_adjoint <= 1 and rep.direct_sum

    def test_half_example(self, half):
        rep = i_minus_t_analysis(half)
        assert rep.neumann_matches_oracle and rep.b_n_error_matches_law
        assert rep.b_n_identity_error < 1e-12
        errs = rep.b_n_errors
        # first-order convergence: ten times more terms, ten times smaller error
        assert errs[1000] == pytest.approx(errs[100] / 10, rel=0.05)
        assert errs[10000] < errs[1000]

    def test_unimodular_ascent_of_identity_minus_t(self, projection):
        rep = i_minus_t_analysis(projection)
        assert rep.ascent_i_minus_t == 1 and rep.direct_sum
        assert rep.b_n_identity_error is None

    def test_as_dict_keys(self, half):
        d = i_minus_t_analysis(half).as_dict()
        assert set(d["b_n_errors"]) == {"100", "1000", "10000"}


class TestNormLemma:
    def test_examples(self, zero3, running):
        assert lemma_norm_check(zero3, 5.0)
        assert lemma_norm_check(running, 0.0)
        assert lemma_norm_check(running, 2.5)

    def test_positive_variant(self):
        T = generate_instance(9, 1, "free", shape="positive")
        assert lemma_norm_check(T, 0.5)

    def test_preconditions(self, running):
        with pytest.raises(UnsupportedExponentError):
            lemma_norm_check(running.replace(p=3), 1.0)
        with pytest.raises(ValueError):
            lemma_norm_check(running, -1.0)


def test_gelfand_estimate(projection, expanding, nilpotent):
    assert gelfand_estimate(projection) == pytest.approx(1.0, rel=1e-12)
    assert gelfand_estimate(expanding) == pytest.approx(1.5, rel=1e-12)
    assert gelfand_estimate(nilpotent) == 0.0
