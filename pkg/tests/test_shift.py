import math
from fractions import Fraction

import numpy as np
import pytest

from sphshift.multiindex import MultiIndex, enumerate_level
from sphshift.scalarseq import AlternatingTwelve, ConstantDelta, HpSpace
from sphshift.shift import SphericalShift, sphere_monomial_norm2
from sphshift.truncation import build_basis, build_shift_matrix


def szego(m=2):
    return SphericalShift(m, HpSpace(m, m))


class TestWeights:
    def test_szego_origin(self):
        assert szego().weight(1, (0, 0)) == pytest.approx(math.sqrt(0.5), abs=1e-15)

    def test_hp_weight_formula(self):
        # for the kernel-scale family the weight collapses to
        # sqrt((n_i+1)/(|n|+p)) independently of m in the denominator shift
        for m, p in [(2, 1), (2, 3), (3, 2)]:
            s = SphericalShift(m, HpSpace(m, p))
            for n in [(0,) * m, (1,) + (0,) * (m - 1), (2, 1) + (0,) * (m - 2)]:
                k = sum(n)
                for i in range(1, m + 1):
                    expect = math.sqrt((n[i - 1] + 1) / (k + p))
                    assert s.weight(i, n) == pytest.approx(expect, rel=1e-14)

    def test_constant_weight(self):
        c = Fraction(3, 4)
        s = SphericalShift(2, ConstantDelta(c))
        assert s.weight(2, (1, 1)) == pytest.approx(float(c) * math.sqrt(2 / 4), rel=1e-15)

    def test_axis_range(self):
        with pytest.raises(ValueError):
            szego().weight(3, (0, 0))


class TestBetaNorm:
    def test_szego_examples(self):
        s = szego()
        assert s.beta_norm((1, 1)) == pytest.approx(math.sqrt(1 / 6), rel=1e-14)
        assert s.beta_norm((2, 0)) == pytest.approx(math.sqrt(1 / 3), rel=1e-14)

    def test_origin_is_one(self):
        for seq in (HpSpace(2, 1), AlternatingTwelve(), ConstantDelta(2)):
            assert SphericalShift(2, seq).beta_norm((0, 0)) == pytest.approx(1.0)

    def test_weight_is_beta_ratio(self, suite_m2):
        for label, seq in suite_m2:
            s = SphericalShift(2, seq)
            for n in (n for k in range(16) for n in enumerate_level(2, k)):
                for i in (1, 2):
                    ratio = s.beta_norm(n.add_unit(i)) / s.beta_norm(n)
                    w = s.weight(i, n)
                    assert abs(w - ratio) <= 1e-12 * max(w, ratio), (label, tuple(n))

    def test_weight_is_beta_ratio_m3(self, suite_m3):
        for label, seq in suite_m3:
            s = SphericalShift(3, seq)
            for n in (n for k in range(16) for n in enumerate_level(3, k)):
                for i in (1, 2, 3):
                    ratio = s.beta_norm(n.add_unit(i)) / s.beta_norm(n)
                    assert abs(s.weight(i, n) - ratio) <= 1e-12, (label, tuple(n))


class TestSphereMonomialNorm:
    def test_values(self):
        assert sphere_monomial_norm2((1, 0)) == Fraction(1, 2)
        assert sphere_monomial_norm2((0, 0, 0)) == 1
        assert sphere_monomial_norm2((2, 1)) == Fraction(1, 12)

    def test_m_mismatch(self):
        with pytest.raises(ValueError):
            sphere_monomial_norm2((1, 0), m=3)


class TestCommutationStructure:
    def test_commutativity_relation(self, suite_m2):
        # w_j(n) w_k(n+e_j) = w_k(n) w_j(n+e_k)
        for label, seq in suite_m2:
            s = SphericalShift(2, seq)
            for n in (n for k in range(16) for n in enumerate_level(2, k)):
                lhs = s.weight(1, n) * s.weight(2, n.add_unit(1))
                rhs = s.weight(2, n) * s.weight(1, n.add_unit(2))
                assert abs(lhs - rhs) <= 1e-12 * max(lhs, rhs), label

    def test_commutativity_relation_m3(self, suite_m3):
        for label, seq in suite_m3:
            s = SphericalShift(3, seq)
            for n in (n for k in range(16) for n in enumerate_level(3, k)):
                for j, l in ((1, 2), (1, 3), (2, 3)):
                    lhs = s.weight(j, n) * s.weight(l, n.add_unit(j))
                    rhs = s.weight(l, n) * s.weight(j, n.add_unit(l))
                    assert abs(lhs - rhs) <= 1e-12 * max(lhs, rhs), label

    def test_weight_square_sum_is_delta2(self, suite_m2):
        for label, seq in suite_m2:
            s = SphericalShift(2, seq)
            for n in (n for k in range(12) for n in enumerate_level(2, k)):
                total = sum(s.weight(i, n) ** 2 for i in (1, 2))
                assert total == pytest.approx(seq.delta2(n.degree()), rel=1e-13), label

    def test_unit_row_sum_iff_constant_one(self):
        s = szego(3)
        for n in ((0, 0, 0), (2, 1, 0), (4, 4, 4)):
            total = sum(s.weight(i, n) ** 2 for i in (1, 2, 3))
            assert total == pytest.approx(1.0, abs=1e-15)
        other = SphericalShift(3, HpSpace(3, 4))
        assert sum(other.weight(i, (0, 0, 0)) ** 2 for i in (1, 2, 3)) != pytest.approx(1.0)


class TestQDiagonal:
    def test_szego_all_one(self):
        s = szego()
        assert all(s.q_diag(k, j) == pytest.approx(1.0) for k in range(5) for j in range(5))

    def test_bergman_first(self):
        s = SphericalShift(2, HpSpace(2, 3))
        assert s.q_diag(0, 1) == pytest.approx(2 / 3, rel=1e-15)
        assert s.q_diag_exact(0, 1) == Fraction(2, 3)

    def test_power_zero_is_identity(self, suite_m2):
        for label, seq in suite_m2:
            assert SphericalShift(2, seq).q_diag(7, 0) == 1.0

    def test_one_variable_shift_power_norms(self, suite_m2):
        # independent route: build the associated 1-variable shift as a
        # truncation matrix and push basis vectors through s-fold products
        for label, seq in suite_m2:
            shift1 = SphericalShift(1, seq)
            N = 12
            basis = build_basis(1, N)
            t = build_shift_matrix(shift1, 1, basis).matrix
            for k in range(4):
                for s in range(4):
                    e = np.zeros(basis.dimension)
                    e[basis.index_of((k,))] = 1.0
                    v = e
                    for _ in range(s):
                        v = t @ v
                    norm2 = float(v @ v)
                    q = SphericalShift(2, seq).q_diag(k, s)
                    assert abs(norm2 - q) <= 1e-12 * max(1.0, q), (label, k, s)


class TestBqDiagonal:
    def test_szego_vanishes(self):
        s = szego()
        assert s.bq_diag(3, 1) == 0.0

    def test_drury_arveson_two_isometry(self):
        s = SphericalShift(2, HpSpace(2, 1))
        assert all(s.bq_diag_exact(k, 2) == 0 for k in range(40))

    def test_bergman_contraction_direction(self):
        s = SphericalShift(2, HpSpace(2, 3))
        assert s.bq_diag(0, 1) == pytest.approx(1 / 3, rel=1e-15)

    def test_matches_gamma_differences(self, suite_m2):
        # B_q diagonal times gamma equals the signed q-th difference
        for label, seq in suite_m2:
            if seq.gamma_exact(0) is None:
                continue
            s = SphericalShift(2, seq)
            for q in range(1, 7):
                for k in range(101):
                    lhs = s.bq_diag_exact(k, q) * seq.gamma_exact(k)
                    rhs = (-1) ** q * seq.nabla_gamma(k, q)
                    assert lhs == rhs, (label, k, q)

    def test_rejects_q0(self):
        with pytest.raises(ValueError):
            szego().bq_diag(0, 0)


class TestCommutatorCoefficients:
    def test_self_szego_values(self):
        s = szego()
        assert s.self_comm_coeff(1, (0, 0)) == pytest.approx(0.5)
        assert s.self_comm_coeff(1, (1, 0)) == pytest.approx(2 / 3 - 1 / 2, rel=1e-14)

    def test_self_zero_branch(self, suite_m2):
        for label, seq in suite_m2:
            s = SphericalShift(2, seq)
            n = MultiIndex((0, 3))
            expect = seq.delta2(3) / (3 + 2)
            assert s.self_comm_coeff(1, n) == pytest.approx(expect, rel=1e-13), label

    def test_cross_szego_m2(self):
        coeff, target = szego().cross_comm_coeff(1, 2, (1, 0))
        assert coeff == pytest.approx(-1 / 6, rel=1e-14)
        assert tuple(target) == (0, 1)

    def test_cross_zero_branch(self, suite_m2):
        for label, seq in suite_m2:
            coeff, target = SphericalShift(2, seq).cross_comm_coeff(1, 2, (0, 5))
            assert target is None and coeff == 0.0, label

    def test_cross_szego_m3(self):
        coeff, target = szego(3).cross_comm_coeff(1, 3, (1, 1, 0))
        assert coeff == pytest.approx(-1 / 20, rel=1e-14)
        assert tuple(target) == (0, 1, 1)

    def test_cross_same_axis_rejected(self):
        with pytest.raises(ValueError):
            szego().cross_comm_coeff(1, 1, (1, 0))


def test_degenerate_arity_one_is_classical_shift():
    seq = HpSpace(1, 3)
    s = SphericalShift(1, seq)
    for k in range(10):
        assert s.weight(1, (k,)) == pytest.approx(math.sqrt(seq.delta2(k)), rel=1e-15)


def test_library_imposes_no_arity_cap():
    s = SphericalShift(9, HpSpace(9, 9))
    assert s.weight(5, (0,) * 9) == pytest.approx(1 / 3, rel=1e-15)
