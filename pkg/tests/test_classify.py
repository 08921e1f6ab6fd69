import math
from fractions import Fraction

import pytest

from sphshift.scalarseq import (
    AlternatingTwelve,
    ConstantDelta,
    HpSpace,
    PolynomialGamma,
    RhoEta,
    Tabulated,
)
from sphshift.shift import SphericalShift
from sphshift import classify
from sphshift.classify import (
    classification,
    complete_hyperexpansion_up_to,
    is_compact,
    is_essentially_normal,
    is_hyponormal,
    is_q_expansion,
    is_szego,
    q_isometry_order,
    subnormal_consistency,
)
from sphshift.spectra import outer_radius, convergence_radius, inner_radius


class TestCompactEssentiallyNormal:
    def test_hp_not_compact_essentially_normal(self):
        for m, p in ((2, 1), (2, 3), (3, 3)):
            seq = HpSpace(m, p)
            assert is_compact(seq).value is False
            assert is_essentially_normal(seq).value is True

    def test_alt_twelve_not_essentially_normal(self):
        v = is_essentially_normal(AlternatingTwelve())
        assert v.value is False
        assert v.witness == (0, Fraction(1, 12))

    def test_rho_eta(self):
        seq = RhoEta()
        assert is_compact(seq).value is False
        assert is_essentially_normal(seq).value is True

    def test_compact_sampled(self):
        seq = Tabulated([1], tail=lambda k: Fraction(1, (k + 1) ** 2))
        v = is_compact(seq, K=200_000)
        assert v.value is True
        assert v.mode == "sampled"


class TestHyponormal:
    def test_hp_iff_p_at_least_m(self):
        for m in (2, 3):
            for p in (Fraction(1), Fraction(m) - Fraction(1, 2), Fraction(m),
                      Fraction(m) + Fraction(1, 2), Fraction(2 * m)):
                v = is_hyponormal(HpSpace(m, p), 200)
                assert v.value == (p >= m), (m, p)

    def test_rho_eta_hyponormal(self):
        assert is_hyponormal(RhoEta()).value is True

    def test_alt_twelve_witness_at_zero(self):
        v = is_hyponormal(AlternatingTwelve())
        assert v.value is False and v.witness == (0,)


class TestQIsometry:
    def test_szego_is_isometry(self):
        order, mode = q_isometry_order(HpSpace(2, 2), 4, 200)
        assert order == 1 and mode == "exact"

    def test_drury_arveson_order_m(self):
        for m in (2, 3):
            order, _ = q_isometry_order(HpSpace(m, 1), m + 2, 200)
            assert order == m

    def test_hp_m3_p2_order_two(self):
        order, _ = q_isometry_order(HpSpace(3, 2), 5, 200)
        assert order == 2

    def test_non_integer_p_is_never_isometry(self):
        order, _ = q_isometry_order(HpSpace(2, Fraction(3, 2)), 6, 100)
        assert order is None

    def test_float_path_only_consistent(self):
        seq = Tabulated([1.0, 1.0, 1.0], tail="hold")
        order, mode = q_isometry_order(seq, 3, 40)
        assert order == 1 and mode == "consistent-sampled"


class TestQExpansion:
    def test_szego_every_order(self):
        for q in range(1, 6):
            assert is_q_expansion(HpSpace(3, 3), q, 100).value is True

    def test_hp_two_expansion_window(self):
        for m in (2, 3):
            for p in (Fraction(m) - Fraction(3, 2), Fraction(m) - 1,
                      Fraction(m) - Fraction(1, 2), Fraction(m),
                      Fraction(m) + Fraction(1, 2)):
                if p <= 0:
                    continue
                v = is_q_expansion(HpSpace(m, p), 2, 200)
                assert v.value == (m - 1 <= p <= m), (m, p)

    def test_drury_arveson_one_expansion(self):
        assert is_q_expansion(HpSpace(2, 1), 1, 200).value is True

    def test_matches_bq_diagonal_sign(self, suite_m2):
        # two routes to the same verdict: gamma differences vs the operator
        # defect diagonal
        for label, seq in suite_m2:
            if seq.gamma_exact(0) is None:
                continue
            s = SphericalShift(2, seq)
            for q in (1, 2, 3):
                via_gamma = is_q_expansion(seq, q, 60).value
                via_bq = all(s.bq_diag_exact(k, q) <= 0 for k in range(61))
                assert via_gamma == via_bq, (label, q)

    def test_hyperexpansion_counts(self):
        assert complete_hyperexpansion_up_to(HpSpace(2, 2), 6, 100) == 6
        assert complete_hyperexpansion_up_to(HpSpace(2, 1), 6, 100) == 6
        assert complete_hyperexpansion_up_to(HpSpace(2, 3), 6, 100) == 0


class TestSubnormalConsistency:
    def test_bergman_passes(self):
        for m in (2, 3):
            rep = subnormal_consistency(HpSpace(m, m + 1), 8, 200)
            assert rep["pass"] and rep["mode"] == "exact"

    def test_hardy_passes(self):
        for m in (2, 3):
            assert subnormal_consistency(HpSpace(m, m), 8, 200)["pass"]

    def test_drury_arveson_witness(self):
        rep = subnormal_consistency(HpSpace(2, 1), 8, 200)
        assert not rep["pass"]
        assert rep["witness"] == (2, 0)
        # the violating alternating sum is strictly negative
        assert Fraction(rep["witness_value"]) < 0

    def test_szego_all_orders(self):
        rep = subnormal_consistency(ConstantDelta(1), 10, 100)
        assert rep["pass"]

    def test_unbounded_rejected(self):
        seq = Tabulated([1], tail=lambda k: Fraction(k + 1))
        with pytest.raises(ValueError):
            subnormal_consistency(seq, 4, 50)

    def test_scale_invariance_of_criterion(self):
        # rescaling is built in: a pre-scaled copy must give the same verdict
        base = HpSpace(2, 3)
        scaled = base.scale(Fraction(7, 2))
        assert subnormal_consistency(scaled, 6, 100)["pass"]


class TestSzegoDetection:
    def test_hp_p_equals_m(self):
        assert is_szego(HpSpace(2, 2)).value is True
        assert is_szego(HpSpace(3, 3)).value is True
        assert is_szego(HpSpace(2, 3)).value is False

    def test_constant_one_same_sequence(self):
        assert is_szego(ConstantDelta(1)).value is True

    def test_exact_mode(self):
        assert is_szego(HpSpace(2, 2)).mode == "exact"


class TestIsometryForcesUnitRadii:
    def test_polynomial_gamma_radii_one(self):
        # any polynomial gamma with positive leading coefficient has
        # delta2 -> 1, so all three radii collapse to the unit sphere value
        for coeffs in ([1, 1], [1, 2, 1], [2, 0, 0, 2]):
            seq = PolynomialGamma(coeffs)
            order, _ = q_isometry_order(seq, seq.degree + 2, 100)
            assert order == seq.degree + 1
            assert outer_radius(seq, 40, 20_000).value == 1.0
            assert convergence_radius(seq, 20_000).value == 1.0
            assert inner_radius(seq, 40, 20_000).value == 1.0


class TestFullClassification:
    def test_hp_classification_bundle(self):
        c = classification(HpSpace(2, 1), P=8, Q=4, K=150)
        assert c.hyponormal.value is False
        assert c.q_isometry_order == 2
        assert c.q_expansion[1].value is True
        assert c.q_expansion[2].value is True
        assert c.complete_hyperexpansion_up_to == 4
        assert not c.subnormal["pass"]
        assert c.szego.value is False
        d = c.to_dict()
        assert d["q_isometry_order"] == 2
        assert d["hyponormal"]["value"] is False

    def test_isometry_order_implies_expansion_and_contraction(self):
        # at the isometry order the defect vanishes, so both sign conditions hold
        for seq in (HpSpace(2, 1), HpSpace(3, 2), PolynomialGamma([1, 2, 1])):
            order, _ = q_isometry_order(seq, 6, 100)
            assert order is not None
            assert is_q_expansion(seq, order, 100).value is True
            s = SphericalShift(2, seq)
            assert all(s.bq_diag_exact(k, order) == 0 for k in range(50))

    def test_rho_eta_bundle(self):
        c = classification(RhoEta(), P=4, Q=3, K=100)
        assert c.hyponormal.value is True
        assert c.essentially_normal.value is True
        assert c.compact.value is False
        assert c.bounded.verdict == "family-declared"
