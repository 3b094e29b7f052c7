import math
from fractions import Fraction

import numpy as np
import pytest

from magbands.asymptotics import (PRINTED, REDERIVED, GapKind, epsilon_nonsplit, epsilon_split,
                                  gap_predictions, predicted_limits, quadratic_splitting_solver,
                                  reassembled_determinant, t_factors)
from magbands.errors import DiscriminantNonpositive, DomainError, NotSplitting, SplitThreshold
from magbands.model import LeftScaled, RightLandau, Split
from magbands.scaled import ScaledValue
from magbands.secular import Kind, SecularEquation, determinant, eigenvalues_at

THIRD = Fraction(1, 3)
HALF = Fraction(1, 2)


def measured_ratios(b, k, lambda_max=3.2, convention=PRINTED):
    """gap_measured / gap_predicted per band, in ScaledValue arithmetic."""
    preds = gap_predictions(b, lambda_max, convention)
    rs = eigenvalues_at(SecularEquation(Kind.TRAPPING, k, b), count=len(preds))
    out = []
    for p, r in zip(preds, rs):
        gap = ScaledValue.from_float(r.gap_to(p.threshold.value))
        out.append((p, float(gap / p(k))))
    return out


# ------------------------------------------------------------ T factors


def test_t1_vanishes_on_both_families():
    t1 = t_factors(THIRD, 1, 5.0)[0]
    assert t1.is_zero()
    t1 = t_factors(THIRD, THIRD, 5.0)[0]
    assert t1.is_zero()
    t1 = t_factors(HALF, 3, 5.0)[0]
    assert t1.is_zero()
    assert not t_factors(HALF, Fraction(7, 5), 5.0)[0].is_zero()


@pytest.mark.parametrize("b", [THIRD, HALF, 0.7])
def test_reassembled_determinant(b):
    for lam in (0.5, 1.4, 2.2):
        approx = reassembled_determinant(b, lam, 6.0)
        exact = determinant(b, lam, 6.0, rescaled=True)
        assert abs(float(approx / exact) - 1) <= 0.05, (b, lam)


def test_reassembled_determinant_improves_with_k():
    errs = [abs(float(reassembled_determinant(THIRD, 1.4, k) / determinant(THIRD, 1.4, k, rescaled=True)) - 1)
            for k in (3.0, 4.0, 6.0, 8.0)]
    assert all(a > b for a, b in zip(errs, errs[1:]))


# ------------------------------------------------------------ non-split gaps


def test_nonsplit_is_negative():
    for side, n, b in (("right", 1, HALF), ("left", 1, THIRD), ("left", 3, THIRD), ("right", 2, 0.7)):
        assert epsilon_nonsplit(side, n, b, 4.0).sign == -1


def test_nonsplit_right_n1_closed_form():
    import mpmath as mp
    mp.mp.dps = 30
    b, k = mp.mpf(1) / 2, mp.mpf(3)
    ref = -(1 + b) / (2 * mp.sqrt(mp.pi)) / k * mp.exp(-k * k)
    got = epsilon_nonsplit("right", 1, HALF, 3.0)
    assert float(got) == pytest.approx(float(ref), rel=1e-12)


def test_nonsplit_left_decay_rate():
    # level 5/3 at b = 1/3: gap ~ const * k^3 e^{-3 k^2}
    c = [abs(float(epsilon_nonsplit("left", 3, THIRD, k).rescale(3 * k * k))) / k ** 3
         for k in (3.0, 4.0, 6.0, 8.0)]
    assert np.allclose(c, c[0], rtol=1e-12)


def test_nonsplit_refuses_shared_level():
    with pytest.raises(SplitThreshold):
        epsilon_nonsplit("right", 1, THIRD, 5.0)
    with pytest.raises(SplitThreshold):
        epsilon_nonsplit("left", 2, THIRD, 5.0)


@pytest.mark.parametrize("b", [THIRD, HALF, Fraction(3, 5)])
def test_nonsplit_gaps_follow_secular_roots(b):
    """Measured/predicted -> 1 with an O(1/k^2) correction."""
    for k in (5.0, 6.0, 8.0):
        for p, ratio in measured_ratios(b, k):
            if p.kind in (GapKind.NONSPLIT_LEFT, GapKind.NONSPLIT_RIGHT):
                assert abs(ratio - 1) <= 4 / k ** 2, (b, k, p.threshold, ratio)


# ------------------------------------------------------------ split gaps


def test_split_ordering_and_signs():
    lo, hi = epsilon_split(1, 2, THIRD, 5.0)
    assert lo.sign == -1 and hi.sign == 1
    lo, hi = epsilon_split(1, 2, THIRD, 5.0, REDERIVED)
    assert lo.sign == -1 and hi.sign == 1


def test_split_rejects_unshared():
    with pytest.raises(NotSplitting):
        epsilon_split(1, 1, HALF, 5.0)
    with pytest.raises(NotSplitting):
        epsilon_split(1, 3, THIRD, 5.0)
    with pytest.raises(DomainError):
        epsilon_split(1, 2, THIRD, 5.0, "other")


def test_split_constant_is_k_independent():
    def prefactor(k):
        lo, hi = epsilon_split(1, 2, THIRD, k)
        return (lo.log_mag - (-math.log(k) - k * k), hi.log_mag - (5 * math.log(k) - 3 * k * k))

    assert np.allclose(prefactor(3.0), prefactor(9.0), atol=1e-12)


def test_conventions_differ_by_sqrt2():
    for k in (4.0, 7.0):
        p = epsilon_split(2, 3, Fraction(3, 5), k, PRINTED)
        r = epsilon_split(2, 3, Fraction(3, 5), k, REDERIVED)
        assert float(r[0] / p[0]) == pytest.approx(1 / math.sqrt(2), rel=1e-12)
        assert float(r[1] / p[1]) == pytest.approx(math.sqrt(2), rel=1e-12)


def test_quadratic_solver_reproduces_closed_form():
    for k in (4.0, 5.0, 6.0):
        q = quadratic_splitting_solver(1, 2, THIRD, k)
        e = epsilon_split(1, 2, THIRD, k)
        assert float(q[0] / e[0]) == pytest.approx(1, rel=1e-6)
        assert float(q[1] / e[1]) == pytest.approx(1, rel=1e-6)
        assert q[0].sign == -1 and q[1].sign == 1


def test_quadratic_solver_refuses_small_k():
    with pytest.raises(DiscriminantNonpositive):
        quadratic_splitting_solver(1, 2, THIRD, 1.0)


def test_split_constants_against_secular_roots():
    """The secular split pair sits sqrt(2) off the printed constants; the rederived ones match.

    Printed ratios drift to 1/sqrt(2) (lower) and sqrt(2) (upper) as k grows,
    while the rederived ratios converge to 1.
    """
    errs = {}
    for k in (5.0, 6.0, 8.0):
        printed = [r for p, r in measured_ratios(THIRD, k, 1.5) if p.threshold.value == 1]
        rederived = [r for p, r in measured_ratios(THIRD, k, 1.5, REDERIVED) if p.threshold.value == 1]
        assert rederived[0] == pytest.approx(printed[0] * math.sqrt(2), rel=1e-12)
        errs[k] = [abs(r - 1) for r in rederived]
        if k >= 6:
            assert abs(printed[0] - 1 / math.sqrt(2)) < 0.03
            assert abs(printed[1] / math.sqrt(2) - 1) < 0.05
    assert all(e <= 0.05 for e in errs[8.0])
    assert errs[8.0][0] < errs[6.0][0] < errs[5.0][0]
    assert errs[8.0][1] < errs[6.0][1] < errs[5.0][1]


@pytest.mark.parametrize("b,level", [(THIRD, 3), (Fraction(3, 5), 3)])
def test_higher_split_pairs_converge_rederived(b, level):
    errs = []
    for k in (5.0, 6.0, 8.0):
        r = [x for p, x in measured_ratios(b, k, 3.2, REDERIVED) if p.threshold.value == level]
        assert len(r) == 2
        errs.append(max(abs(x - 1) for x in r))
    assert errs[-1] < 0.15 and errs[-1] < errs[0]


# ------------------------------------------------------------ limits


def test_predicted_limits_examples():
    got = [(t.value, m) for t, m in predicted_limits(THIRD, 3)]
    assert got == [(THIRD, 1), (1, 2), (Fraction(5, 3), 1), (Fraction(7, 3), 1), (3, 2)]
    assert all(m == 2 for _, m in predicted_limits(1, 9))
    got = predicted_limits(HALF, 1.6)
    assert [(t.origin, m) for t, m in got] == [(LeftScaled(1), 1), (RightLandau(1), 1), (LeftScaled(2), 1)]
    assert isinstance(predicted_limits(Fraction(3, 5), 3)[3][0].origin, Split)


@pytest.mark.parametrize("b", [THIRD, HALF, Fraction(3, 5), 0.7])
def test_sign_law(b):
    """Unshared bands approach from below; a shared level has one band on each side."""
    for k in (4.0, 6.0):
        for p, ratio in measured_ratios(b, k):
            assert ratio > 0, (b, k, p.threshold)
            assert p.sign == (1 if p.kind is GapKind.SPLIT_UPPER else -1)


def test_prediction_consistency_window():
    for k in (6.0, 8.0):
        for p, ratio in measured_ratios(HALF, k):
            assert 1 / (1 + 10 / k ** 2) <= ratio <= 1 + 10 / k ** 2


def test_limit_multiset_count_at_k10():
    for b, lam in ((THIRD, 3.5), (HALF, 3.8), (Fraction(3, 5), 3.4)):
        expected = sum(m for _, m in predicted_limits(b, lam))
        got = eigenvalues_at(SecularEquation(Kind.TRAPPING, 10.0, b), lambda_max=lam)
        assert len(got) == expected, b


def test_k_floor():
    with pytest.raises(DomainError):
        epsilon_nonsplit("left", 1, THIRD, 1.5)
    with pytest.raises(DomainError):
        epsilon_split(1, 2, THIRD, 1.9)
    with pytest.raises(DomainError):
        t_factors(THIRD, 0.5, 1.0)
