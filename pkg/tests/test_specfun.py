import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from magbands.errors import OutOfRange, PoleEncountered
from magbands.scaled import ScaledValue
from magbands.specfun import (AnchoredReal, crossover, overlap_discrepancy, recip_gamma,
                              recip_gamma_deriv_at_nonpos_int, recip_gamma_scaled, weber_u,
                              weber_u_asymptotic, weber_u_pair, weber_u_prime,
                              weber_u_prime_asymptotic, weber_u_prime_recurrence, weber_v,
                              weber_v_connection)

from _oracles import (fd_second_derivative_residual, sign_changes, u_mp, u_ode_from_origin,
                      u_ode_inward, v_mp, v_origin_mp)


def f(v):
    return float(v)


# ------------------------------------------------------------ closed forms


def test_gaussian_mode():
    assert f(weber_u(-0.5, 2.0)) == pytest.approx(math.exp(-1.0), rel=1e-14)
    assert f(weber_u_prime(-0.5, 2.0)) == pytest.approx(-math.exp(-1.0), rel=1e-14)


def test_odd_hermite_vanishes_at_origin():
    assert abs(f(weber_u(-1.5, 0.0))) < 1e-15
    assert abs(f(weber_u_prime(-0.5, 0.0))) < 1e-15


def test_u_against_inward_ode_integration():
    u, du = u_ode_inward(0.5, 6.0)
    assert f(weber_u(0.5, 6.0)) == pytest.approx(u, rel=1e-10)
    assert f(weber_u_prime(0.5, 6.0)) == pytest.approx(du, rel=1e-10)


def test_u_prime_against_centered_difference():
    h = 1e-5
    fd = (f(weber_u(1.0, -4.0 + h)) - f(weber_u(1.0, -4.0 - h))) / (2 * h)
    assert f(weber_u_prime(1.0, -4.0)) == pytest.approx(fd, rel=1e-7)


def test_v_pole_combination():
    with pytest.raises(PoleEncountered):
        weber_v_connection(-0.5, 0.0)
    # V itself is entire in a; the direct evaluation returns the limit, here 0
    assert v_origin_mp(-0.5) == 0.0
    assert abs(f(weber_v(-0.5, 0.0))) < 1e-15
    assert f(weber_v(0.7, 0.0)) == pytest.approx(v_origin_mp(0.7), rel=1e-13)


def test_v_growth_law_and_sign():
    a, x = 0.5, 5.0
    lead = math.sqrt(2 / math.pi) * math.exp(x * x / 4) * x ** (a - 0.5)
    v = f(weber_v(a, x))
    assert v > 0
    assert abs(v / lead - 1) < 0.01


def test_v_connection_matches_direct():
    for a, x in [(0.3, 2.0), (-1.7, 3.5), (2.2, 1.0)]:
        assert f(weber_v_connection(a, x)) == pytest.approx(f(weber_v(a, x)), rel=1e-11)


# ------------------------------------------------------------ reciprocal Gamma


def test_recip_gamma_examples():
    assert recip_gamma(1) == 1.0
    assert recip_gamma(-3) == 0.0
    assert recip_gamma(0) == 0.0
    assert recip_gamma(0.5) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-15)


def test_recip_gamma_reflection():
    for z in (0.3, 1.7, -2.5):
        assert recip_gamma(z) * recip_gamma(1 - z) == pytest.approx(
            math.sin(math.pi * z) / math.pi, rel=1e-12)


def test_recip_gamma_large_argument():
    import mpmath as mp
    for z in (150.5, 199.25, -180.3):
        assert recip_gamma(z) == pytest.approx(float(mp.rgamma(z)), rel=1e-12)


def test_recip_gamma_derivative_at_poles():
    assert recip_gamma_deriv_at_nonpos_int(1) == 1
    assert recip_gamma_deriv_at_nonpos_int(2) == -1
    assert recip_gamma_deriv_at_nonpos_int(4) == -6
    h = 1e-6
    fd = (recip_gamma(-3 + h) - recip_gamma(-3 - h)) / (2 * h)
    assert fd == pytest.approx(-6, rel=1e-8)
    assert isinstance(recip_gamma_deriv_at_nonpos_int(20), int)


def test_recip_gamma_near_pole_keeps_offset():
    # 1/Gamma(-3 + d) ~ (-1)^3 * 3! * d for tiny d; d itself is below double spacing at -3
    d = 1e-40
    v = recip_gamma_scaled(AnchoredReal(Fraction(-3), d))
    assert v.sign == -1
    assert math.exp(v.log_mag) == pytest.approx(6 * d, rel=1e-12)


# ------------------------------------------------------------ invariants


# The centered second difference with h = 1e-3 has truncation error
# (h^2/12)|U''''| ~ 8e-8 (x^2/4 + a)^2 |U|; the lattice keeps that below the tolerance.
RESIDUAL_A = np.linspace(-1.5, 1.5, 7)
RESIDUAL_X = np.arange(-2.0, 2.01, 0.25)


def test_ode_residual_lattice():
    def u(a, x):
        return f(weber_u(a, x))

    for a in RESIDUAL_A:
        for x in RESIDUAL_X:
            res = fd_second_derivative_residual(u, a, x)
            scale = max(abs(u(a, x)), math.exp(-x * x / 4))
            assert res <= 1e-6 * scale, (a, x, res / scale)


def test_recurrence_consistency():
    for a in np.linspace(-10, 10, 21):
        for x in np.linspace(-8, 8, 17):
            d = weber_u_prime(a, x)
            r = weber_u_prime_recurrence(a, x)
            scale = max(abs(f(d)), abs(f(weber_u(a, x))) * max(1.0, abs(x)))
            assert abs(f(d - r)) <= 1e-12 * scale, (a, x)


def test_branch_agreement_in_overlap():
    for a in np.linspace(-10, 10, 41):
        xc = crossover(a)
        for x in np.linspace(xc - 1, xc + 1, 5):
            assert overlap_discrepancy(a, x) <= 1e-9, (a, x)


@pytest.mark.parametrize("n", range(1, 7))
def test_hermite_zero_count(n):
    a = -(2 * n - 1) / 2
    xs = np.linspace(-10, 10, 2001)
    vals = [f(weber_u(a, x)) for x in xs]
    assert sign_changes(vals) == n - 1


def test_out_of_range():
    with pytest.raises(OutOfRange):
        weber_u(0.0, 2e4)
    with pytest.raises(OutOfRange):
        weber_u(-2e4, 1.0)
    with pytest.raises(OutOfRange):
        weber_u(float("nan"), 1.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(-30, 15), st.floats(-20, 20))
def test_u_against_mpmath(a, x):
    u, du = weber_u_pair(a, x)
    ru, rdu = u_mp(a, x)
    scale = max(abs(ru), abs(rdu))
    assert abs(f(u) - ru) <= 1e-11 * scale
    assert abs(f(du) - rdu) <= 1e-11 * scale


@settings(max_examples=40, deadline=None)
@given(st.floats(-20, 10), st.floats(-15, 15))
def test_v_against_mpmath(a, x):
    ref = v_mp(a, x)
    v = f(weber_v(a, x))
    h = 1e-6
    scale = max(abs(ref), abs(v_mp(a, x + h) - v_mp(a, x - h)) / (2 * h))
    assert abs(v - ref) <= 1e-11 * scale


def test_scaled_output_beyond_double_range():
    # U(0, -60) ~ e^{900}: only representable in scaled form
    u = weber_u(0.0, -60.0)
    assert u.sign == 1 and u.log_mag > 709
    lead = 0.25 * 3600 - 0.5 * math.log(60.0) + 0.5 * math.log(2 * math.pi) - math.lgamma(0.5)
    assert u.log_mag == pytest.approx(lead, abs=1e-3)


def test_literal_negative_argument_expansions():
    for a, y in [(0.3, 14.0), (-2.7, 16.0), (1.0, 12.0)]:
        assert f(weber_u_asymptotic(a, -y)) == pytest.approx(f(weber_u(a, -y)), rel=1e-9)
        assert f(weber_u_prime_asymptotic(a, -y)) == pytest.approx(f(weber_u_prime(a, -y)), rel=1e-9)


# ------------------------------------------------------------ convention check


def _falling_sum(c0, x, terms):
    """Positive-x U-sum with (c)_j read as the falling factorial c (c-1) ... (c-j+1)."""
    z = 2.0 * x * x
    s, t = 1.0, 1.0
    for j in range(1, terms):
        c = c0 - (2 * j - 2)
        t = -t * c * (c - 1.0) / (j * z)
        s += t
    return s


def test_pochhammer_convention():
    """The large-x U expansion needs the rising factorial; the falling one fails.

    Reference: Taylor integration of the Weber ODE from the exact origin data,
    which involves no expansion at all.
    """
    for a, x in [(0.5, 8.0), (-2.3, 7.0), (1.7, 9.0)]:
        ref, _ = u_ode_from_origin(a, x)
        rising = f(weber_u_asymptotic(a, x))
        lead = math.exp(-x * x / 4) * x ** (-a - 0.5)
        falling = lead * _falling_sum(a + 0.5, x, 12)
        assert rising == pytest.approx(ref, rel=1e-9)
        assert abs(falling / ref - 1) > 1e-3


def test_scaled_value_arithmetic():
    xs = [ScaledValue.from_float(v) for v in (3.5, -2.25e-200, 7e150, -1.0)]
    big = ScaledValue(1, 2000.0)
    p1 = (xs[0] * xs[1]) * (xs[2] * big)
    p2 = xs[0] * (xs[1] * (xs[2] * big))
    assert p1.sign == p2.sign and p1.log_mag == pytest.approx(p2.log_mag, rel=1e-14)
    s1 = (xs[0] + xs[3]) + ScaledValue.from_float(0.5)
    s2 = xs[0] + (xs[3] + ScaledValue.from_float(0.5))
    assert f(s1) == pytest.approx(f(s2), rel=1e-14)
    assert (xs[0] - xs[0]).is_zero()
    assert f(big / big) == pytest.approx(1.0, rel=1e-14)
    assert ScaledValue.zero().sign == 0
    with pytest.raises(ValueError):
        ScaledValue(2, 0.0)
