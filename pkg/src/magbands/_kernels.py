"""Compiled scalar kernels for the Weber functions and the tridiagonal oracle.

Every Weber kernel returns ``(y, dy, log_scale)`` with the function value
``y * exp(log_scale)`` and derivative ``dy * exp(log_scale)``; the mantissas
are kept O(1) so nothing over- or underflows for |x| up to 1e4.
"""
import math

import numpy as np
from numba import njit

ASYM_CAP = 60
ASYM_TOL = 1e-13
_EPS = 2.220446049250313e-16


@njit(cache=True)
def log_rgamma(z):
    """(sign, log|1/Gamma(z)|); sign 0 at the poles of Gamma."""
    if z <= 0.0 and z == math.floor(z):
        return 0.0, -math.inf
    if z > 0.0:
        return 1.0, -math.lgamma(z)
    s = -1.0 if (math.floor(z) % 2.0) != 0.0 else 1.0
    return s, -math.lgamma(z)


@njit(cache=True)
def _asym_sum(c0, sgn, x):
    # sum_j sgn^j (c0)_{2j} / (j! (2x^2)^j), rising Pochhammer, truncated
    # just before the smallest term; returns (s, ds/dx, relative error estimate)
    z = 2.0 * x * x
    terms = np.zeros(ASYM_CAP + 1)
    terms[0] = 1.0
    t = 1.0
    best = 1.0
    jbest = 0
    tmax = 1.0
    for j in range(1, ASYM_CAP + 1):
        c = c0 + 2.0 * j - 2.0
        t = sgn * t * c * (c + 1.0) / (j * z)
        terms[j] = t
        at = abs(t)
        if at > tmax:
            tmax = at
        if at < best:
            best = at
            jbest = j
        if t == 0.0:
            break
        if at > 1e6 * best and j > jbest + 3:
            break
    s = 0.0
    ds = 0.0
    for j in range(jbest):
        s += terms[j]
        ds -= terms[j] * 2.0 * j / x
    err = 0.0 if terms[jbest] == 0.0 else best
    err += _EPS * tmax
    return s, ds, err / max(abs(s), 1e-300)


@njit(cache=True)
def asym_u(a, x):
    """Large-x expansion of U(a, x), x > 0."""
    logs = -0.25 * x * x - (a + 0.5) * math.log(x)
    s, ds, err = _asym_sum(a + 0.5, -1.0, x)
    dy = (-0.5 * x - (a + 0.5) / x) * s + ds
    m = max(abs(s), abs(dy))
    return s / m, dy / m, logs + math.log(m), err


@njit(cache=True)
def asym_v(a, x):
    """Large-x expansion of V(a, x), x > 0 (recessive part dropped)."""
    logs = 0.25 * x * x + (a - 0.5) * math.log(x) + 0.5 * math.log(2.0 / math.pi)
    s, ds, err = _asym_sum(0.5 - a, 1.0, x)
    dy = (0.5 * x + (a - 0.5) / x) * s + ds
    m = max(abs(s), abs(dy))
    return s / m, dy / m, logs + math.log(m), err


@njit(cache=True)
def crossover(a):
    """Smallest x_c >= max(8, 2 sqrt|a| + 6) whose asymptotic sum at x_c - 1 meets ASYM_TOL."""
    x = max(8.0, 2.0 * math.sqrt(abs(a)) + 6.0)
    for _ in range(400):
        err = asym_u(a, x - 1.0)[3]
        if err < ASYM_TOL and asym_v(a, x - 1.0)[3] < ASYM_TOL:
            return x
        x *= 1.05
    return x


@njit(cache=True)
def taylor_walk(a, x0, y, dy, logs, x1):
    """Carry (y, y') of  y'' = (x^2/4 + a) y  from x0 to x1 by local Taylor series."""
    c = np.zeros(96)
    x = x0
    while x != x1:
        q0 = 0.25 * x * x + a
        kappa = math.sqrt(abs(q0) + 0.5 * abs(x) + 0.5)
        h = min(0.5, 1.2 / kappa)
        if abs(x1 - x) <= h:
            t = x1 - x
            xn = x1
        else:
            t = h if x1 > x else -h
            xn = x + t
        q1 = 0.5 * x
        c[0] = y
        c[1] = dy
        ys = y + dy * t
        dys = dy
        tp = t
        quiet = 0
        for j in range(2, 96):
            v = q0 * c[j - 2]
            if j >= 3:
                v += q1 * c[j - 3]
            if j >= 4:
                v += 0.25 * c[j - 4]
            c[j] = v / (j * (j - 1))
            dterm = j * c[j] * tp
            tp *= t
            term = c[j] * tp
            ys += term
            dys += dterm
            if abs(term) <= 1e-18 * (abs(ys) + 1e-300) and abs(dterm) <= 1e-18 * (abs(dys) + abs(ys) / max(abs(t), 1e-3)):
                quiet += 1
                if quiet >= 3:
                    break
            else:
                quiet = 0
        m = max(abs(ys), abs(dys))
        if m == 0.0:
            return 0.0, 0.0, -math.inf
        y = ys / m
        dy = dys / m
        logs += math.log(m)
        x = xn
    return y, dy, logs


@njit(cache=True)
def u_stepped(a, x, xc):
    """U(a, x) for 0 <= x: backward Taylor walk seeded by the expansion at xc + 1."""
    x0 = xc + 1.0
    y, dy, logs, _ = asym_u(a, x0)
    return taylor_walk(a, x0, y, dy, logs, x)


@njit(cache=True)
def u_pos(a, x):
    xc = crossover(a)
    if x >= xc:
        y, dy, logs, _ = asym_u(a, x)
        return y, dy, logs
    return u_stepped(a, x, xc)


@njit(cache=True)
def v_origin(a):
    """V(a,0), V'(a,0) as (sign, log) pairs."""
    s1, l1 = log_rgamma(0.75 - 0.5 * a)
    s2, l2 = log_rgamma(0.25 + 0.5 * a)
    s3, l3 = log_rgamma(0.25 - 0.5 * a)
    s4, l4 = log_rgamma(0.75 + 0.5 * a)
    lp = math.log(math.pi)
    lv = lp + (0.5 * a + 0.25) * math.log(2.0) + 2.0 * l1 + l2
    lw = lp + (0.5 * a + 0.75) * math.log(2.0) + 2.0 * l3 + l4
    sv = s2 if s1 != 0.0 else 0.0
    sw = s4 if s3 != 0.0 else 0.0
    return sv, lv, sw, lw


@njit(cache=True)
def v_stepped(a, x):
    """V(a, x) for x >= 0 by a forward Taylor walk from the origin values."""
    sv, lv, sw, lw = v_origin(a)
    if sv == 0.0 and sw == 0.0:
        return 0.0, 0.0, -math.inf
    logs = max(lv if sv != 0.0 else -math.inf, lw if sw != 0.0 else -math.inf)
    y = sv * math.exp(lv - logs) if sv != 0.0 else 0.0
    dy = sw * math.exp(lw - logs) if sw != 0.0 else 0.0
    return taylor_walk(a, 0.0, y, dy, logs, x)


@njit(cache=True)
def v_pos(a, x):
    xc = crossover(a)
    if x >= xc:
        y, dy, logs, _ = asym_v(a, x)
        return y, dy, logs
    return v_stepped(a, x)


# ---------------------------------------------------------------- tridiagonal


@njit(cache=True)
def sturm_count(diag, off2, sigma):
    """Number of eigenvalues < sigma of the symmetric tridiagonal matrix.

    ``off2`` holds the squared off-diagonal entries.
    """
    n = diag.shape[0]
    count = 0
    d = diag[0] - sigma
    if d < 0.0:
        count += 1
    for i in range(1, n):
        if d == 0.0:
            d = 1e-300
        d = diag[i] - sigma - off2[i - 1] / d
        if d < 0.0:
            count += 1
    return count


@njit(cache=True)
def bisect_eigenvalues(diag, off2, count, lo, hi, tol):
    """Lowest ``count`` eigenvalues by Sturm-sequence bisection on [lo, hi]."""
    out = np.empty(count)
    for idx in range(count):
        a = lo
        b = hi
        # the idx-th eigenvalue (0-based) is the point where the count passes idx+1
        while b - a > tol * max(1.0, abs(a) + abs(b)) * 0.5:
            mid = 0.5 * (a + b)
            if mid == a or mid == b:
                break
            if sturm_count(diag, off2, mid) >= idx + 1:
                b = mid
            else:
                a = mid
        out[idx] = 0.5 * (a + b)
        lo = a
    return out
