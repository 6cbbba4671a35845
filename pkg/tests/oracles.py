"""Independent reference implementations used to freeze expected values.

Nothing here imports the package under test: values are recomputed with
mpmath at 50 digits, brute-force enumeration or hand-derived closed forms.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import mpmath

mpmath.mp.dps = 50


def mpf(v):
    """mpf from int, float, str or Fraction (mpmath rejects Fraction directly)."""
    v = Fraction(v) if isinstance(v, (Fraction, str)) else v
    if isinstance(v, Fraction):
        return mpmath.mpf(v.numerator) / v.denominator
    return mpmath.mpf(v)


def phi_ref(a, x):
    """phi_a at a lifted point (length n+1) with 0 log 0 = 0."""
    total = mpmath.mpf(0)
    for ai, xi in zip(a, x):
        xi = mpf(xi)
        if xi > 0:
            total += -xi * mpmath.log(xi) + xi * mpmath.log(mpf(ai))
    return total


def phi_tilde_ref(a, x):
    x = [mpf(v) for v in x]
    return phi_ref(a, [1 - sum(x)] + x)


def endpoints_ref(a0, a1):
    """Endpoints of {x in [0,1] : phi_tilde >= 0} for n = 1 by mpmath bisection."""
    a0, a1 = mpf(a0), mpf(a1)
    f = lambda x: phi_tilde_ref((a0, a1), [x])  # noqa: E731
    peak = a1 / (a0 + a1)

    def bisect(lo, hi, increasing):
        for _ in range(200):
            mid = (lo + hi) / 2
            if (f(mid) >= 0) == increasing:
                hi = mid
            else:
                lo = mid
        return (lo + hi) / 2

    lower = mpmath.mpf(0) if f(0) >= 0 else bisect(mpmath.mpf(0), peak, True)
    upper = mpmath.mpf(1) if f(1) >= 0 else bisect(peak, mpmath.mpf(1), False)
    return lower, upper


def vol_ref_p1(a0, a1):
    """``int phi_tilde`` over Theta for n = 1 (the factor (n+1)!/2 is 1)."""
    if a0 + a1 <= 1:
        return mpmath.mpf(0)
    lo, hi = endpoints_ref(a0, a1)
    return mpmath.quad(lambda x: phi_tilde_ref((a0, a1), [x]), [lo, mpf(a1) / (mpf(a0) + mpf(a1)), hi])


def deg_ref_p1(a0, a1):
    return mpmath.quad(lambda x: phi_tilde_ref((a0, a1), [x]), [0, 1])


def linear_min_ref(a, c):
    """Minimiser of ``c . x_lifted`` over lifted Theta_a (|a| > 1, c >= 0, min c unique).

    Solves the Lagrange conditions ``x_i = a_i exp(-t c_i) / Z(t)`` with
    ``phi(x(t)) = 0`` by high-precision bisection in ``t``.
    """
    la = [mpmath.log(mpf(v)) for v in a]
    c = [mpf(v) for v in c]

    def point(t):
        w = [l - t * ci for l, ci in zip(la, c)]
        top = max(w)
        z = mpmath.fsum(mpmath.e ** (wi - top) for wi in w)
        return [mpmath.e ** (wi - top) / z for wi in w]

    def phi_at(t):
        return phi_ref(a, point(t))

    lo, hi = mpmath.mpf(0), mpmath.mpf(1)
    while phi_at(hi) > 0:
        hi *= 2
    for _ in range(300):
        mid = (lo + hi) / 2
        if phi_at(mid) > 0:
            lo = mid
        else:
            hi = mid
    return point((lo + hi) / 2)


def binary_entropy_integral():
    """``int_0^1 H(x) dx = 1/2`` in nats: twice ``int_0^1 -x log x = 1/4``."""
    return Fraction(1, 2)


def ellipsoid_count_bruteforce(diag):
    """Integer points with ``sum d_i x_i^2 <= 1`` by scanning the bounding box."""
    diag = [Fraction(d) for d in diag]
    radii = [math.isqrt(int(1 / d)) + 1 for d in diag]
    count = 0
    for x in itertools.product(*[range(-r, r + 1) for r in radii]):
        if sum(d * v * v for d, v in zip(diag, x)) <= 1:
            count += 1
    return count


def monomial_inner_product_ref(a, l, e):
    """Diagonal L^2 entry ``1 / (C(n+l, n) multinomial(l; e_lift) a^e_lift)`` from factorials."""
    n = len(a) - 1
    lifted = [l - sum(e)] + list(e)
    multi = math.factorial(l)
    for k in lifted:
        multi //= math.factorial(k)
    denom = Fraction(math.comb(n + l, n) * multi)
    for ai, k in zip(a, lifted):
        denom *= Fraction(ai) ** k
    return 1 / denom


def sup_monomial_grid_ref(a0, a1, l, e, points=20001):
    """``max x^e / (a0 + a1 x)^l`` over ``x = |z|^2`` on a dense log grid, then golden refinement."""
    a0, a1 = float(a0), float(a1)

    def f(lx):
        x = math.exp(lx)
        return e * lx - l * math.log(a0 + a1 * x)

    grid = [-40 + 80 * k / (points - 1) for k in range(points)]
    vals = [f(g) for g in grid]
    k = max(range(points), key=vals.__getitem__)
    best = vals[k]
    if 0 < k < points - 1:
        lo, hi = grid[k - 1], grid[k + 1]
        g = (math.sqrt(5) - 1) / 2
        for _ in range(200):
            c, d = hi - g * (hi - lo), lo + g * (hi - lo)
            if f(c) > f(d):
                hi = d
            else:
                lo = c
        best = max(best, f((lo + hi) / 2))
    # endpoints x -> 0 and x -> infinity
    if e == 0:
        best = max(best, -l * math.log(a0))
    if e == l:
        best = max(best, -l * math.log(a1))
    return math.exp(best)


def log_ball_volume_ref(m):
    return float(mpmath.log(mpmath.pi ** (mpmath.mpf(m) / 2) / mpmath.gamma(mpmath.mpf(m) / 2 + 1)))
