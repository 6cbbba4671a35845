"""Norms of monomials under the metric exp(-l g_a).

The sup-norm of ``z^e`` is controlled by phi_a; the L^2 inner products
(against the volume form Phi_a) are exact rationals and the monomial basis
is orthogonal.  Numerical routines here exist as independent oracles for
the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import integrate
from scipy.optimize import minimize_scalar
from scipy.special import gammaln

from .characteristic import as_coeffs, phi
from .errors import BadExponent, BudgetExceeded, QuadratureNotConverged
from .theta import _compositions, lattice_points


def lift_exponent(e: Sequence[int], l: int) -> tuple[int, ...]:
    """``(l - |e|, e_1, ..., e_n)``.

    Raises:
        BadExponent: a negative entry or ``|e| > l``.
    """
    e = tuple(int(v) for v in e)
    if any(v < 0 for v in e) or sum(e) > l or l < 0:
        raise BadExponent(f"exponent {e} is not admissible at level {l}")
    return (l - sum(e),) + e


def multinomial(k: Sequence[int]) -> int:
    out, acc = 1, 0
    for v in k:
        acc += v
        out *= math.comb(acc, v)
    return out


def _check(a, e, l):
    if len(e) != a.n:
        raise BadExponent(f"exponent {tuple(e)} has wrong length for n = {a.n}")
    return lift_exponent(e, l)


def log_sup_norm_sq(a, l: int, e: Sequence[int]) -> float:
    """``log ||z^e||^2 = -l phi_a(e_lift / l)``."""
    a = as_coeffs(a)
    lifted = _check(a, e, l)
    if l == 0:
        return 0.0
    return -l * phi(a, [v / l for v in lifted])


def sup_norm_sq(a, l: int, e: Sequence[int]) -> float:
    """Squared sup-norm ``exp(-l phi_a(e_lift / l))`` of the monomial ``z^e``."""
    return math.exp(log_sup_norm_sq(a, l, e))


def _log_norm_density(a, lifted_e, y: np.ndarray) -> np.ndarray:
    # log of prod y_i^{e_i} / (sum a_i y_i)^l on the simplex (homogeneous form)
    A = a.as_floats()
    l = sum(lifted_e)
    with np.errstate(divide="ignore"):
        out = -l * np.log(y @ A)
        for i, ei in enumerate(lifted_e):
            if ei:
                out = out + ei * np.log(y[:, i])
    return out


def sup_norm_numeric(a, l: int, e: Sequence[int], grid: int = 256) -> float:
    """Numerical sup of ``prod |z_i|^{2 e_i} exp(-l g_a)``.

    Works in homogeneous coordinates ``y_i = |T_i|^2 / sum |T_j|^2`` so the
    search domain is the compact simplex: a grid pass, then pairwise
    mass-transfer Brent refinement until the value stops improving.
    """
    a = as_coeffs(a)
    lifted = _check(a, e, l)
    if l == 0:
        return 1.0
    n = a.n
    per_axis = grid if n == 1 else max(8, int(round(grid ** (1.0 / n) * 4)))
    Y = np.array(list(_compositions(n, per_axis)), dtype=float) / per_axis
    Y = np.column_stack([1.0 - Y.sum(axis=1), Y])
    vals = _log_norm_density(a, lifted, Y)
    y = Y[int(np.argmax(vals))].copy()
    best = float(vals.max())

    pairs = [(i, j) for i in range(n + 1) for j in range(i + 1, n + 1)]
    for _ in range(200):
        before = best
        for i, j in pairs:
            # move mass between y_i and y_j keeping the rest fixed
            span = y[i] + y[j]

            def neg(s, i=i, j=j, span=span):
                z = y.copy()
                z[j] = s
                z[i] = span - s
                return -float(_log_norm_density(a, lifted, z[None, :])[0])

            res = minimize_scalar(neg, bounds=(0.0, span), method="bounded", options={"xatol": 1e-13})
            cands = [(res.fun, res.x), (neg(0.0), 0.0), (neg(span), span)]
            fval, s = min(cands, key=lambda c: c[0])
            if -fval >= best:
                best = -fval
                y[j], y[i] = s, span - s
        if best - before < 1e-15:
            break
    return math.exp(best)


def inner_product(a, l: int, e: Sequence[int], e2: Sequence[int]) -> Fraction:
    """Exact ``<z^e, z^e'>`` for the L^2 metric of ``l g_a``.

    Zero off the diagonal; on it ``1 / (binom(n+l, n) multinomial(l; e_lift)
    a^{e_lift})``.
    """
    a = as_coeffs(a)
    lifted = _check(a, e, l)
    lifted2 = _check(a, e2, l)
    if lifted != lifted2:
        return Fraction(0)
    denom = Fraction(math.comb(a.n + l, a.n) * multinomial(lifted))
    for ai, ki in zip(a.a, lifted):
        denom *= ai**ki
    return 1 / denom


def log_inverse_inner_product(a, l: int, e: Sequence[int]) -> float:
    """``log(1 / <z^e, z^e>)`` in floating point, for large levels."""
    a = as_coeffs(a)
    lifted = _check(a, e, l)
    n = a.n
    return float(
        gammaln(n + l + 1) - gammaln(n + 1) - sum(gammaln(k + 1) for k in lifted)
        + sum(k * la for k, la in zip(lifted, a.log_a))
    )


def beta_integral(a, b, m: int, k: int) -> Fraction:
    """Closed form of ``int_0^inf a x^m / (a x + b)^k dx`` (needs ``k - m >= 2``)."""
    a, b = Fraction(a), Fraction(b)
    if k - m < 2 or m < 0:
        raise ValueError("integral diverges unless k - m >= 2")
    falling = math.prod(k - j for j in range(1, m + 2))
    return Fraction(math.factorial(m)) / (a**m * b ** (k - m - 1) * falling)


def _quad(f, lo, hi, rel):
    val, err = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=max(rel * 1e-2, 1e-13), limit=500)
    if not math.isfinite(val) or err > rel * max(abs(val), 1e-300):
        raise QuadratureNotConverged(f"quad error {err:.2e} for value {val:.6e}")
    return val, err


def inner_product_numeric(a, l: int, e: Sequence[int], e2: Sequence[int], rel: float = 1e-8) -> float:
    """Quadrature of ``<z^e, z^e'>`` in polar coordinates ``z_i = sqrt(x_i) e^{2 pi i theta_i}``.

    The radial integral runs over ``x_i = t_i / (1 - t_i)`` on ``[0, 1)``; the
    angular factor ``prod int_0^1 cos(2 pi (e_i - e'_i) theta) d theta`` is
    integrated numerically as well.

    Raises:
        BudgetExceeded: n >= 3.
        QuadratureNotConverged: the relative error estimate exceeds ``rel``.
    """
    a = as_coeffs(a)
    _check(a, e, l)
    _check(a, e2, l)
    n = a.n
    if n > 2:
        raise BudgetExceeded("numeric inner products are limited to n <= 2")
    A = a.as_floats()
    log_pref = math.log(math.factorial(n)) + float(np.sum(a.log_a))
    powers = [(ei + fi) / 2 for ei, fi in zip(e, e2)]
    N = n + l + 1

    angular = 1.0
    for ei, fi in zip(e, e2):
        k = ei - fi
        if k:
            angular *= integrate.quad(lambda th, k=k: math.cos(2 * math.pi * k * th), 0.0, 1.0, limit=200)[0]
    if abs(angular) < 1e-13:
        return angular

    def log_integrand(ts):
        xs = [t / (1.0 - t) for t in ts]
        h = A[0] + sum(A[i + 1] * xs[i] for i in range(n))
        out = log_pref - N * math.log(h) - 2 * sum(math.log1p(-t) for t in ts)
        for p, x in zip(powers, xs):
            if p:
                if x == 0.0:
                    return -math.inf
                out += p * math.log(x)
        return out

    if n == 1:
        val, _ = _quad(lambda t: math.exp(log_integrand((t,))), 0.0, 1.0, rel)
    else:
        inner = lambda t1: _quad(lambda t2: math.exp(log_integrand((t1, t2))), 0.0, 1.0, rel * 1e-1)[0]  # noqa: E731
        val, _ = _quad(inner, 0.0, 1.0, rel)
    return angular * val


def volume_form_mass(a, rel: float = 1e-10) -> float:
    """Total mass of Phi_a over P^n(C), i.e. ``<1, 1>`` at level 0."""
    a = as_coeffs(a)
    return inner_product_numeric(a, 0, (0,) * a.n, (0,) * a.n, rel=rel)


def hermitian_det_closed_form(t: Sequence[float], alpha: Sequence[complex]) -> float:
    """``prod t_i - sum |alpha_i|^2 prod_{j != i} t_j``, the determinant of
    ``(delta_ij t_i - alpha_i conj(alpha_j))``."""
    t = np.asarray(t, dtype=float)
    w = np.abs(np.asarray(alpha)) ** 2
    total = float(np.prod(t))
    for i in range(len(t)):
        total -= w[i] * float(np.prod(np.delete(t, i)))
    return total


@dataclass(frozen=True)
class GramMatrix:
    """Diagonal Gram matrix of monomials at level ``l``.

    Off-diagonal entries vanish identically, so only ``diag`` is stored.
    """

    l: int
    index: tuple[tuple[int, ...], ...]
    diag: tuple[Fraction, ...]
    provenance: str

    @property
    def m(self) -> int:
        return len(self.index)

    def entry(self, e, e2) -> Fraction:
        if tuple(e) != tuple(e2):
            return Fraction(0)
        return self.diag[self.index.index(tuple(e))]

    def to_json(self) -> dict:
        return {
            "l": self.l,
            "provenance": self.provenance,
            "index": [list(e) for e in self.index],
            "diag": [f"{d.numerator}/{d.denominator}" for d in self.diag],
        }


def gram_matrix(a, l: int, domain: str = "full") -> GramMatrix:
    """Gram matrix over ``l Delta_n`` (``domain="full"``) or ``l Theta_a``."""
    a = as_coeffs(a)
    if l < 0:
        raise ValueError("level must be nonnegative")
    if domain == "full":
        index = list(_compositions(a.n, l))
    elif domain == "theta":
        index = lattice_points(a, l) if l >= 1 else ([(0,) * a.n] if a.total >= 1 else [])
    else:
        raise ValueError(f"unknown domain {domain!r}")
    diag = tuple(inner_product(a, l, e, e) for e in index)
    return GramMatrix(l, tuple(index), diag, domain)


def log_ball_volume(m: int) -> float:
    """Log of the volume of the unit ball in R^m."""
    if m < 1:
        raise ValueError("dimension must be positive")
    return 0.5 * m * math.log(math.pi) - float(gammaln(m / 2 + 1))


def chi_hat(a, l: int) -> float:
    """Arithmetic Euler characteristic of ``H^0(l H_0)`` with the L^2 metric.

    ``sum_e log sqrt(1 / <z^e, z^e>) + log V_m`` over all ``e`` in
    ``l Delta_n``, ``m`` being the number of such ``e``.
    """
    a = as_coeffs(a)
    if l < 1:
        raise ValueError("level must be positive")
    index = list(_compositions(a.n, l))
    total = math.fsum(0.5 * log_inverse_inner_product(a, l, e) for e in index)
    return total + log_ball_volume(len(index))
