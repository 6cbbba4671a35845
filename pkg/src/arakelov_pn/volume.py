"""Arithmetic volume, self-intersection and positivity of D_a.

Both integrals are taken over the simplex in affine coordinates, scaled by
``(n+1)!/2``: the volume integrates ``phi_tilde`` over Theta_a, the degree
integrates it (signed) over the whole simplex.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate
from scipy.optimize import brentq

from .characteristic import as_coeffs, phi_tilde, phi_tilde_array
from .errors import QuadratureNotConverged, SearchFailed
from .theta import endpoints_p1, lattice_points, minimize_linear

ONE = Fraction(1)


@dataclass(frozen=True)
class GeographyReport:
    ample: bool
    nef: bool
    big: bool
    pseudo_effective: bool
    label: str
    witness: str

    def to_json(self) -> dict:
        return asdict(self)


def classify(a) -> GeographyReport:
    """Positivity of D_a by exact comparison of the coefficients with 1."""
    a = as_coeffs(a)
    ample = all(v > ONE for v in a.a)
    nef = all(v >= ONE for v in a.a)
    big = a.total > ONE
    psef = a.total >= ONE
    if ample:
        label, witness = "Ample", "every a_i > 1"
    elif nef:
        label, witness = "NefNotAmple", "every a_i >= 1, some a_i = 1"
    elif big:
        label, witness = "BigNotNef", "|a| > 1, some a_i < 1"
    elif psef:
        label, witness = "PseudoEffectiveNotBig", "|a| = 1"
    else:
        label, witness = "NotPseudoEffective", "|a| < 1"
    return GeographyReport(ample, nef, big, psef, label, witness)


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error: float
    method: str
    tol: float

    def to_json(self) -> dict:
        return asdict(self)


def _quad(f, lo, hi, tol, points=None):
    # non-convergence is reported through the error estimate below
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, lo, hi, epsabs=tol, epsrel=0.0, limit=400, points=points)
    if not math.isfinite(val) or err > tol:
        raise QuadratureNotConverged(f"error estimate {err:.2e} exceeds {tol:.2e}")
    return val, err


def _phi2(a, x1: float, x2: float) -> float:
    # scalar phi_tilde for n = 2; the hot path of the iterated quadrature
    la = a.log_a
    out = 0.0
    for v, lv in ((1.0 - x1 - x2, la[0]), (x1, la[1]), (x2, la[2])):
        if v > 0:
            out += v * (lv - math.log(v))
    return out


def _theta_slice(a, x1: float) -> tuple[float, float] | None:
    """Interval of ``x_2`` with ``(x_1, x_2)`` in Theta_a, or None."""
    a0, _, a2 = a.a
    rest = 1.0 - x1
    peak = rest * float(a2 / (a0 + a2))
    f = lambda x2: _phi2(a, x1, x2)  # noqa: E731
    top = f(peak)
    if top < 0:
        return None
    lo = 0.0 if f(0.0) >= 0 else brentq(f, 0.0, peak, xtol=1e-15)
    hi = rest if f(rest) >= 0 else brentq(f, peak, rest, xtol=1e-15)
    return lo, hi


def _mc_integral(a, restrict: bool, samples: int, seed: int, tol: float) -> IntegralResult:
    # ``error`` is the standard error; ``tol`` is recorded as requested but not enforced
    rng = np.random.default_rng(seed)
    X = rng.dirichlet(np.ones(a.n + 1), size=samples)[:, 1:]
    v = phi_tilde_array(a, X)
    if restrict:
        v = np.maximum(v, 0.0)
    simplex_vol = 1.0 / math.factorial(a.n)
    scale = math.factorial(a.n + 1) / 2 * simplex_vol
    return IntegralResult(
        float(scale * v.mean()), float(scale * v.std(ddof=1) / math.sqrt(samples)), "monte-carlo", tol
    )


def _integrate(a, tol: float, restrict: bool, samples: int, seed: int | None) -> IntegralResult:
    n = a.n
    scale = math.factorial(n + 1) / 2
    if n == 1:
        if restrict:
            lo, hi = endpoints_p1(a)
        else:
            lo, hi = 0.0, 1.0
        if hi <= lo:
            return IntegralResult(0.0, 0.0, "quad", tol)
        val, err = _quad(lambda x: phi_tilde(a, (x,)), lo, hi, tol / scale)
        return IntegralResult(scale * val, scale * err, "quad", tol)
    if n == 2:
        inner_tol = tol / (10 * scale)
        if restrict:
            # the slice maxima form the P^1 function for (a_0 + a_2, a_1)
            a0, a1, a2 = a.a
            lo, hi = endpoints_p1((a0 + a2, a1))

            def inner(x1):
                rng = _theta_slice(a, x1)
                if rng is None or rng[1] <= rng[0]:
                    return 0.0
                return _quad(lambda x2: _phi2(a, x1, x2), rng[0], rng[1], inner_tol)[0]
        else:
            lo, hi = 0.0, 1.0

            def inner(x1):
                if x1 >= 1.0:
                    return 0.0
                return _quad(lambda x2: _phi2(a, x1, x2), 0.0, 1.0 - x1, inner_tol)[0]

        if hi <= lo:
            return IntegralResult(0.0, 0.0, "iterated-quad", tol)
        val, err = _quad(inner, lo, hi, tol / scale)
        return IntegralResult(scale * val, scale * err, "iterated-quad", tol)
    if seed is None:
        raise ValueError("Monte Carlo integration for n >= 3 needs an explicit seed")
    return _mc_integral(a, restrict, samples, seed, tol)


def vol_hat_result(a, tol: float = 1e-9, samples: int = 200_000, seed: int | None = None) -> IntegralResult:
    """Arithmetic volume with error estimate and method.

    Raises:
        QuadratureNotConverged: quadrature error estimate above ``tol``.
    """
    a = as_coeffs(a)
    if a.total <= 1:
        return IntegralResult(0.0, 0.0, "exact", tol)
    return _integrate(a, tol, True, samples, seed)


def deg_hat_result(a, tol: float = 1e-9, samples: int = 200_000, seed: int | None = None) -> IntegralResult:
    """Arithmetic self-intersection with error estimate and method."""
    a = as_coeffs(a)
    return _integrate(a, tol, False, samples, seed)


def vol_hat(a, tol: float = 1e-9, **kw) -> float:
    """``(n+1)!/2`` times the integral of phi_tilde over Theta_a (0 unless |a| > 1)."""
    return vol_hat_result(a, tol, **kw).value


def deg_hat(a, tol: float = 1e-9, **kw) -> float:
    """``(n+1)!/2`` times the signed integral of phi_tilde over the simplex."""
    return deg_hat_result(a, tol, **kw).value


def _coordinate_range(a, i: int) -> tuple[float, float]:
    """``(min x_i, max x_i)`` over Theta_a for ``1 <= i <= n``."""
    n = a.n
    e = np.zeros(n + 1)
    e[i] = 1.0
    _, lo = minimize_linear(a, e)
    _, rest = minimize_linear(a, 1.0 - e)
    return lo, 1.0 - rest


def construct_big_without_sections(n: int, l: int, max_bits: int = 40, margin: float = 1e-9):
    """A big D_a with no small sections at levels ``1..l``.

    Starts from ``a'`` with ``|a'| = 1`` whose Theta is the single point
    ``(a'_1, ..., a'_n)`` inside ``(0, 1/l)^n``, then scales by the largest
    dyadic ``lambda`` in ``(1, 2]`` (denominator at most ``2^max_bits``)
    keeping Theta inside that open box.

    Raises:
        SearchFailed: no admissible lambda, or the lattice check fails.
    """
    if n < 1 or l < 1:
        raise ValueError("n and l must be positive")
    ai = Fraction(1, 2 * max(n, l))
    base = [1 - n * ai] + [ai] * n
    bound = 1.0 / l

    def fits(lam: Fraction) -> bool:
        a = as_coeffs([lam * v for v in base])
        for i in range(1, n + 1):
            lo, hi = _coordinate_range(a, i)
            if lo <= margin or hi >= bound - margin:
                return False
        return True

    good, bad = Fraction(1), Fraction(2)
    if fits(bad):
        good = bad
    else:
        for _ in range(max_bits):
            mid = (good + bad) / 2
            if fits(mid):
                good = mid
            else:
                bad = mid
    if good == 1:
        raise SearchFailed("no dyadic lambda > 1 keeps Theta inside the box")
    a = as_coeffs([good * v for v in base])
    for k in range(1, l + 1):
        if lattice_points(a, k):
            raise SearchFailed(f"sections appear at level {k} for lambda = {good}")
    return a


def geography_grid(resolution: int) -> list[tuple[Fraction, Fraction, GeographyReport]]:
    """Classification at cell centres ``((2j+1)/N, (2k+1)/N)`` of ``(0, 2]^2``.

    Exact rational grid points keep the region boundaries sharp.
    """
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    N = int(resolution)
    ticks = [Fraction(2 * j + 1, N) for j in range(N)]
    return [(a0, a1, classify((a0, a1))) for a0 in ticks for a1 in ticks]
