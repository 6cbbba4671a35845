"""Zariski decomposition of D_a on P^1.

Everything is radial, so Green functions are evaluated at ``r = |z|``.
With ``[vartheta, theta] = Theta_a`` the positive part is
``theta H_0 - vartheta H_1`` with Green function

    p_a(r) = vartheta log r^2        for r < r_low
             log(a_0 + a_1 r^2)      for r_low <= r <= r_high
             theta log r^2           for r > r_high

where ``r_low^2 = a_0 vartheta / (a_1 (1 - vartheta))`` and ``r_high``
likewise with theta; ``r_low = 0`` when ``vartheta = 0`` and
``r_high = inf`` when ``theta = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .characteristic import CoeffVector, as_coeffs, log_fraction
from .errors import NotPseudoEffective, OutOfDomain, WrongDimension
from .theta import endpoints_p1, minimize_linear


@dataclass(frozen=True)
class ZariskiData:
    a: CoeffVector
    vartheta: float
    theta: float
    r_low: float
    r_high: float

    @property
    def degenerate(self) -> bool:
        """``|a| = 1``: Theta_a is the single point ``a_1``."""
        return self.a.total == 1

    @property
    def positive_part(self) -> tuple[float, float]:
        """Coefficients of ``(H_0, H_1)`` in the positive part."""
        return self.theta, -self.vartheta

    @property
    def negative_part(self) -> tuple[float, float]:
        """Coefficients of ``(H_0, H_1)`` in the negative part."""
        return 1.0 - self.theta, self.vartheta

    def green(self, r: float) -> float:
        return green_positive(self, r)

    def to_json(self) -> dict:
        def enc(v):
            return "inf" if math.isinf(v) else v

        return {
            "a": [f"{v.numerator}/{v.denominator}" for v in self.a.a],
            "vartheta": self.vartheta,
            "theta": self.theta,
            "r_low": enc(self.r_low),
            "r_high": enc(self.r_high),
            "positive_part": list(self.positive_part),
            "negative_part": list(self.negative_part),
        }


def _p1(a) -> CoeffVector:
    a = as_coeffs(a)
    if a.n != 1:
        raise WrongDimension("the Zariski decomposition is explicit on P^1 only")
    if a.total < 1:
        raise NotPseudoEffective(f"|a| = {a.total} < 1: no Zariski decomposition")
    return a


def _radius(a0: float, a1: float, t: float) -> float:
    if t <= 0.0:
        return 0.0
    if t >= 1.0:
        return math.inf
    return math.sqrt(a0 * t / (a1 * (1.0 - t)))


def decompose(a) -> ZariskiData:
    """Endpoints and breakpoint radii of the positive part.

    Raises:
        WrongDimension: n != 1.
        NotPseudoEffective: |a| < 1.
    """
    a = _p1(a)
    lo, hi = endpoints_p1(a)
    if a.total == 1:
        # both radii equal sqrt(a_0 a_1 / (a_1 a_0)) = 1 exactly
        return ZariskiData(a, lo, hi, 1.0, 1.0)
    a0, a1 = a.as_floats()
    return ZariskiData(a, lo, hi, _radius(a0, a1, lo), _radius(a0, a1, hi))


def g_a(a, r: float) -> float:
    """``log(a_0 + a_1 r^2)``, exact on rational ``r`` when |a| = 1 and r = 1."""
    a = as_coeffs(a)
    if math.isinf(r):
        return math.inf
    if r == 1.0:
        return log_fraction(a.total)
    a0, a1 = a.as_floats()
    return math.log(a0 + a1 * r * r)


def _log_r2(r: float) -> float:
    return 2.0 * math.log(r)


def green_positive(Z: ZariskiData, r: float) -> float:
    """``p_a(r)``; ``-inf`` at ``r = 0`` when ``vartheta > 0``."""
    if not r >= 0:
        raise ValueError(f"radius must be nonnegative, got {r}")
    if r < Z.r_low:
        return -math.inf if r == 0 else Z.vartheta * _log_r2(r)
    if r <= Z.r_high:
        return g_a(Z.a, r)
    return Z.theta * _log_r2(r)


def correction_r1_r2(Z: ZariskiData, r: float) -> tuple[float | None, float | None]:
    """The corrections ``(r_1(r), r_2(r))``; ``None`` outside a function's domain.

    ``r_1`` lives on ``r <= r_high`` and vanishes below ``r_low``;
    ``r_2`` lives on ``r >= r_low`` and vanishes above ``r_high``.

    Raises:
        OutOfDomain: negative or NaN radius.
    """
    if not r >= 0:
        raise OutOfDomain(f"radius must be nonnegative, got {r}")
    r1 = r2 = None
    if r <= Z.r_high and not math.isinf(r):
        if r < Z.r_low:
            r1 = 0.0
        elif Z.vartheta == 0:
            r1 = g_a(Z.a, r)
        else:
            r1 = g_a(Z.a, r) - Z.vartheta * _log_r2(r)
    if r >= Z.r_low:
        if r > Z.r_high:
            r2 = 0.0
        elif r > 0:
            r2 = g_a(Z.a, r) - Z.theta * _log_r2(r)
    return r1, r2


def mu_multiplicities(a) -> tuple[float, float]:
    """Asymptotic multiplicities ``(mu_H0, mu_H1) = (1 - theta, vartheta)``.

    Computed as the minima of ``x_0`` and ``x_1`` over Theta_a.
    """
    a = _p1(a)
    _, m0 = minimize_linear(a, (1.0, 0.0))
    _, m1 = minimize_linear(a, (0.0, 1.0))
    return m0, m1


def profile(Z: ZariskiData, radii) -> list[tuple[float, float, float, float]]:
    """Rows ``(r, g_a(r), p_a(r), g_a(r) - p_a(r))`` for plotting."""
    rows = []
    for r in radii:
        g = g_a(Z.a, r)
        p = green_positive(Z, r)
        rows.append((float(r), g, p, g - p))
    return rows


def log_radii(count: int = 1000, lo: float = -6.0, hi: float = 6.0) -> list[float]:
    """``count`` radii log-spaced over ``[10^lo, 10^hi]``."""
    step = (hi - lo) / (count - 1)
    return [10.0 ** (lo + k * step) for k in range(count)]

