"""The characteristic function phi_a and the identities built on it.

For a positive weight vector ``a = (a_0, ..., a_n)`` the characteristic
function is

    phi_a(x_0, ..., x_n) = -sum x_i log x_i + sum x_i log a_i

with the convention ``0 log 0 = 0`` and natural logarithms throughout.
Points of the standard simplex ``Delta_n`` carry ``n`` affine coordinates
``(x_1, ..., x_n)``; :func:`lift` prepends the slack ``x_0 = 1 - sum x_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational, Real
from typing import Iterable, Sequence, Union

import mpmath
import numpy as np
from scipy.special import gammaln, xlogy

from .errors import (
    BadComposition,
    BoundaryPoint,
    NegativeCoordinate,
    OutsideSimplex,
    WeightsNotNormalized,
)

#: slack for floating simplex membership and sign decisions
FLOAT_TOL = 1e-12
#: working precision (bits) of the high-precision fallback path
MP_PREC = 256

Number = Union[int, float, Fraction]


def to_fraction(value) -> Fraction:
    """Convert ``value`` to an exact rational.

    Strings are parsed exactly (``"1/3"``, ``"0.4"``); floats go through
    their shortest decimal representation so that ``0.3`` means 3/10.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, Real):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(float(value)))
    raise TypeError(f"cannot convert {value!r} to a rational")


def _mp_log_fraction(q: Fraction) -> mpmath.mpf:
    with mpmath.workprec(MP_PREC):
        return mpmath.log(mpmath.mpf(q.numerator)) - mpmath.log(mpmath.mpf(q.denominator))


def log_fraction(q: Fraction) -> float:
    """Natural log of a positive rational without overflowing to float."""
    return math.log(q.numerator) - math.log(q.denominator)


@dataclass(frozen=True)
class CoeffVector:
    """Positive weight vector ``a = (a_0, ..., a_n)`` held as exact rationals.

    ``log_a`` holds double-precision logs and ``log_a_mp`` logs at
    :data:`MP_PREC` bits, both computed once at construction.
    """

    a: tuple[Fraction, ...]
    log_a: tuple[float, ...] = field(init=False, repr=False, compare=False)
    log_a_mp: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a = tuple(to_fraction(v) for v in self.a)
        if len(a) < 2:
            raise ValueError("need at least two coefficients (n >= 1)")
        if any(v <= 0 for v in a):
            raise ValueError(f"coefficients must be strictly positive, got {a}")
        object.__setattr__(self, "a", a)
        logs_mp = tuple(_mp_log_fraction(v) for v in a)
        object.__setattr__(self, "log_a_mp", logs_mp)
        object.__setattr__(self, "log_a", tuple(float(v) for v in logs_mp))

    @classmethod
    def of(cls, *values) -> "CoeffVector":
        if len(values) == 1 and not isinstance(values[0], (int, float, str, Fraction)):
            values = tuple(values[0])
        return cls(tuple(values))

    @property
    def n(self) -> int:
        return len(self.a) - 1

    @property
    def total(self) -> Fraction:
        """The entry sum ``|a|``."""
        return sum(self.a, Fraction(0))

    @property
    def log_total(self) -> float:
        return log_fraction(self.total)

    def scaled(self, t) -> "CoeffVector":
        t = to_fraction(t)
        return CoeffVector(tuple(t * v for v in self.a))

    def as_floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.a])

    def __len__(self):
        return len(self.a)

    def __iter__(self):
        return iter(self.a)

    def __str__(self):
        return "(" + ", ".join(str(v) for v in self.a) + ")"


def as_coeffs(a) -> CoeffVector:
    """Accept a :class:`CoeffVector` or any sequence of positive numbers."""
    if isinstance(a, CoeffVector):
        return a
    return CoeffVector(tuple(a))


@dataclass(frozen=True)
class SimplexPoint:
    """A point of ``Delta_n`` in affine coordinates.

    ``exact`` is true when every coordinate is a :class:`~fractions.Fraction`,
    in which case simplex membership is decided without slack.
    """

    x: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in self.x)

    @property
    def n(self) -> int:
        return len(self.x)

    def lift(self) -> tuple:
        """Barycentric lift ``(1 - sum x, x_1, ..., x_n)``."""
        if self.exact:
            xs = tuple(Fraction(v) for v in self.x)
            return (1 - sum(xs, Fraction(0)),) + xs
        xs = tuple(float(v) for v in self.x)
        return (1.0 - math.fsum(xs),) + xs

    def as_floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.x])

    def in_simplex(self) -> bool:
        if self.exact:
            return all(v >= 0 for v in self.lift())
        tol = FLOAT_TOL
        return all(float(v) >= -tol for v in self.x) and math.fsum(float(v) for v in self.x) <= 1 + tol

    def __iter__(self):
        return iter(self.x)

    def __len__(self):
        return len(self.x)


def as_point(x) -> SimplexPoint:
    if isinstance(x, SimplexPoint):
        return x
    if isinstance(x, (int, float, Fraction)):
        return SimplexPoint((x,))
    return SimplexPoint(tuple(x))


def _check_dim(a: CoeffVector, length: int, lifted: bool):
    want = a.n + 1 if lifted else a.n
    if length != want:
        raise ValueError(f"expected {want} coordinates for n={a.n}, got {length}")


def phi(a, x: Sequence[Number]) -> float:
    """Evaluate ``phi_a`` at a point of the closed positive orthant.

    Raises:
        NegativeCoordinate: some ``x_i < -1e-12``.
    """
    a = as_coeffs(a)
    xs = np.array([float(v) for v in x])
    _check_dim(a, len(xs), lifted=True)
    if np.any(xs < -FLOAT_TOL):
        raise NegativeCoordinate(f"negative coordinate in {tuple(x)}")
    xs = np.clip(xs, 0.0, None)
    return float(-np.sum(xlogy(xs, xs)) + np.dot(xs, a.log_a))


def phi_tilde(a, x) -> float:
    """``phi_a`` at the barycentric lift of a simplex point.

    Raises:
        OutsideSimplex: the point is not in ``Delta_n`` (float slack 1e-12).
    """
    a = as_coeffs(a)
    p = as_point(x)
    _check_dim(a, p.n, lifted=False)
    if not p.in_simplex():
        raise OutsideSimplex(f"{p.x} is not in Delta_{a.n}")
    lifted = np.clip(np.array([float(v) for v in p.lift()]), 0.0, None)
    return float(-np.sum(xlogy(lifted, lifted)) + np.dot(lifted, a.log_a))


def phi_tilde_array(a, X) -> np.ndarray:
    """Vectorised :func:`phi_tilde` over rows of ``X`` (shape ``(k, n)``).

    No simplex check; coordinates are clipped at zero.
    """
    a = as_coeffs(a)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != a.n:
        X = X.reshape(-1, a.n)
    x0 = 1.0 - X.sum(axis=1)
    L = np.clip(np.column_stack([x0, X]), 0.0, None)
    return -np.sum(xlogy(L, L), axis=1) + L @ np.asarray(a.log_a)


def phi_tilde_mp(a, x) -> mpmath.mpf:
    """:func:`phi_tilde` evaluated at :data:`MP_PREC` bits.

    Rational coordinates are converted exactly; floats are taken at their
    binary value.
    """
    a = as_coeffs(a)
    p = as_point(x)
    with mpmath.workprec(MP_PREC):
        if p.exact:
            lifted = [mpmath.mpf(v.numerator) / v.denominator for v in p.lift()]
        else:
            xs = [mpmath.mpf(float(v)) for v in p.x]
            lifted = [1 - mpmath.fsum(xs)] + xs
        total = mpmath.mpf(0)
        for xi, la in zip(lifted, a.log_a_mp):
            if xi < 0:
                if xi < -mpmath.mpf(FLOAT_TOL):
                    raise OutsideSimplex(f"{p.x} is not in Delta_{a.n}")
                xi = mpmath.mpf(0)
            if xi != 0:
                total += xi * (la - mpmath.log(xi))
        return +total


def phi_grad(a, x) -> np.ndarray:
    """Gradient of :func:`phi_tilde` at a strictly interior point.

    The i-th entry is ``log(a_i / a_0) + log((1 - sum x) / x_i)``.

    Raises:
        BoundaryPoint: some coordinate or the slack is not positive.
    """
    a = as_coeffs(a)
    p = as_point(x)
    _check_dim(a, p.n, lifted=False)
    lifted = np.array([float(v) for v in p.lift()])
    if np.any(lifted <= 0):
        raise BoundaryPoint(f"gradient undefined at boundary point {p.x}")
    la = np.asarray(a.log_a)
    return (la[1:] - la[0]) + (np.log(lifted[0]) - np.log(lifted[1:]))


def phi_max(a) -> tuple[SimplexPoint, float]:
    """Maximiser ``(a_1/|a|, ..., a_n/|a|)`` and maximum ``log |a|``."""
    a = as_coeffs(a)
    total = a.total
    return SimplexPoint(tuple(v / total for v in a.a[1:])), a.log_total


def weighted_log_gap(alpha, beta, t) -> float:
    """Slack in the weighted-log (Jensen) inequality.

    Returns ``log(sum beta_i t_i) + sum alpha_i log(alpha_i / beta_i)
    - sum alpha_i log t_i``, which is nonnegative and vanishes exactly when
    all ``(beta_i / alpha_i) t_i`` coincide.

    Raises:
        WeightsNotNormalized: ``sum alpha`` differs from 1 by more than 1e-12.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    t = np.asarray(t, dtype=float)
    if not (alpha.shape == beta.shape == t.shape):
        raise ValueError("alpha, beta and t must have equal length")
    if abs(math.fsum(alpha) - 1.0) > 1e-12:
        raise WeightsNotNormalized(f"sum(alpha) = {math.fsum(alpha)!r}")
    if np.any(alpha <= 0) or np.any(beta <= 0) or np.any(t <= 0):
        raise ValueError("all entries must be strictly positive")
    return float(
        math.log(math.fsum(beta * t))
        + math.fsum(alpha * (np.log(alpha) - np.log(beta)))
        - math.fsum(alpha * np.log(t))
    )


def stirling_constants(n: int) -> tuple[float, float]:
    """``(A_n, B_n) = ((n+2)/2, (n+2) log sqrt(2 pi) + (n+2)/12)``."""
    return (n + 2) / 2, (n + 2) * math.log(math.sqrt(2 * math.pi)) + (n + 2) / 12


def log_multinomial(k: Iterable[int]) -> float:
    k = list(k)
    return float(gammaln(sum(k) + 1) - sum(gammaln(ki + 1) for ki in k))


def stirling_bracket(a, l: int, k: Sequence[int]) -> tuple[float, float]:
    """Centre ``(1/l) log(multinomial(l; k) a^k)`` and radius ``(A_n log l + B_n)/l``.

    The interval ``[centre - radius, centre + radius]`` contains
    ``phi_a(k / l)``.

    Raises:
        BadComposition: ``sum k != l`` or a negative part.
    """
    a = as_coeffs(a)
    k = [int(v) for v in k]
    _check_dim(a, len(k), lifted=True)
    if l < 1 or sum(k) != l or any(v < 0 for v in k):
        raise BadComposition(f"{k} is not a composition of {l}")
    centre = (log_multinomial(k) + math.fsum(ki * la for ki, la in zip(k, a.log_a))) / l
    A, B = stirling_constants(a.n)
    return centre, (A * math.log(l) + B) / l


def legendre_fenchel_check(a, x) -> float:
    """Conjugate of ``u -> log(a_0 + sum a_i e^{u_i})`` at an interior ``x``.

    Evaluated in closed form at the stationary point
    ``u_i = log(a_0 x_i / (a_i (1 - sum x)))``; the result equals
    ``-phi_tilde(a, x)``.

    Raises:
        BoundaryPoint: ``x`` is not strictly interior.
    """
    a = as_coeffs(a)
    p = as_point(x)
    _check_dim(a, p.n, lifted=False)
    lifted = np.array([float(v) for v in p.lift()])
    if np.any(lifted <= 0):
        raise BoundaryPoint(f"{p.x} is not strictly interior")
    la = np.asarray(a.log_a)
    u = la[0] + np.log(lifted[1:]) - la[1:] - np.log(lifted[0])
    # a_0 + sum a_i e^{u_i} in log form, stable for extreme ratios
    log_sum = float(np.logaddexp.reduce(np.concatenate([[la[0]], la[1:] + u])))
    return float(math.fsum(u * lifted[1:]) - log_sum)
