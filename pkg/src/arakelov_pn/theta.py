"""The convex body Theta_a = {x in Delta_n : phi_tilde(a, x) >= 0}.

Membership, lattice points of ``l * Theta_a``, the endpoints of Theta_a on
P^1, linear minimisation (which realises asymptotic multiplicities),
supporting hyperplanes and rational interior grids.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import mpmath
import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from .characteristic import (
    CoeffVector,
    FLOAT_TOL,
    SimplexPoint,
    as_coeffs,
    as_point,
    phi_grad,
    phi_max,
    phi_tilde,
    phi_tilde_array,
    phi_tilde_mp,
)
from .errors import EmptyRegion, NotBoundary, TooManyZeros, WrongDimension

log = logging.getLogger(__name__)

#: |phi_tilde| below this in double precision escalates to MP evaluation
NEAR_ZERO = 1e-9
#: MP values within this of zero are ties and count as members
MP_TIE = mpmath.mpf("1e-30")
#: phi_tilde threshold for interior points
INTERIOR_MARGIN = 1e-9


@dataclass(frozen=True)
class ThetaRegion:
    a: CoeffVector

    def __init__(self, a):
        object.__setattr__(self, "a", as_coeffs(a))

    @property
    def n(self) -> int:
        return self.a.n

    @property
    def max_value(self) -> float:
        """``max phi_tilde = log |a|``."""
        return self.a.log_total

    @property
    def empty(self) -> bool:
        return self.a.total < 1

    @property
    def degenerate(self) -> bool:
        """True when ``|a| = 1`` and the body is the single point ``a_1..a_n``."""
        return self.a.total == 1


@dataclass(frozen=True)
class Hyperplane:
    """The half-space ``alpha . x >= beta`` touching Theta_a at ``anchor``."""

    alpha: np.ndarray
    beta: float
    anchor: SimplexPoint

    def residual(self, x) -> float:
        return float(np.dot(self.alpha, as_point(x).as_floats()) - self.beta)


def as_region(T) -> ThetaRegion:
    return T if isinstance(T, ThetaRegion) else ThetaRegion(T)


def _decide_near_zero(a: CoeffVector, point: SimplexPoint) -> bool:
    v = phi_tilde_mp(a, point)
    if v < -MP_TIE:
        return False
    if abs(v) <= MP_TIE:
        log.debug("membership tie at %s for a=%s declared member", point.x, a)
    return True


def contains(T, x) -> bool:
    """Whether ``x`` lies in Theta_a; points outside Delta_n give False."""
    T = as_region(T)
    p = as_point(x)
    if p.n != T.n:
        raise ValueError(f"expected {T.n} coordinates, got {p.n}")
    if not p.in_simplex():
        return False
    if T.empty:
        return False
    v = phi_tilde(T.a, p)
    if abs(v) >= NEAR_ZERO:
        return v > 0
    return _decide_near_zero(T.a, p)


def _compositions(n: int, l: int, lo: int = 0) -> Iterator[tuple[int, ...]]:
    """All ``e`` in Z^n with ``e_i >= lo`` and ``|e| <= l``, lexicographically."""
    if n == 0:
        yield ()
        return
    for first in range(lo, l + 1 - lo * (n - 1)):
        for rest in _compositions(n - 1, l - first, lo):
            yield (first,) + rest


def _filter_points(a: CoeffVector, E: list[tuple[int, ...]], q: int, strict: bool) -> list[tuple[int, ...]]:
    if not E:
        return []
    vals = phi_tilde_array(a, np.array(E, dtype=float) / q)
    out = []
    for e, v in zip(E, vals):
        if strict:
            keep = v > INTERIOR_MARGIN
            if not keep and v > INTERIOR_MARGIN - NEAR_ZERO:
                keep = phi_tilde_mp(a, SimplexPoint(tuple(Fraction(c, q) for c in e))) > INTERIOR_MARGIN
        elif abs(v) >= NEAR_ZERO:
            keep = v > 0
        else:
            keep = _decide_near_zero(a, SimplexPoint(tuple(Fraction(c, q) for c in e)))
        if keep:
            out.append(e)
    return out


def lattice_points(T, l: int) -> list[tuple[int, ...]]:
    """Exponent vectors ``e`` with ``|e| <= l`` and ``e / l`` in Theta_a.

    Enumerated lexicographically; near-boundary decisions use the
    high-precision path.
    """
    T = as_region(T)
    if l < 1:
        raise ValueError("level must be a positive integer")
    if T.empty:
        return []
    return _filter_points(T.a, list(_compositions(T.n, l)), l, strict=False)


def endpoints_p1(T) -> tuple[float, float]:
    """``(inf Theta_a, sup Theta_a)`` for n = 1, to absolute accuracy 1e-12.

    Raises:
        WrongDimension: n != 1.
        EmptyRegion: |a| < 1.
    """
    T = as_region(T)
    if T.n != 1:
        raise WrongDimension(f"endpoints are defined for n = 1, got n = {T.n}")
    if T.empty:
        raise EmptyRegion(f"Theta is empty for |a| = {T.a.total} < 1")
    a0, a1 = T.a.a
    if T.degenerate:
        return float(a1), float(a1)
    peak = float(a1 / T.a.total)
    f = lambda x: phi_tilde(T.a, (x,))  # noqa: E731
    lower = 0.0 if a0 >= 1 else brentq(f, 0.0, peak, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    upper = 1.0 if a1 >= 1 else brentq(f, peak, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return lower, upper


def _lift_weights(n: int, alpha) -> np.ndarray:
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    if alpha.shape[0] == n:
        alpha = np.concatenate([[0.0], alpha])
    elif alpha.shape[0] != n + 1:
        raise ValueError(f"weights must have length {n} or {n + 1}")
    if np.any(alpha < 0):
        raise ValueError("weights must be nonnegative")
    if not np.any(alpha > 0):
        raise ValueError("weights must not all vanish")
    return alpha


def _exp_family_minimizer(a: CoeffVector, c: np.ndarray) -> np.ndarray:
    """Minimise ``c . x_lifted`` over lifted Theta_a (|a| >= 1).

    The optimum is ``x_i proportional to a_i exp(-t c_i)`` where ``t >= 0``
    solves ``phi = 0``; phi decreases monotonically in ``t``.  If phi stays
    nonnegative as t grows, the optimum sits on the face where ``c`` is
    minimal.
    """
    la = np.asarray(a.log_a)
    c = c - c.min()
    face = c == 0
    if logsumexp(la[face]) >= 0:
        x = np.where(face, np.exp(la - logsumexp(la[face])), 0.0)
        return x

    def point(t):
        w = la - t * c
        return np.exp(w - logsumexp(w))

    def F(t):
        # phi(x(t)) = t c.x(t) + log Z(t)
        x = point(t)
        return t * float(np.dot(c, x)) + float(logsumexp(la - t * c))

    if F(0.0) <= 0:
        return point(0.0)
    hi = 1.0
    while F(hi) > 0:
        hi *= 2
        if hi > 1e12:
            raise RuntimeError("failed to bracket the minimiser")
    t = brentq(F, 0.0, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)
    return point(t)


def minimize_linear(T, alpha, level: int = 1) -> tuple[SimplexPoint, float]:
    """Minimum of a nonnegative linear form over ``level * Theta_a``.

    ``alpha`` has length n (form in affine coordinates) or n + 1 (form in
    barycentric coordinates, reduced through ``x_0 = 1 - sum x``).

    Raises:
        EmptyRegion: |a| < 1.
    """
    T = as_region(T)
    if T.empty:
        raise EmptyRegion(f"Theta is empty for |a| = {T.a.total} < 1")
    c = _lift_weights(T.n, alpha)
    if T.n == 1:
        lo, hi = endpoints_p1(T)
        slope = c[1] - c[0]
        x1 = lo if slope >= 0 else hi
        lifted = np.array([1.0 - x1, x1])
    else:
        lifted = _exp_family_minimizer(T.a, c)
    value = float(np.dot(c, lifted))
    x = tuple(float(level * v) for v in lifted[1:])
    return SimplexPoint(x), level * value


def supporting_hyperplane(T, b) -> Hyperplane:
    """The unique supporting hyperplane of Theta_a at a boundary point ``b``.

    Interior points of Delta_n use the normalised gradient of phi_tilde; on
    the face ``x_0 = 0`` the hyperplane is ``x_1 + ... + x_n = 1`` and on
    ``x_i = 0`` it is ``x_i = 0``.

    Raises:
        EmptyRegion: |a| <= 1.
        TooManyZeros: two or more barycentric coordinates of ``b`` vanish.
        NotBoundary: ``b`` is not on the boundary of Theta_a.
    """
    T = as_region(T)
    if T.a.total <= 1:
        raise EmptyRegion("supporting hyperplanes need |a| > 1")
    p = as_point(b)
    if not p.in_simplex():
        raise NotBoundary(f"{p.x} is outside the simplex")
    lifted = [float(v) for v in p.lift()]
    zeros = [i for i, v in enumerate(lifted) if abs(v) <= FLOAT_TOL]
    if len(zeros) >= 2:
        raise TooManyZeros(f"{p.x} has {len(zeros)} vanishing barycentric coordinates")
    if zeros:
        if not contains(T, p):
            raise NotBoundary(f"{p.x} is not in Theta_a")
        i = zeros[0]
        if i == 0:
            return Hyperplane(-np.ones(T.n), -1.0, p)
        alpha = np.zeros(T.n)
        alpha[i - 1] = 1.0
        return Hyperplane(alpha, 0.0, p)
    v = phi_tilde(T.a, p)
    if abs(v) > NEAR_ZERO:
        raise NotBoundary(f"phi_tilde = {v:.3e} at {p.x}")
    g = phi_grad(T.a, p)
    # Theta lies where the concave phi_tilde increases: grad . (x - b) >= 0
    alpha = g / np.linalg.norm(g)
    return Hyperplane(alpha, float(np.dot(alpha, p.as_floats())), p)


def interior_rational_points(T, denominator_bound: int) -> list[SimplexPoint]:
    """Points of ``(1/q) Z^n`` strictly inside Theta_a and Delta_n.

    Interior means every barycentric coordinate is positive and
    ``phi_tilde > 1e-9``.  Returns an empty list when Theta_a is a point.

    Raises:
        EmptyRegion: |a| < 1.
    """
    T = as_region(T)
    q = int(denominator_bound)
    if q < 1:
        raise ValueError("denominator bound must be positive")
    if T.empty:
        raise EmptyRegion(f"Theta is empty for |a| = {T.a.total} < 1")
    if T.degenerate:
        return []
    E = [e for e in _compositions(T.n, q - 1, lo=1)]
    keep = _filter_points(T.a, E, q, strict=True)
    return [SimplexPoint(tuple(Fraction(c, q) for c in e)) for e in keep]


def sample_points(T, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform rejection samples of Theta_a, shape ``(count, n)``."""
    T = as_region(T)
    if T.empty:
        raise EmptyRegion("cannot sample an empty region")
    if T.degenerate:
        x, _ = phi_max(T.a)
        return np.tile(x.as_floats(), (count, 1))
    out = []
    while sum(len(o) for o in out) < count:
        X = rng.dirichlet(np.ones(T.n + 1), size=max(4 * count, 256))[:, 1:]
        out.append(X[phi_tilde_array(T.a, X) >= 0])
    return np.concatenate(out)[:count]


def outline(T, samples: int = 201) -> list[tuple[float, ...]]:
    """Plot data for Theta_a.

    n = 1: rows ``(x, phi_tilde(x))`` on a uniform grid of [0, 1].
    n = 2: a closed boundary polyline, found by bisection along rays from
    the maximiser.
    """
    T = as_region(T)
    if T.n == 1:
        xs = np.linspace(0.0, 1.0, samples)
        return [(float(x), float(v)) for x, v in zip(xs, phi_tilde_array(T.a, xs[:, None]))]
    if T.n != 2:
        raise WrongDimension("outline supports n = 1 and n = 2")
    if T.empty:
        return []
    centre = phi_max(T.a)[0].as_floats()
    rows = []
    for ang in np.linspace(0.0, 2 * math.pi, samples):
        d = np.array([math.cos(ang), math.sin(ang)])
        # largest step that stays inside the simplex
        limits = [-centre[i] / d[i] for i in range(2) if d[i] < 0]
        if d.sum() > 0:
            limits.append((1 - centre.sum()) / d.sum())
        smax = min(limits) if limits else 1.0
        f = lambda s: float(phi_tilde_array(T.a, centre + s * d)[0])  # noqa: E731
        s = smax if f(smax) >= 0 else brentq(f, 0.0, smax, xtol=1e-13)
        rows.append(tuple(float(v) for v in centre + s * d))
    return rows

