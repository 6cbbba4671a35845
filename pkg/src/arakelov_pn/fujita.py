"""Concave envelopes of phi over rational interior points.

Given points ``x_i`` inside Theta_a with values ``phi_i``, the envelope
``max{ sum l_i phi_i : sum l_i x_i = x, l in simplex }`` is the upper
boundary of the convex hull of the lifted points ``(x_i, phi_i)``.  Since
phi_tilde is concave the envelope lies below it, and refining the point
set pushes its integral up towards the arithmetic volume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .characteristic import SimplexPoint, as_coeffs, as_point, phi_tilde
from .errors import BadLevel, DegenerateHull, NoFeasibleDelta, NotBig, OutsideHull, ResolutionExceeded
from .norms import sup_norm_sq
from .theta import interior_rational_points
from .volume import vol_hat

HULL_TOL = 1e-12
START_Q = 4
MAX_Q = 2**14
MAX_DELTA_BITS = 40


def _coords(points) -> np.ndarray:
    rows = [as_point(p).as_floats() for p in points]
    return np.atleast_2d(np.asarray(rows, dtype=float))


class ConcaveEnvelope:
    """Upper hull of lifted points, supporting evaluation and integration.

    ``pieces`` holds the index tuples of the maximal linear cells: segments
    for n = 1 and triangles for n = 2, ordered lexicographically.

    Raises:
        DegenerateHull: fewer than n + 1 affinely independent points.
        ValueError: n > 2.
    """

    def __init__(self, points, values: Sequence[float]):
        X = _coords(points)
        v = np.asarray(values, dtype=float)
        if len(X) != len(v):
            raise ValueError("points and values differ in length")
        self.X, self.v = X, v
        self.n = X.shape[1]
        if self.n == 1:
            self._build_chain()
        elif self.n == 2:
            self._build_facets()
        else:
            raise ValueError("envelopes are implemented for n <= 2")

    # n = 1 ------------------------------------------------------------
    def _build_chain(self):
        order = sorted(range(len(self.v)), key=lambda i: (self.X[i, 0], -self.v[i]))
        # keep the highest value at each abscissa
        uniq = []
        for i in order:
            if not uniq or self.X[i, 0] != self.X[uniq[-1], 0]:
                uniq.append(i)
        if len(uniq) < 2:
            raise DegenerateHull("need two distinct points for n = 1")
        chain: list[int] = []
        for i in uniq:
            while len(chain) >= 2:
                o, p = chain[-2], chain[-1]
                cross = (self.X[p, 0] - self.X[o, 0]) * (self.v[i] - self.v[o]) - (self.v[p] - self.v[o]) * (
                    self.X[i, 0] - self.X[o, 0]
                )
                if cross >= 0:
                    chain.pop()
                else:
                    break
            chain.append(i)
        self.chain = chain
        self.pieces = [(chain[k], chain[k + 1]) for k in range(len(chain) - 1)]
        self.lo, self.hi = self.X[chain[0], 0], self.X[chain[-1], 0]

    # n = 2 ------------------------------------------------------------
    def _build_facets(self):
        try:
            base = ConvexHull(self.X)
        except QhullError as exc:
            raise DegenerateHull("points are collinear") from exc
        self.domain = base.equations
        # a floor under the domain's vertices makes the lifted hull full-dimensional
        floor = self.v.min() - 1.0
        verts = base.vertices
        lifted = np.vstack(
            [np.column_stack([self.X, self.v]), np.column_stack([self.X[verts], np.full(len(verts), floor)])]
        )
        hull = ConvexHull(lifted)
        m = len(self.X)
        pieces, planes = [], []
        for simplex, eq in zip(hull.simplices, hull.equations):
            if eq[2] <= HULL_TOL or np.any(simplex >= m):
                continue
            tri = tuple(sorted(int(s) for s in simplex))
            area = self._area(tri)
            if area <= 0:
                continue
            pieces.append(tri)
            # z = -(e0 x + e1 y + d) / e2 on this facet
            planes.append((-eq[0] / eq[2], -eq[1] / eq[2], -eq[3] / eq[2]))
        order = sorted(range(len(pieces)), key=lambda k: pieces[k])
        self.pieces = [pieces[k] for k in order]
        self.planes = np.array([planes[k] for k in order])

    def _area(self, tri) -> float:
        p, q, r = (self.X[i] for i in tri)
        return 0.5 * abs((q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]))

    # ------------------------------------------------------------------
    def contains(self, x, tol: float = 1e-12) -> bool:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.n == 1:
            return self.lo - tol <= x[0] <= self.hi + tol
        return bool(np.all(self.domain[:, :2] @ x + self.domain[:, 2] <= tol))

    def weights(self, x) -> tuple[tuple[int, ...], np.ndarray]:
        """Vertices of the cell containing ``x`` and the optimal convex weights."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if not self.contains(x):
            raise OutsideHull(f"{x.tolist()} is outside the convex hull")
        if self.n == 1:
            for i, j in self.pieces:
                if x[0] <= self.X[j, 0] + HULL_TOL:
                    t = (x[0] - self.X[i, 0]) / (self.X[j, 0] - self.X[i, 0])
                    t = min(max(t, 0.0), 1.0)
                    return (i, j), np.array([1.0 - t, t])
            i, j = self.pieces[-1]
            return (i, j), np.array([0.0, 1.0])
        k = int(np.argmin(self.planes[:, :2] @ x + self.planes[:, 2]))
        tri = self.pieces[k]
        P = self.X[list(tri)]
        M = np.array([[P[0, 0], P[1, 0], P[2, 0]], [P[0, 1], P[1, 1], P[2, 1]], [1.0, 1.0, 1.0]])
        lam = np.linalg.solve(M, np.array([x[0], x[1], 1.0]))
        return tri, np.clip(lam, 0.0, 1.0)

    def __call__(self, x) -> float:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.n == 2:
            if not self.contains(x):
                raise OutsideHull(f"{x.tolist()} is outside the convex hull")
            return float(np.min(self.planes[:, :2] @ x + self.planes[:, 2]))
        idx, lam = self.weights(x)
        return float(np.dot(lam, self.v[list(idx)]))

    def cell_volumes(self) -> list[float]:
        if self.n == 1:
            return [float(self.X[j, 0] - self.X[i, 0]) for i, j in self.pieces]
        return [self._area(t) for t in self.pieces]

    @property
    def hull_volume(self) -> float:
        return math.fsum(self.cell_volumes())

    def integral(self) -> float:
        """Exact integral of the envelope: cell volume times mean vertex value."""
        return math.fsum(vol * float(np.mean(self.v[list(c)])) for vol, c in zip(self.cell_volumes(), self.pieces))


def envelope_eval(points, values, x) -> float:
    """Concave envelope of ``(points, values)`` at ``x``.

    Raises:
        OutsideHull: ``x`` is not in the convex hull of ``points``.
        DegenerateHull: the points do not span.
    """
    return ConcaveEnvelope(points, values)(x)


def point_values(a, points) -> list[float]:
    return [phi_tilde(a, p) for p in points]


def envelope_integral(a, points, values=None) -> float:
    """``(n+1)!/2`` times the integral of the envelope over the hull of ``points``.

    ``values`` defaults to ``phi_tilde`` at the points.
    """
    a = as_coeffs(a)
    if values is None:
        values = point_values(a, points)
    env = ConcaveEnvelope(points, values)
    return math.factorial(a.n + 1) / 2 * env.integral()


@dataclass
class EnvelopeCert:
    a: tuple[Fraction, ...]
    q: int
    points: list[SimplexPoint]
    values: list[float]
    facets: list[tuple[int, ...]]
    integral: float
    vol_hat: float
    epsilon: float
    history: list[tuple[int, float]] = field(default_factory=list)

    @property
    def gap(self) -> float:
        return self.vol_hat - self.integral

    def to_json(self) -> dict:
        return {
            "a": [f"{v.numerator}/{v.denominator}" for v in self.a],
            "q": self.q,
            "points": [[_rational(c) for c in p.x] for p in self.points],
            "values": self.values,
            "facets": [list(f) for f in self.facets],
            "integral": self.integral,
            "vol_hat": self.vol_hat,
            "epsilon": self.epsilon,
            "gap": self.gap,
            "history": [list(h) for h in self.history],
        }


def approximate(a, epsilon: float, tol: float = 1e-10) -> EnvelopeCert:
    """Refine a rational grid until the envelope integral is within ``epsilon``.

    The denominator doubles from 4; a grid with too few interior points
    contributes integral 0.

    Raises:
        NotBig: |a| <= 1.
        ResolutionExceeded: the denominator would exceed 2^14.
    """
    a = as_coeffs(a)
    if a.total <= 1:
        raise NotBig(f"|a| = {a.total} <= 1")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    target = vol_hat(a, tol)
    history = []
    q = START_Q
    while q <= MAX_Q:
        pts = interior_rational_points(a, q)
        vals = point_values(a, pts)
        try:
            env = ConcaveEnvelope(pts, vals)
            integral = math.factorial(a.n + 1) / 2 * env.integral()
            facets = env.pieces
        except DegenerateHull:
            integral, facets = 0.0, []
        history.append((q, integral))
        if integral > target - epsilon:
            return EnvelopeCert(a.a, q, pts, vals, facets, integral, target, epsilon, history)
        q *= 2
    raise ResolutionExceeded(f"no certificate with denominator <= {MAX_Q}")


def select_delta(a, points, epsilon: float, tol: float = 1e-10) -> float:
    """Largest ``delta = 2^-k`` (``k <= 40``) keeping the shifted data admissible.

    Shifting the coefficients to ``exp(-delta) a`` lowers every value by
    ``delta``; we need all shifted values positive and the shifted envelope
    integral above ``vol_hat(a) - epsilon``.

    Raises:
        NoFeasibleDelta: no such delta.
    """
    a = as_coeffs(a)
    vals = np.asarray(point_values(a, points))
    env = ConcaveEnvelope(points, vals)
    scale = math.factorial(a.n + 1) / 2
    base = scale * env.integral()
    area = scale * env.hull_volume
    target = vol_hat(a, tol) - epsilon
    lowest = float(vals.min())
    for k in range(MAX_DELTA_BITS + 1):
        delta = 2.0**-k
        if lowest - delta > 0 and base - delta * area > target:
            return delta
    raise NoFeasibleDelta("no dyadic delta satisfies both conditions")


def _rational(c) -> str:
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


def _common_denominator(points) -> int:
    if not all(p.exact for p in points):
        raise ValueError("points must have rational coordinates")
    dens = [Fraction(c).denominator for p in points for c in p.x]
    return reduce(math.lcm, dens, 1)


def envelope_norm_bound_check(a, points, l: int, e, rtol: float = 1e-9) -> bool:
    """Compare the envelope bound on ``|z^e|^2`` with the product of vertex sup-norms.

    With ``l_0`` the common denominator of the points and ``lambda`` the
    optimal weights at ``e/l``, checks
    ``exp(-l sum lambda_i phi_i) = prod sup_norm_sq(a, l_0, l_0 x_i)^(lambda_i l / l_0)``
    in logarithmic form.

    Raises:
        BadLevel: ``l`` is not a positive multiple of ``l_0``.
        OutsideHull: ``e / l`` is outside the hull.
    """
    a = as_coeffs(a)
    points = [as_point(p) for p in points]
    l0 = _common_denominator(points)
    if l <= 0 or l % l0:
        raise BadLevel(f"level {l} is not a multiple of the common denominator {l0}")
    e = np.atleast_1d(np.asarray(e, dtype=float))
    vals = point_values(a, points)
    env = ConcaveEnvelope(points, vals)
    idx, lam = env.weights(e / l)
    lhs = -l * math.fsum(w * vals[i] for w, i in zip(lam, idx))
    rhs = 0.0
    for w, i in zip(lam, idx):
        ei = tuple(int(Fraction(c) * l0) for c in points[i].x)
        rhs += w * l / l0 * math.log(sup_norm_sq(a, l0, ei))
    return abs(lhs - rhs) <= rtol * max(1.0, abs(lhs))
