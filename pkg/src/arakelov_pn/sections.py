"""Small sections and lattice points in L^2 ellipsoids.

At tiny levels the small sections of ``l D_a`` on P^1 are enumerated by
brute force: integer coefficient vectors inside the L^2 ball (a necessary
condition, the volume form having mass one) filtered by a numerical
sup-norm.  At larger levels only counts are needed, and the number of
integer points of the diagonal ellipsoid ``sum d_e x_e^2 <= 1`` is either
counted exactly or bracketed between a Minkowski lower bound and a box
upper bound.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import mpmath
import numpy as np
from scipy.optimize import minimize

from .characteristic import as_coeffs, phi_tilde_mp
from .errors import (
    BudgetExceeded,
    ModeBudget,
    NoSections,
    NotBig,
    UpperBoundInvalid,
    WrongDimension,
)
from .norms import GramMatrix, gram_matrix, inner_product, log_ball_volume, log_sup_norm_sq
from .theta import NEAR_ZERO, lattice_points

SUP_TOL = 1e-9
BOUNDARY_BAND = 1e-6
#: at most this many monomials in brute-force enumeration
MAX_SUPPORT = 12
EXACT_MAX_DIM = 8


@dataclass(frozen=True)
class EllipsoidCount:
    l: int
    m: int
    mode: str
    count_log: float
    lower_log: float
    upper_log: float
    count: int | None = None

    def normalized(self, n: int) -> tuple[float, float]:
        """``(n+1)! log# / l^{n+1}`` for the lower and upper bounds."""
        scale = math.factorial(n + 1) / self.l ** (n + 1)
        return self.lower_log * scale, self.upper_log * scale

    def to_json(self, n: int) -> dict:
        lo, hi = self.normalized(n)
        out = {
            "l": self.l,
            "m": self.m,
            "mode": self.mode,
            "lower_log": self.lower_log,
            "upper_log": self.upper_log,
            "normalized_low": lo,
            "normalized_high": hi,
        }
        if self.count is not None:
            out["count"] = str(self.count)
        return out


def _log_inverse(d: Fraction) -> float:
    return math.log(d.denominator) - math.log(d.numerator)


def _radius(rem: Fraction, d: Fraction) -> int:
    """Largest integer ``x`` with ``x^2 d <= rem``."""
    if rem < 0:
        return -1
    q = rem / d
    return math.isqrt(q.numerator // q.denominator)


def _count_exact(diag: list[Fraction], max_work: float) -> int:
    # smallest radius outermost keeps the search tree narrow
    diag = sorted(diag, reverse=True)
    work = math.prod(2 * _radius(Fraction(1), d) + 1 for d in diag[:-1])
    if work > max_work:
        raise ModeBudget(f"exact enumeration needs ~{work:.3g} steps")

    def rec(i: int, rem: Fraction) -> int:
        d = diag[i]
        r = _radius(rem, d)
        if i == len(diag) - 1:
            return 2 * r + 1
        total = rec(i + 1, rem)
        for x in range(1, r + 1):
            total += 2 * rec(i + 1, rem - x * x * d)
        return total

    return rec(0, Fraction(1)) if diag else 1


def count_ellipsoid_lattice(G: GramMatrix, mode: str = "bracket", max_work: float = 5e7) -> EllipsoidCount:
    """Integer points of ``{x : sum_e d_e x_e^2 <= 1}`` for a diagonal Gram matrix.

    Bracket mode uses ``vol(K) / 2^m`` from below and the box
    ``prod [-1/sqrt(d_e), 1/sqrt(d_e)]`` from above, the latter requiring
    every ``d_e <= 1``.

    Raises:
        ModeBudget: exact mode with ``m > 8`` or too much work.
        UpperBoundInvalid: bracket mode with some ``d_e > 1``.
    """
    diag = list(G.diag)
    m = len(diag)
    if mode == "exact":
        if m > EXACT_MAX_DIM:
            raise ModeBudget(f"exact counting is limited to m <= {EXACT_MAX_DIM}, got {m}")
        count = _count_exact(diag, max_work)
        lc = math.log(count)
        return EllipsoidCount(G.l, m, "exact", lc, lc, lc, count)
    if mode != "bracket":
        raise ValueError(f"unknown mode {mode!r}")
    if any(d > 1 for d in diag):
        raise UpperBoundInvalid("box upper bound needs every diagonal entry <= 1")
    if m == 0:
        return EllipsoidCount(G.l, 0, "bracket", 0.0, 0.0, 0.0)
    half = math.fsum(0.5 * _log_inverse(d) for d in diag)
    lower = half + log_ball_volume(m) - m * math.log(2)
    upper = half + m * math.log(3)
    return EllipsoidCount(G.l, m, "bracket", 0.5 * (lower + upper), lower, upper)


def volume_estimate_sequence(a, levels: Sequence[int]) -> list[tuple[int, float, float]]:
    """Normalised L^2 lattice-count brackets ``(l, low, high)``.

    Raises:
        NotBig: |a| <= 1.
    """
    a = as_coeffs(a)
    if a.total <= 1:
        raise NotBig(f"|a| = {a.total} <= 1")
    out = []
    for l in levels:
        c = count_ellipsoid_lattice(gram_matrix(a, l, "theta"), "bracket")
        lo, hi = c.normalized(a.n)
        out.append((l, lo, hi))
    return out


def h0_nonzero(a, l: int) -> bool:
    """Whether ``l D_a`` has a nonzero small section (lattice criterion)."""
    return bool(lattice_points(a, l))


def generators(a, l: int) -> list[tuple[int, ...]]:
    """Exponents whose monomials span the small sections of ``l D_a``.

    Raises:
        NoSections: no small sections at this level.
    """
    pts = lattice_points(a, l)
    if not pts:
        raise NoSections(f"no small sections at level {l}")
    return pts


def _sup_grid(l: int, angles: int = 64, radii: int = 256):
    # homogeneous coordinates T0 = cos s, |T1| = sin s, s in [0, pi/2]
    s = np.linspace(0.0, math.pi / 2, radii)
    psi = np.linspace(0.0, 2 * math.pi, angles, endpoint=False)
    return np.meshgrid(s, psi, indexing="ij")


def _log_section_density(coeffs: dict[int, int], a0: float, a1: float, l: int, s, psi):
    s = np.asarray(s, dtype=float)
    psi = np.asarray(psi, dtype=float)
    c, sn = np.cos(s), np.sin(s)
    p = np.zeros(np.broadcast(s, psi).shape, dtype=complex)
    for e, ce in coeffs.items():
        p = p + ce * c ** (l - e) * sn**e * np.exp(1j * e * psi)
    with np.errstate(divide="ignore"):
        return 2 * np.log(np.abs(p)) - l * np.log(a0 * c**2 + a1 * sn**2)


def section_sup_norm_sq(a, l: int, coeffs: dict[int, int]) -> float:
    """Numerical ``sup |sum c_e z^e|^2 exp(-l g_a)`` over P^1(C).

    Grid of 256 radii by 64 phases in homogeneous coordinates, then local
    refinement from the best grid points.
    """
    a = as_coeffs(a)
    if a.n != 1:
        raise WrongDimension("section sup-norms are implemented for n = 1")
    coeffs = {int(e): int(c) for e, c in coeffs.items() if c}
    if not coeffs:
        return 0.0
    a0, a1 = (float(v) for v in a.a)
    S, P = _sup_grid(l)
    vals = _log_section_density(coeffs, a0, a1, l, S, P)
    best = float(vals.max())
    flat = np.argsort(vals, axis=None)[-4:]
    for idx in flat:
        i, j = np.unravel_index(idx, vals.shape)
        f = lambda v: -float(_log_section_density(coeffs, a0, a1, l, v[0], v[1]))  # noqa: E731
        res = minimize(
            f, [S[i, j], P[i, j]], method="L-BFGS-B",
            bounds=[(0.0, math.pi / 2), (None, None)], options={"ftol": 1e-15, "gtol": 1e-12},
        )
        if np.isfinite(res.fun):
            best = max(best, -float(res.fun))
    return math.exp(best)


@dataclass(frozen=True)
class SmallSectionSet:
    """Small sections as coefficient vectors ``(c_0, ..., c_l)`` of ``sum c_e z^e``.

    ``boundary`` lists accepted sections whose numerical sup-norm fell in
    ``(1 - 1e-6, 1 + 1e-9]`` and whose membership is therefore not certified.
    """

    l: int
    support: tuple[int, ...]
    sections: frozenset
    boundary: frozenset = field(default_factory=frozenset)

    def __len__(self):
        return len(self.sections)

    def __contains__(self, item):
        return tuple(item) in self.sections

    def __iter__(self):
        return iter(sorted(self.sections))

    def nonzero(self) -> bool:
        return any(any(c) for c in self.sections)

    def monomial(self, e: int, c: int = 1) -> tuple[int, ...]:
        v = [0] * (self.l + 1)
        v[e] = c
        return tuple(v)


def _ellipsoid_points(diag: list[Fraction], cap: int) -> Iterator[tuple[int, ...]]:
    produced = 0

    def rec(i: int, rem: Fraction):
        nonlocal produced
        if i == len(diag):
            produced += 1
            if produced > cap:
                raise BudgetExceeded(f"more than {cap} L^2 candidates")
            yield ()
            return
        r = _radius(rem, diag[i])
        for x in range(-r, r + 1):
            for tail in rec(i + 1, rem - x * x * diag[i]):
                yield (x,) + tail

    yield from rec(0, Fraction(1))


def _monomial_is_small(a, l: int, e: int, c: int) -> bool:
    # c^2 exp(-l phi) <= 1  <=>  l phi(e/l) - 2 log|c| >= 0
    v = -log_sup_norm_sq(a, l, (e,)) - 2 * math.log(abs(c))
    if abs(v) >= NEAR_ZERO:
        return v > 0
    with mpmath.workprec(256):
        exact = l * phi_tilde_mp(a, (Fraction(e, l),)) - 2 * mpmath.log(abs(c))
    return exact >= -mpmath.mpf("1e-30")


def _grid_basis(a, l: int, index: Sequence[int], angles: int, radii: int) -> np.ndarray:
    # row k: monomials z^e of the support, scaled by exp(-l g_a / 2), at grid point k
    a0, a1 = (float(v) for v in a.a)
    S, P = _sup_grid(l, angles, radii)
    S, P = S.ravel(), P.ravel()
    c, sn = np.cos(S), np.sin(S)
    scale = (a0 * c**2 + a1 * sn**2) ** (-l / 2)
    return np.column_stack([scale * c ** (l - e) * sn**e * np.exp(1j * e * P) for e in index])


def _grid_survivors(basis: np.ndarray, cands: np.ndarray) -> np.ndarray:
    # a grid value is a lower bound for the sup, so exceeding 1 rejects rigorously
    vals = np.abs(cands @ basis.T) ** 2
    return vals.max(axis=1) <= 1 + SUP_TOL


class _Classifier:
    """Decides whether integer combinations over ``index`` are small sections."""

    def __init__(self, a, l: int, index: Sequence[int]):
        self.a, self.l, self.index = a, l, list(index)
        self._bases = None

    def _grids(self):
        if self._bases is None:
            self._bases = (_grid_basis(self.a, self.l, self.index, 16, 48), _grid_basis(self.a, self.l, self.index, 64, 256))
        return self._bases

    def decide(self, batch: list[tuple[int, ...]]) -> list[tuple[tuple[int, ...], bool, bool]]:
        """``(candidate, small, boundary)`` for each candidate with two or more terms."""
        if not batch:
            return []
        coarse, fine = self._grids()
        C = np.asarray(batch, dtype=float)
        alive = _grid_survivors(coarse, C)
        idx = np.flatnonzero(alive)
        if len(idx):
            alive[idx] = _grid_survivors(fine, C[idx])
        out = []
        for cand, ok in zip(batch, alive):
            if not ok:
                out.append((cand, False, False))
                continue
            sup = section_sup_norm_sq(self.a, self.l, {e: c for e, c in zip(self.index, cand) if c})
            out.append((cand, sup <= 1 + SUP_TOL, 1 - BOUNDARY_BAND < sup <= 1 + SUP_TOL))
        return out


def _support(a, l: int, support: str) -> list[int]:
    if support == "theta":
        return [e[0] for e in lattice_points(a, l)]
    if support == "full":
        return list(range(l + 1))
    raise ValueError(f"unknown support {support!r}")


def _check_budget(a, l: int) -> None:
    if a.n != 1:
        raise WrongDimension("small sections are enumerated for n = 1 only")
    if l + 1 > MAX_SUPPORT:
        raise BudgetExceeded(f"level {l} exceeds the brute-force budget")


def _vector(l: int, index: Sequence[int], cand: Sequence[int]) -> tuple[int, ...]:
    vec = [0] * (l + 1)
    for e, c in zip(index, cand):
        vec[e] = c
    return tuple(vec)


def small_sections(a, l: int, support: str = "theta", cap: int = 200_000, batch: int = 2048) -> SmallSectionSet:
    """Brute-force the small sections of ``l D_a`` on P^1.

    ``support="theta"`` restricts monomials to ``l Theta_a`` (every small
    section is supported there); ``support="full"`` searches all of
    ``0..l`` and serves as an independent check.  Monomials are decided by
    their closed-form norm; mixed sections are rejected in batches on phase
    grids and the survivors refined numerically.

    Raises:
        WrongDimension: n != 1.
        BudgetExceeded: ``l + 1 > 12`` or more than ``cap`` L^2 candidates.
    """
    a = as_coeffs(a)
    _check_budget(a, l)
    index = _support(a, l, support)
    diag = [inner_product(a, l, (e,), (e,)) for e in index]
    found, flagged = {(0,) * (l + 1)}, set()
    clf = _Classifier(a, l, index)
    pending: list[tuple[int, ...]] = []

    def flush():
        for cand, small, boundary in clf.decide(pending):
            if small:
                found.add(_vector(l, index, cand))
            if boundary:
                flagged.add(_vector(l, index, cand))
        pending.clear()

    for cand in _ellipsoid_points(diag, cap):
        terms = [(e, c) for e, c in zip(index, cand) if c]
        if not terms:
            continue
        if len(terms) == 1:
            (e, c), = terms
            if _monomial_is_small(a, l, e, c):
                found.add(_vector(l, index, cand))
            continue
        pending.append(cand)
        if len(pending) >= batch:
            flush()
    flush()
    return SmallSectionSet(l, tuple(index), frozenset(found), frozenset(flagged))


def find_small_section(a, l: int, support: str = "full", cap: int = 200_000) -> tuple[int, ...] | None:
    """A nonzero small section of ``l D_a`` on P^1, or None if there is none.

    Searches the same candidates as :func:`small_sections` (monomials
    first, as they are decided in closed form) but stops at the first
    witness, so it stays cheap when the full set is astronomically large.
    Proving that no witness exists still enumerates the whole L^2 ball.

    Raises:
        WrongDimension: n != 1.
        BudgetExceeded: ``l + 1 > 12`` or more than ``cap`` L^2 candidates.
    """
    a = as_coeffs(a)
    _check_budget(a, l)
    index = _support(a, l, support)
    for e in index:
        if inner_product(a, l, (e,), (e,)) <= 1 and _monomial_is_small(a, l, e, 1):
            return _vector(l, index, [1 if k == e else 0 for k in index])
    diag = [inner_product(a, l, (e,), (e,)) for e in index]
    clf = _Classifier(a, l, index)
    pending = []
    for cand in itertools.chain(_ellipsoid_points(diag, cap), [None]):
        if cand is not None and sum(1 for c in cand if c) >= 2:
            pending.append(cand)
        if pending and (cand is None or len(pending) >= 2048):
            for got, small, _ in clf.decide(pending):
                if small:
                    return _vector(l, index, got)
            pending = []
    return None


def h0_nonzero_bruteforce(a, l: int, cap: int = 200_000) -> bool:
    """Independent check of ``H^0(l D_a) != {0}`` on P^1.

    Looks for a witness among monomials of all degrees ``0..l`` using the
    numerical sup-norm only; failing that, enumerates the whole L^2 ball.
    """
    a = as_coeffs(a)
    if a.n != 1:
        raise WrongDimension("brute force is implemented for n = 1 only")
    for e in range(l + 1):
        if inner_product(a, l, (e,), (e,)) <= 1 and section_sup_norm_sq(a, l, {e: 1}) <= 1 + SUP_TOL:
            return True
    return find_small_section(a, l, support="full", cap=cap) is not None
