"""Exit criteria of the package, one test per criterion.

Each test records PASS/FAIL with its runtime; the lines are printed in the
terminal summary (see conftest.py).  Run alone with
``pytest tests/test_acceptance.py -m acceptance``.
"""

import itertools
import math
import time
from contextlib import contextmanager
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from arakelov_pn.characteristic import (
    MP_PREC,
    as_coeffs,
    legendre_fenchel_check,
    phi,
    phi_max,
    phi_tilde,
    phi_tilde_array,
    phi_tilde_mp,
    stirling_bracket,
    weighted_log_gap,
)
from arakelov_pn.errors import NotPseudoEffective
from arakelov_pn.fujita import ConcaveEnvelope, approximate, select_delta
from arakelov_pn.norms import (
    gram_matrix,
    hermitian_det_closed_form,
    chi_hat,
    inner_product,
    inner_product_numeric,
    sup_norm_numeric,
    sup_norm_sq,
    volume_form_mass,
)
from arakelov_pn.sections import (
    count_ellipsoid_lattice,
    find_small_section,
    h0_nonzero,
    small_sections,
    volume_estimate_sequence,
)
from arakelov_pn.theta import _compositions, lattice_points, minimize_linear, sample_points
from arakelov_pn.volume import classify, construct_big_without_sections, deg_hat, geography_grid, vol_hat
from arakelov_pn.zariski import decompose, g_a, green_positive, log_radii, mu_multiplicities

import conftest
from oracles import linear_min_ref

pytestmark = pytest.mark.acceptance

HALF_PLUS_LOG2 = 0.5 + math.log(2)


@contextmanager
def criterion(number, limit=None):
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        conftest.ACCEPTANCE[number] = (False, f"{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}")
        raise
    elapsed = time.perf_counter() - start
    ok = limit is None or elapsed < limit
    budget = f" (limit {limit:g} s)" if limit is not None else ""
    conftest.ACCEPTANCE[number] = (ok, f"{elapsed:.2f} s{budget}")
    assert ok, f"runtime {elapsed:.2f} s exceeds {limit} s"


def test_criterion_01_unit_coefficients():
    with criterion(1, limit=1.0):
        assert abs(vol_hat((1, 1)) - 0.5) < 1e-8
        assert abs(deg_hat((1, 1)) - 0.5) < 1e-8


def test_criterion_02_ample_volume():
    with criterion(2):
        v, d = vol_hat((2, 2)), deg_hat((2, 2))
        assert abs(v - HALF_PLUS_LOG2) < 1e-8
        assert abs(d - v) < 2e-8


def test_criterion_03_big_not_nef_gap():
    with criterion(3):
        a = (2, Fraction(1, 2))
        v1, d1 = vol_hat(a, tol=1e-8), deg_hat(a, tol=1e-8)
        v2, d2 = vol_hat(a, tol=1e-11), deg_hat(a, tol=1e-11)
        assert v2 - d2 > 1e-3
        assert abs(v1 - v2) < 1e-6 and abs(d1 - d2) < 1e-6


def test_criterion_04_geography():
    with criterion(4, limit=5.0):
        grid = geography_grid(64)
        assert len(grid) == 64 * 64
        wrong = 0
        for a0, a1, r in grid:
            expect = (a0 > 1 and a1 > 1, a0 >= 1 and a1 >= 1, a0 + a1 > 1, a0 + a1 >= 1)
            wrong += (r.ample, r.nef, r.big, r.pseudo_effective) != expect
        assert wrong == 0


def test_criterion_05_section_equivalence():
    with criterion(5, limit=60.0):
        # a nonzero small section is searched over all monomials 0..l, so the
        # witness does not depend on the lattice criterion being tested
        for a in [(1, 1), ("1/2", "1/2"), (2, "1/2"), ("0.4", "0.4"), (3, 3)]:
            for l in range(1, 7):
                assert (find_small_section(a, l, "full") is not None) == bool(lattice_points(a, l))
        for l in range(1, 7):
            s = small_sections(("1/2", "1/2"), l)
            want = {(0,) * (l + 1)}
            if l % 2 == 0:
                want |= {s.monomial(l // 2), s.monomial(l // 2, -1)}
            assert s.sections == frozenset(want)


def test_criterion_06_ellipsoid_counts():
    with criterion(6, limit=120.0):
        exact = count_ellipsoid_lattice(gram_matrix((1, 1), 1, "full"), "exact")
        bracket = count_ellipsoid_lattice(gram_matrix((1, 1), 1, "full"), "bracket")
        assert exact.count == 9
        assert bracket.lower_log <= math.log(9) <= bracket.upper_log
        seq = volume_estimate_sequence((2, 2), [50, 100, 200])
        widths = [hi - lo for _, lo, hi in seq]
        assert widths[0] > widths[1] > widths[2]
        _, lo, hi = seq[-1]
        assert lo - 0.15 <= HALF_PLUS_LOG2 <= hi + 0.15


def test_criterion_07_chi_trend():
    with criterion(7, limit=30.0):
        d = deg_hat((1, 1))
        errs = [abs(2 * chi_hat((1, 1), l) / l**2 - d) for l in (25, 50, 100, 200)]
        assert all(x > y for x, y in zip(errs, errs[1:]))
        assert errs[-1] < 0.08


def test_criterion_08_zariski():
    with criterion(8):
        rng = np.random.default_rng(2024)
        radii = log_radii(1000)
        done = 0
        while done < 20:
            a = tuple(Fraction(int(v), 16) for v in rng.integers(1, 48, size=2))
            if sum(a) < 1:
                continue
            done += 1
            Z = decompose(a)
            a0, a1 = as_coeffs(a).as_floats()
            for r, slope in ((Z.r_low, Z.vartheta), (Z.r_high, Z.theta)):
                if 0 < r < math.inf:
                    assert abs(slope * math.log(r * r) - math.log(a0 + a1 * r * r)) <= 1e-9
            for r in radii:
                p = green_positive(Z, r)
                assert p - g_a(a, r) <= 1e-12
                assert p - Z.vartheta * math.log(r * r) >= -1e-12
            m0, m1 = mu_multiplicities(a)
            assert abs(m0 - (1 - Z.theta)) <= 1e-9 and abs(m1 - Z.vartheta) <= 1e-9
            assert abs(minimize_linear(a, (1, 0))[1] - m0) <= 1e-9
        half = decompose(("1/2", "1/2"))
        assert abs(half.vartheta - 0.5) < 1e-12 and abs(half.theta - 0.5) < 1e-12
        assert green_positive(half, 1.0) == 0.0
        with pytest.raises(NotPseudoEffective):
            decompose(("0.4", "0.4"))


def test_criterion_09_big_without_sections():
    with criterion(9, limit=10.0):
        for n, l in [(1, 2), (1, 3), (2, 2)]:
            a = construct_big_without_sections(n, l)
            assert a.total > 1 and classify(a).big
            for k in range(1, l + 1):
                assert lattice_points(a, k) == [] and not h0_nonzero(a, k)


def test_criterion_10_fujita():
    with criterion(10, limit=60.0):
        for a in [(1, 1), (2, 2)]:
            cert = approximate(a, 0.05)
            assert cert.integral > vol_hat(a) - 0.05
            steps = [v for _, v in cert.history]
            assert all(x <= y for x, y in zip(steps, steps[1:]))
            env = ConcaveEnvelope(cert.points, cert.values)
            S = sample_points(a, 10_000, np.random.default_rng(7))
            mask = np.array([env.contains(s) for s in S])
            vals = np.array([env(s) for s in S[mask]])
            assert np.all(vals <= phi_tilde_array(a, S[mask]) + 1e-9)
            assert select_delta(a, cert.points, 0.05) >= 2.0**-20


def _identity_max_bound(rng):
    for _ in range(10_000):
        n = int(rng.integers(1, 4))
        a = as_coeffs(rng.uniform(0.1, 3.0, size=n + 1))
        x = rng.dirichlet(np.ones(n + 1))
        assert phi(a, x) <= a.log_total + 1e-12
    _, top = phi_max((3, 1))
    assert abs(top - math.log(4)) < 1e-15


def _identity_jensen_gap(rng):
    for _ in range(10_000):
        k = int(rng.integers(2, 6))
        alpha = rng.dirichlet(np.ones(k))
        assert weighted_log_gap(alpha, rng.uniform(0.01, 10, size=k), rng.uniform(0.01, 10, size=k)) >= -1e-12


def _identity_stirling():
    for n in (1, 2, 3):
        a = (2, 1, 1, 1)[: n + 1]
        for l in range(1, 31):
            for e in _compositions(n, l):
                k = (l - sum(e),) + e
                c, r = stirling_bracket(a, l, k)
                assert abs(c - phi(a, [v / l for v in k])) <= r


def _identity_norm_oracles():
    for a in [(1, 1), (2, "1/2"), ("1/3", 3)]:
        for l in range(0, 5):
            for e in range(l + 1):
                assert abs(sup_norm_numeric(a, l, (e,)) / sup_norm_sq(a, l, (e,)) - 1) < 1e-6
                exact = float(inner_product(a, l, (e,), (e,)))
                assert abs(inner_product_numeric(a, l, (e,), (e,)) / exact - 1) < 1e-6


def _identity_legendre_fenchel(rng):
    for _ in range(1000):
        n = int(rng.integers(1, 4))
        a = as_coeffs(rng.uniform(0.1, 3.0, size=n + 1))
        x = tuple(rng.dirichlet(np.ones(n + 1) * 2)[1:])
        assert abs(legendre_fenchel_check(a, x) + phi_tilde(a, x)) < 1e-10


def _identity_determinant(rng):
    for _ in range(1000):
        t = rng.normal(size=4)
        alpha = rng.normal(size=4) + 1j * rng.normal(size=4)
        M = np.diag(t) - np.outer(alpha, alpha.conj())
        det = np.linalg.det(M).real
        scale = max(1.0, np.abs(M).max() ** 4)
        assert abs(hermitian_det_closed_form(t, alpha) - det) <= 1e-9 * scale


def _identity_mass():
    for a in [(1, 1), (2, "1/2"), ("1/5", 7), (1, 1, 1), (3, "1/2", 2)]:
        assert abs(volume_form_mass(a) - 1) < 1e-8


def _identity_scaling():
    # phi_{ta}(x) = phi_a(x) + log t on the lifted simplex, checked at 256-bit precision
    for a, t in itertools.product([(2, "1/2"), ("1/3", 1, 2)], [Fraction(1, 2), Fraction(2), Fraction(7, 3)]):
        A = as_coeffs(a)
        for x in _compositions(A.n, 6):
            pt = tuple(Fraction(v, 7) for v in x)
            with mpmath.workprec(MP_PREC):
                log_t = mpmath.log(mpmath.mpf(t.numerator) / t.denominator)
                diff = phi_tilde_mp(A.scaled(t), pt) - phi_tilde_mp(A, pt) - log_t
                assert abs(diff) < mpmath.mpf(2) ** (16 - MP_PREC)


def _identity_interior_minimisers(rng):
    for a in [("1/2", 1, 1), ("0.9", "0.3", "0.4"), ("1/3", 2, "1/2", 1), ("0.5", "0.5", "0.25"), ("0.7", 2, 3)]:
        A = as_coeffs(a)
        for _ in range(10):
            alpha = rng.uniform(0.05, 1.0, size=A.n)
            x, _ = minimize_linear(A, alpha)
            lifted = [1 - math.fsum(x.x)] + list(x.x)
            assert min(lifted) > 0
            ref = linear_min_ref(A.a, [0.0] + list(alpha))
            assert all(abs(g / float(w) - 1) < 1e-6 for g, w in zip(lifted, ref))


def test_criterion_11_identity_suites():
    with criterion(11):
        rng = np.random.default_rng(11)
        _identity_max_bound(rng)
        _identity_jensen_gap(rng)
        _identity_stirling()
        _identity_norm_oracles()
        _identity_legendre_fenchel(rng)
        _identity_determinant(rng)
        _identity_mass()
        _identity_scaling()
        _identity_interior_minimisers(rng)
