"""Arithmetic positivity of the toric-style divisors D_a on projective space.

The divisor ``D_a = (H_0, log(a_0 + a_1|z_1|^2 + ... + a_n|z_n|^2))`` on
P^n over Z is governed by the concave function
``phi_a(x) = -sum x_i log x_i + sum x_i log a_i`` on the simplex.  This
package evaluates that function and its superlevel body Theta_a, the
norms of monomial sections, small sections and lattice counts, arithmetic
volumes and degrees, the Zariski decomposition on P^1, and concave-envelope
(Fujita-type) volume certificates.
"""

from .characteristic import CoeffVector, SimplexPoint, as_coeffs, phi, phi_max, phi_tilde
from .errors import ArakelovError, BudgetError, DomainError
from .fujita import approximate, envelope_eval, envelope_integral, select_delta
from .norms import chi_hat, gram_matrix, inner_product, sup_norm_sq
from .sections import count_ellipsoid_lattice, find_small_section, h0_nonzero, small_sections, volume_estimate_sequence
from .theta import ThetaRegion, contains, endpoints_p1, lattice_points, minimize_linear
from .volume import classify, construct_big_without_sections, deg_hat, geography_grid, vol_hat
from .zariski import decompose, mu_multiplicities

__version__ = "0.1.0"

__all__ = [
    "ArakelovError",
    "BudgetError",
    "CoeffVector",
    "DomainError",
    "SimplexPoint",
    "ThetaRegion",
    "approximate",
    "as_coeffs",
    "chi_hat",
    "classify",
    "construct_big_without_sections",
    "contains",
    "count_ellipsoid_lattice",
    "decompose",
    "deg_hat",
    "endpoints_p1",
    "envelope_eval",
    "envelope_integral",
    "find_small_section",
    "geography_grid",
    "gram_matrix",
    "h0_nonzero",
    "inner_product",
    "lattice_points",
    "minimize_linear",
    "mu_multiplicities",
    "phi",
    "phi_max",
    "phi_tilde",
    "select_delta",
    "small_sections",
    "sup_norm_sq",
    "vol_hat",
    "volume_estimate_sequence",
]
