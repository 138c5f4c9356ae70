"""Verification toolkit for weighted extremal toric Kahler geometry.

Two pillars: interval profiles for circle-invariant metrics on a ruled
surface over a fixed base (the `ansatz` module), and the weighted Futaki
obstruction on the blow-up moment polygon (`polytope`, `toric_metric`,
`invariants`, `catalog`).  The `suites` module packages every headline
claim as a reproducible pass/fail report; `cli` exposes the lot.
"""

from .ansatz import (AnsatzProfile, CkemResult, PerturbedProfile,
                     calabi_energy, closed_form_coefficients, criticality_test,
                     default_bump, find_ckem, futaki_character_profile,
                     invariance_test, ode_residual, perturbed,
                     positivity_certificate, profile_csv, profile_from_json,
                     profile_to_json, random_bump, scalar_curvature_profile,
                     solve_boundary_value, solve_with_base_scalar,
                     unit_interval_special_case, weighted_average_profile,
                     weighted_integral)
from .catalog import (CatalogEntry, OffsetSearchResult, alpha_root,
                      catalog_csv, catalog_entries, critical_search,
                      offset_window, quartic, ray_localization,
                      search_vanishing_offset, verify_vanishing)
from .errors import (DegeneracyError, InteriorDomainError, NodeEvaluationError,
                     ParameterDomainError, PositivityError)
from .invariants import WeightedFutakiEvaluator
from .plotting import plot_profile
from .polytope import (AffineHamiltonian, Facet, MomentPolytope,
                       QuadratureRule, affine_min, integrate,
                       lattice_perimeter, make_blowup_polytope,
                       polygon_quadrature, standard_simplex)
from .report import (VerificationReport, emit, make_report, reports_from_json,
                     reports_to_csv, reports_to_json)
from .suites import SUITES, SuiteConfig, run_suite
from .toric_metric import (ToricMetricModel, abreu_scalar_curvature,
                           guillemin_potential, inverse_hessian,
                           metric_hessian, scalar_curvature_field,
                           toric_laplacian)

__version__ = "0.1.0"
