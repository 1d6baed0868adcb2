"""Landau-Ginzburg superpotentials of toric and almost-toric manifolds.

Moment polytopes, exact Laurent arithmetic, toric and chart superpotentials,
critical points, quantum c1 benchmarks and wall-crossing gluings.
"""

__version__ = "0.1.0"

from .critical import CriticalPoint, SolverConfig, filter_in_domain, hirzebruch_critical, poly_roots, solve_critical
from .laurent import LaurentPoly, LaurentRational, rational_eq, substitute
from .polytope import LatticePolytope, inflate, is_delzant, is_monotone, log_map, parse_polytope
from .qcoh import c1_matrix_cpn, c1_matrix_p1p1, char_poly, eigenvalues, match_multisets
from .superpotential import SuperpotentialSpec, family, toric_superpotential
from .wallcross import SubstitutionMap, lost_values, monodromy, verify_chart_identity, wall_map

__all__ = [
    "CriticalPoint", "SolverConfig", "filter_in_domain", "hirzebruch_critical", "poly_roots", "solve_critical",
    "LaurentPoly", "LaurentRational", "rational_eq", "substitute",
    "LatticePolytope", "inflate", "is_delzant", "is_monotone", "log_map", "parse_polytope",
    "c1_matrix_cpn", "c1_matrix_p1p1", "char_poly", "eigenvalues", "match_multisets",
    "SuperpotentialSpec", "family", "toric_superpotential",
    "SubstitutionMap", "lost_values", "monodromy", "verify_chart_identity", "wall_map",
]
