"""Chart gluings across walls: substitution maps, exact identity checks, monodromy.

A :class:`SubstitutionMap` sends each *target* variable to a rational
function of the *source* variables, so ``substitute(W, m)`` rewrites a
potential written in the target chart in terms of the source chart.  For the
CP^2 example the Chekanov chart ``(w, u)`` is the target and the Clifford
chart ``(z1, z2)`` is the source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from . import _exact
from .critical import CriticalPoint, SolverConfig, solve_critical
from .laurent import LaurentPoly, LaurentRational, as_rational, rational_eq, substitute
from .qcoh import MultisetMatch, match_multisets
from .superpotential import SuperpotentialSpec, cp2_chekanov, cp2_clifford, p1p1_chekanov, p1p1_clifford

CLIFFORD = ("z1", "z2")
CHEKANOV = ("w", "u")

LOST_TOL = 1e-8
ZERO_SNAP = 1e-10


class GluingError(ValueError):
    pass


@dataclass(frozen=True)
class SubstitutionMap:
    assignments: tuple[LaurentRational, ...]
    target_names: tuple[str, ...]
    source_names: tuple[str, ...]

    def __post_init__(self):
        vals = tuple(as_rational(a) for a in self.assignments)
        object.__setattr__(self, "assignments", vals)
        if len(vals) != len(self.target_names):
            raise GluingError("one assignment per target variable is required")
        for name, v in zip(self.target_names, vals):
            if v.nvars != len(self.source_names):
                raise GluingError(f"assignment for {name} is not in the source variables")
            if v.is_zero():
                raise GluingError(f"assignment for {name} is zero")

    @property
    def monomial_part(self) -> list[list[int]] | None:
        """Exponent matrix (row per target variable) if every assignment is a bare monomial."""
        rows = []
        for v in self.assignments:
            if not (v.is_polynomial() and v.num.is_monomial()):
                return None
            (exp, pm), c = v.num.terms[0]
            if pm or c != 1:
                return None
            rows.append(list(exp))
        return rows

    def __call__(self, point: Sequence[complex], params: Mapping[str, complex] | None = None) -> tuple[complex, ...]:
        """Numeric image of a source-chart point in the target chart."""
        return tuple(v.eval(point, params) for v in self.assignments)

    def compose(self, other: "SubstitutionMap") -> "SubstitutionMap":
        """``self`` followed by ``other``: substitute(p, self.compose(other)) == substitute(substitute(p, self), other)."""
        if tuple(self.source_names) != tuple(other.target_names):
            raise GluingError(f"cannot compose: {self.source_names} vs {other.target_names}")
        vals = tuple(substitute(v, other) for v in self.assignments)
        return SubstitutionMap(vals, self.target_names, other.source_names)

    def to_text(self) -> dict[str, str]:
        return {t: v.to_text(self.source_names) for t, v in zip(self.target_names, self.assignments)}


def identity_map(names: Sequence[str]) -> SubstitutionMap:
    gens = LaurentPoly.gens(len(names))
    return SubstitutionMap(tuple(gens), tuple(names), tuple(names))


def monomial_map(matrix: Sequence[Sequence[int]], target_names: Sequence[str], source_names: Sequence[str]) -> SubstitutionMap:
    """``t_i -> prod_j s_j ** matrix[i][j]``."""
    vals = tuple(LaurentPoly.monomial(tuple(row)) for row in matrix)
    return SubstitutionMap(vals, tuple(target_names), tuple(source_names))


def wall_map(h: LaurentPoly, pairing: Sequence[int], names: Sequence[str]) -> SubstitutionMap:
    """``z_i -> z_i * h ** pairing[i]`` for a wall factor ``h = 1 + O(z_alpha)``."""
    if h.constant_term() != 1:
        raise GluingError("wall factor must have constant term 1")
    if len(pairing) != h.nvars or len(names) != h.nvars:
        raise GluingError("need one pairing integer per variable")
    hr = LaurentRational(h)
    vals = tuple(LaurentRational(g) * hr ** k for g, k in zip(LaurentPoly.gens(h.nvars), pairing))
    return SubstitutionMap(vals, tuple(names), tuple(names))


# Gluings between the Chekanov chart (w, u) and the Clifford chart (z1, z2).

def quantum_map() -> SubstitutionMap:
    """w = z1/z2, u = z1 + z2."""
    z1, z2 = LaurentPoly.gens(2)
    return SubstitutionMap((z1 / z2, z1 + z2), CHEKANOV, CLIFFORD)


def quantum_inverse_map() -> SubstitutionMap:
    """z1 = u w/(1+w), z2 = u/(1+w)."""
    w, u = LaurentPoly.gens(2)
    return SubstitutionMap((u * w / (1 + w), u / (1 + w)), CLIFFORD, CHEKANOV)


def classical_pos_map() -> SubstitutionMap:
    """w = z1/z2, u = z2 (wall side lambda > 0, no correction)."""
    return monomial_map([[1, -1], [0, 1]], CHEKANOV, CLIFFORD)


def classical_neg_map() -> SubstitutionMap:
    """w = z1/z2, u = z1 (wall side lambda < 0, no correction)."""
    return monomial_map([[1, -1], [1, 0]], CHEKANOV, CLIFFORD)


@dataclass(frozen=True)
class GluingVerdict:
    identity_holds: bool
    transformed: LaurentRational
    expected: LaurentRational

    def to_dict(self, names: Sequence[str] | None = None) -> dict:
        return {
            "identity_holds": self.identity_holds,
            "transformed": self.transformed.to_text(names),
            "expected": self.expected.to_text(names),
        }


def _check_bindings(a: SuperpotentialSpec, b: SuperpotentialSpec) -> None:
    for name in set(a.parameter_bindings) & set(b.parameter_bindings):
        if a.parameter_bindings[name].area != b.parameter_bindings[name].area:
            raise GluingError(f"parameter {name} means different things on the two sides")


def verify_chart_identity(W_src: SuperpotentialSpec, W_dst: SuperpotentialSpec, m: SubstitutionMap) -> GluingVerdict:
    """Exact check that substituting ``m`` into ``W_src`` yields ``W_dst``."""
    if W_src.mode != "symbolic" or W_dst.mode != "symbolic":
        raise GluingError("chart identities are checked in symbolic mode")
    if tuple(m.target_names) != tuple(W_src.variable_names):
        raise GluingError(f"map targets {m.target_names}, potential uses {W_src.variable_names}")
    if tuple(m.source_names) != tuple(W_dst.variable_names):
        raise GluingError(f"map sources {m.source_names}, potential uses {W_dst.variable_names}")
    _check_bindings(W_src, W_dst)
    transformed = substitute(W_src.poly, m)
    expected = LaurentRational(W_dst.poly)
    return GluingVerdict(rational_eq(transformed, expected), transformed, expected)


def monodromy(map_pos: SubstitutionMap, map_neg: SubstitutionMap) -> list[list[int]]:
    """Exponent-lattice action of going around the wall: ``M_neg @ M_pos^-1``.

    Both maps express the same target chart in the same source chart.
    """
    a, b = map_pos.monomial_part, map_neg.monomial_part
    if a is None or b is None:
        raise GluingError("monodromy needs purely monomial maps")
    try:
        a_inv = _exact.int_inverse(a)
        _exact.int_inverse(b)
    except ValueError as exc:
        raise GluingError(str(exc)) from exc
    return _exact.int_matmul(b, a_inv)


@dataclass(frozen=True)
class LostValues:
    """Critical values on both sides of a gluing and which ones fail to match."""

    match: MultisetMatch
    src_values: tuple[complex, ...]
    dst_values: tuple[complex, ...]
    unmappable: tuple[CriticalPoint, ...] = field(default=())

    @property
    def lost_on_src(self) -> tuple[complex, ...]:
        return self.match.unmatched_a

    @property
    def lost_on_dst(self) -> tuple[complex, ...]:
        return self.match.unmatched_b


def _snap(values: Sequence[complex], scale: float) -> list[complex]:
    return [0j if abs(v) < ZERO_SNAP * scale else complex(v) for v in values]


def lost_values(W_src: SuperpotentialSpec, W_dst: SuperpotentialSpec, m: SubstitutionMap,
                params: Mapping[str, float] | None = None, cfg: SolverConfig | None = None,
                tol: float = LOST_TOL) -> LostValues:
    """Solve both charts and compare their critical-value multisets.

    Destination critical points at which ``m`` leaves the torus (some
    target coordinate is 0 or undefined) are reported as ``unmappable``.
    """
    values = W_dst.param_values()
    if params:
        values.update(params)
        W_src = replace(W_src, poly=W_src.poly.specialize({**W_src.param_values(), **params}), mode="numeric")
        W_dst = replace(W_dst, poly=W_dst.poly.specialize(values), mode="numeric")
    src = solve_critical(W_src, cfg)
    dst = solve_critical(W_dst, cfg)
    sv = [p.value for p in src]
    dv = [p.value for p in dst]
    scale = max([abs(v) for v in sv + dv] + [1e-300])
    sv, dv = _snap(sv, scale), _snap(dv, scale)
    unmappable = []
    for p in dst:
        try:
            image = m(p.z, values)
        except ZeroDivisionError:
            unmappable.append(p)
            continue
        coord_scale = max(abs(c) for c in p.z)
        if any(abs(c) < ZERO_SNAP * coord_scale or not math.isfinite(abs(c)) for c in image):
            unmappable.append(p)
    match = match_multisets(sv, dv, tol)
    return LostValues(match, tuple(sv), tuple(dv), tuple(unmappable))


@dataclass(frozen=True)
class Preset:
    name: str
    src: SuperpotentialSpec
    dst: SuperpotentialSpec
    gluing: SubstitutionMap


def preset(name: str, lam: float | None = None, lam2: float | None = None, classical: bool = False) -> Preset:
    """Named gluing setups.

    ``cp2`` and ``p1p1`` use the corrected map ``u = z1 + z2``; with
    ``classical`` (or the presets ``classical-pos``/``classical-neg``) the
    uncorrected monomial map is used instead.  ``quantum`` is ``cp2``.
    Default areas are 3 ln 10 for CP^2 and 2 ln 10 for each CP^1 factor.
    """
    if name in ("cp2", "quantum", "classical-pos", "classical-neg"):
        lam = 3 * math.log(10) if lam is None else lam
        src, dst = cp2_chekanov(lam), cp2_clifford(lam)
    elif name == "p1p1":
        lam = 2 * math.log(10) if lam is None else lam
        l2 = lam if lam2 is None else lam2
        src, dst = p1p1_chekanov(lam, l2), p1p1_clifford(lam, l2)
    else:
        raise GluingError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    if name == "classical-neg":
        gluing = classical_neg_map()
    elif classical or name == "classical-pos":
        gluing = classical_pos_map()
    else:
        gluing = quantum_map()
    return Preset(name, src, dst, gluing)


PRESETS = ("cp2", "p1p1", "classical-pos", "classical-neg", "quantum")
