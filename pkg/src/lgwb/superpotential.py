"""Superpotentials: the toric formula and the hardcoded chart families.

For a Delzant polytope the superpotential has one term per facet,
``exp(-offset) * z**normal``.  The Chekanov-chart potentials of CP^2 and
CP^1 x CP^1 are not produced by any polytope and are written out directly.

In symbolic mode every distinct nonzero weight becomes a formal parameter
(``q`` if there is only one, else ``q1, q2, ...`` in facet order); zero
offsets give the exact coefficient 1.  Numeric mode plugs in the floats.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping

from ._exact import to_fraction
from .laurent import LaurentPoly
from .polytope import LatticePolytope, hirzebruch_polytope, is_delzant

SYMBOLIC = "symbolic"
NUMERIC = "numeric"

FAMILIES = ("cp2_clifford", "cp2_chekanov", "p1p1_clifford", "p1p1_chekanov", "hirzebruch")


class SuperpotentialError(ValueError):
    pass


@dataclass(frozen=True)
class ParamBinding:
    """A formal parameter standing for ``exp(-area)``."""

    name: str
    area: Fraction

    @property
    def value(self) -> float:
        return math.exp(-float(self.area))

    @property
    def definition(self) -> str:
        return f"exp(-{float(self.area):.17g})"


@dataclass(frozen=True)
class SuperpotentialSpec:
    poly: LaurentPoly
    variable_names: tuple[str, ...]
    parameter_bindings: Mapping[str, ParamBinding] = field(default_factory=dict)
    domain: LatticePolytope | None = None
    chart_label: str = "toric"
    mode: str = SYMBOLIC

    def __post_init__(self):
        missing = self.poly.params() - set(self.parameter_bindings)
        if missing:
            raise SuperpotentialError(f"unbound parameters {sorted(missing)}")
        if len(self.variable_names) != self.poly.nvars:
            raise SuperpotentialError("variable_names does not match nvars")
        if self.domain is not None and self.domain.dim != self.poly.nvars:
            raise SuperpotentialError("domain dimension does not match nvars")

    @property
    def nvars(self) -> int:
        return self.poly.nvars

    def param_values(self) -> dict[str, float]:
        return {name: b.value for name, b in self.parameter_bindings.items()}

    def numeric(self) -> "SuperpotentialSpec":
        """Same potential with every parameter replaced by its value."""
        if self.mode == NUMERIC:
            return self
        poly = self.poly.specialize(self.param_values())
        return replace(self, poly=poly, mode=NUMERIC)

    def to_text(self) -> str:
        return self.poly.to_text(self.variable_names)


def _param_names(areas: list[Fraction]) -> dict[Fraction, str]:
    distinct: list[Fraction] = []
    for a in areas:
        if a != 0 and a not in distinct:
            distinct.append(a)
    if len(distinct) == 1:
        return {distinct[0]: "q"}
    return {a: f"q{i + 1}" for i, a in enumerate(distinct)}


def _weighted_sum(nvars: int, exps: list[tuple[int, ...]], areas: list[Fraction], mode: str):
    """sum_k exp(-areas[k]) z^exps[k], symbolic or numeric, plus its bindings."""
    names = _param_names(areas)
    bindings = {name: ParamBinding(name, a) for a, name in names.items()}
    terms = []
    for exp, a in zip(exps, areas):
        if a == 0:
            terms.append(((exp, ()), 1 if mode == SYMBOLIC else 1.0))
        elif mode == SYMBOLIC:
            terms.append(((exp, ((names[a], 1),)), 1))
        else:
            terms.append(((exp, ()), math.exp(-float(a))))
    return LaurentPoly(nvars, terms), bindings


def _check_mode(mode: str) -> None:
    if mode not in (SYMBOLIC, NUMERIC):
        raise SuperpotentialError(f"unknown mode {mode!r}")


def toric_superpotential(P: LatticePolytope, mode: str = SYMBOLIC, strict: bool = True) -> SuperpotentialSpec:
    """``W = sum_F exp(-2 pi alpha(F)) z^nu(F)`` on the moment polytope P.

    A non-Delzant polytope raises (``strict``) or warns.  For an inflated
    polytope the check applies to the polytope it was inflated from, since
    inflation changes the domain and not the manifold.
    """
    _check_mode(mode)
    check = is_delzant(P.base if P.base is not None else P)
    if not check:
        if strict:
            raise SuperpotentialError(f"polytope is not Delzant: {check.message}")
        warnings.warn(f"polytope is not Delzant: {check.message}", stacklevel=2)
    poly, bindings = _weighted_sum(P.dim, list(P.normals), list(P.offsets), mode)
    names = tuple(f"z{i + 1}" for i in range(P.dim))
    return SuperpotentialSpec(poly, names, bindings, domain=P, chart_label="toric", mode=mode)


def _positive(name: str, value) -> Fraction:
    v = to_fraction(value)
    if v <= 0:
        raise SuperpotentialError(f"{name} must be positive, got {value}")
    return v


def cp2_clifford(lam, mode: str = SYMBOLIC) -> SuperpotentialSpec:
    lam = _positive("lambda", lam)
    poly, bindings = _weighted_sum(2, [(1, 0), (0, 1), (-1, -1)], [Fraction(0), Fraction(0), lam], SYMBOLIC)
    spec = SuperpotentialSpec(poly, ("z1", "z2"), bindings, chart_label="clifford")
    return spec.numeric() if mode == NUMERIC else spec


def cp2_chekanov(lam, mode: str = SYMBOLIC) -> SuperpotentialSpec:
    """``u + q (1+w)^2 / (u^2 w)`` in variables (w, u)."""
    lam = _positive("lambda", lam)
    w, u = LaurentPoly.gens(2)
    q = LaurentPoly.param(2, "q")
    poly = u + q * (1 + w) ** 2 * u ** -2 * w ** -1
    spec = SuperpotentialSpec(poly, ("w", "u"), {"q": ParamBinding("q", lam)}, chart_label="chekanov")
    return spec.numeric() if mode == NUMERIC else spec


def p1p1_clifford(lam1, lam2, mode: str = SYMBOLIC) -> SuperpotentialSpec:
    lam1, lam2 = _positive("lambda1", lam1), _positive("lambda2", lam2)
    poly, bindings = _weighted_sum(
        2, [(1, 0), (0, 1), (-1, 0), (0, -1)], [Fraction(0), Fraction(0), lam1, lam2], SYMBOLIC)
    spec = SuperpotentialSpec(poly, ("z1", "z2"), bindings, chart_label="clifford")
    return spec.numeric() if mode == NUMERIC else spec


def p1p1_chekanov(lam1, lam2, mode: str = SYMBOLIC) -> SuperpotentialSpec:
    """``u + q1 (1+w)/(u w) + q2 (1+w)/u`` in variables (w, u); q1 = q2 = q when the areas agree."""
    lam1, lam2 = _positive("lambda1", lam1), _positive("lambda2", lam2)
    names = _param_names([lam1, lam2])
    w, u = LaurentPoly.gens(2)
    q1 = LaurentPoly.param(2, names[lam1])
    q2 = LaurentPoly.param(2, names[lam2])
    poly = u + q1 * (1 + w) * u ** -1 * w ** -1 + q2 * (1 + w) * u ** -1
    bindings = {name: ParamBinding(name, a) for a, name in names.items()}
    spec = SuperpotentialSpec(poly, ("w", "u"), bindings, chart_label="chekanov")
    return spec.numeric() if mode == NUMERIC else spec


def hirzebruch(m: int, a, b, mode: str = SYMBOLIC) -> SuperpotentialSpec:
    """``z1 + z2 + exp(-b)/z2 + exp(-a)/(z1 z2^m)`` on the F_m polytope."""
    if not isinstance(m, int) or m < 1:
        raise SuperpotentialError(f"m must be a positive integer, got {m!r}")
    a, b = to_fraction(a), to_fraction(b)
    if not (b > 0 and a > m * b):
        raise SuperpotentialError(f"need a > m*b > 0, got a={float(a)}, b={float(b)}, m={m}")
    P = hirzebruch_polytope(m, a, b)
    poly, bindings = _weighted_sum(2, [(1, 0), (0, 1), (0, -1), (-1, -m)], [Fraction(0), Fraction(0), b, a], SYMBOLIC)
    spec = SuperpotentialSpec(poly, ("z1", "z2"), bindings, domain=P, chart_label="toric")
    return spec.numeric() if mode == NUMERIC else spec


def family(name: str, mode: str = SYMBOLIC, **params) -> SuperpotentialSpec:
    """Build one of the closed-form families by name.

    Parameters: ``lam`` for cp2_*; ``lam1, lam2`` for p1p1_*; ``m, a, b`` for
    hirzebruch.
    """
    _check_mode(mode)
    builders = {
        "cp2_clifford": cp2_clifford,
        "cp2_chekanov": cp2_chekanov,
        "p1p1_clifford": p1p1_clifford,
        "p1p1_chekanov": p1p1_chekanov,
        "hirzebruch": hirzebruch,
    }
    if name not in builders:
        raise SuperpotentialError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")
    try:
        return builders[name](mode=mode, **params)
    except TypeError as exc:
        raise SuperpotentialError(f"bad parameters for {name}: {exc}") from exc
