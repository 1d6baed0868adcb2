"""Delzant moment polytopes in facet presentation.

A polytope is ``{phi : <nu(F), phi> + alpha(F) >= 0 for all facets F}`` with
primitive inward integer normals ``nu(F)``.  Offsets are stored as the exact
rational number ``2*pi*alpha(F)``, so the superpotential weight of a facet is
simply ``exp(-offset)``.  Vertex coordinates are reported in the same scaled
units (``2*pi*phi``); :meth:`Vertex.moment` converts back to moment
coordinates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from . import _exact
from ._exact import to_fraction

TWO_PI = 2.0 * math.pi

DEFAULT_LOG_TOL = 1e-9


class PolytopeError(ValueError):
    """Invalid polytope input or construction."""


@dataclass(frozen=True)
class Vertex:
    coords: tuple[Fraction, ...]
    incident_facets: tuple[int, ...]

    def moment(self) -> tuple[float, ...]:
        """Coordinates in moment units, i.e. divided by 2*pi."""
        return tuple(float(c) / TWO_PI for c in self.coords)


@dataclass(frozen=True)
class DelzantCheck:
    ok: bool
    bad_vertices: tuple[Vertex, ...] = ()
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class LatticePolytope:
    dim: int
    normals: tuple[tuple[int, ...], ...]
    offsets: tuple[Fraction, ...]
    name: str | None = field(default=None, compare=False)
    # Set by inflate: the polytope this one was relaxed from.  Relaxed
    # inequality systems may contain facets that no longer touch the body.
    base: "LatticePolytope | None" = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.dim < 1:
            raise PolytopeError("dimension must be positive")
        if len(self.normals) != len(self.offsets):
            raise PolytopeError("normals and offsets differ in length")
        for i, nu in enumerate(self.normals):
            if len(nu) != self.dim:
                raise PolytopeError(f"facet {i}: normal has length {len(nu)}, expected {self.dim}")
            if not all(isinstance(v, int) for v in nu):
                raise PolytopeError(f"facet {i}: normal must be an integer vector")
            if all(v == 0 for v in nu):
                raise PolytopeError(f"facet {i}: zero normal")
            if math.gcd(*nu) != 1:
                raise PolytopeError(f"facet {i}: normal {nu} is not primitive")
        if not all(isinstance(a, Fraction) for a in self.offsets):
            object.__setattr__(self, "offsets", tuple(to_fraction(a) for a in self.offsets))
        self._check_bounded()
        verts = self.vertices
        if not verts:
            raise PolytopeError("polytope is empty")
        self._check_full_dimensional(verts)
        if self.base is None:
            self._check_irredundant(verts)

    @classmethod
    def from_facets(cls, facets: Iterable[tuple[Sequence, object]], name: str | None = None) -> "LatticePolytope":
        """Build from ``(normal, two_pi_alpha)`` pairs, normalizing normals.

        Rational normals are scaled to primitive integer vectors; the offset
        is scaled by the same positive factor so the half-space is unchanged.
        """
        normals, offsets = [], []
        dim = None
        for i, (nu, off) in enumerate(facets):
            off = to_fraction(off)
            try:
                q = [to_fraction(v) for v in nu]
            except (TypeError, ValueError) as exc:
                raise PolytopeError(f"facet {i}: bad normal {nu!r}") from exc
            if any(isinstance(v, float) and not float(v).is_integer() for v in nu):
                raise PolytopeError(f"facet {i}: normal {nu!r} is not proportional to an integer vector")
            if dim is None:
                dim = len(q)
            if all(v == 0 for v in q):
                raise PolytopeError(f"facet {i}: zero normal")
            lcm = math.lcm(*(v.denominator for v in q))
            ints = [int(v * lcm) for v in q]
            g = math.gcd(*ints)
            scale = Fraction(lcm, g)
            normals.append(tuple(v // g for v in ints))
            offsets.append(off * scale)
        if dim is None:
            raise PolytopeError("no facets given")
        return cls(dim, tuple(normals), tuple(offsets), name)

    @property
    def nfacets(self) -> int:
        return len(self.normals)

    def slack(self, point: Sequence[Fraction]) -> list[Fraction]:
        """Exact values <nu(F), point> + offset(F), in scaled units."""
        return [sum(n * p for n, p in zip(nu, point)) + a for nu, a in zip(self.normals, self.offsets)]

    @cached_property
    def vertices(self) -> tuple[Vertex, ...]:
        n = self.dim
        found: dict[tuple[Fraction, ...], Vertex] = {}
        for subset in combinations(range(self.nfacets), n):
            a = [[Fraction(v) for v in self.normals[i]] for i in subset]
            if _exact.det(a) == 0:
                continue
            x = _exact.solve(a, [-self.offsets[i] for i in subset])
            point = tuple(x)
            if point in found:
                continue
            s = self.slack(point)
            if any(v < 0 for v in s):
                continue
            tight = tuple(i for i, v in enumerate(s) if v == 0)
            found[point] = Vertex(point, tight)
        return tuple(found[p] for p in sorted(found))

    @cached_property
    def barycenter(self) -> tuple[Fraction, ...]:
        """Average of the vertices (an interior point for full-dimensional P)."""
        vs = self.vertices
        return tuple(sum(v.coords[j] for v in vs) / len(vs) for j in range(self.dim))

    def _check_bounded(self) -> None:
        # Recession cone {d : <nu, d> >= 0 for all F} must be {0}.  With
        # rank n it is pointed, so it is trivial iff it has no extreme ray;
        # every extreme ray is cut out by n-1 tight constraints.
        n = self.dim
        a = [[Fraction(v) for v in nu] for nu in self.normals]
        if _exact.rank(a) < n:
            raise PolytopeError("polytope is unbounded (normals do not span)")
        for subset in combinations(range(self.nfacets), n - 1):
            rows = [a[i] for i in subset]
            ker = _exact.nullspace(rows, n)
            if len(ker) != 1:
                continue
            d = ker[0]
            for sign in (1, -1):
                if all(sign * sum(x * y for x, y in zip(row, d)) >= 0 for row in a):
                    raise PolytopeError("polytope is unbounded (nontrivial recession cone)")

    def _check_full_dimensional(self, verts) -> None:
        if any(v <= 0 for v in self.slack(self.barycenter)):
            raise PolytopeError("polytope is not full-dimensional")

    @property
    def redundant_facets(self) -> tuple[int, ...]:
        """Facets whose hyperplane meets P in less than a codimension-one face."""
        out = []
        for i in range(self.nfacets):
            on = [v.coords for v in self.vertices if i in v.incident_facets]
            if len(on) < self.dim or _affine_rank(on) != self.dim - 1:
                out.append(i)
        return tuple(out)

    def _check_irredundant(self, verts) -> None:
        seen: dict[frozenset, int] = {}
        for i in range(self.nfacets):
            on = [v.coords for v in verts if i in v.incident_facets]
            key = frozenset(on)
            if len(on) < self.dim or _affine_rank(on) != self.dim - 1:
                raise PolytopeError(f"redundant facet {i}")
            if key in seen:
                raise PolytopeError(f"redundant facet {i} (duplicates facet {seen[key]})")
            seen[key] = i

    def to_dict(self) -> dict:
        out: dict = {"dim": self.dim, "facets": [
            {"normal": list(nu), "two_pi_alpha": _frac_str(a)} for nu, a in zip(self.normals, self.offsets)
        ]}
        if self.name is not None:
            out["name"] = self.name
        return out


def _affine_rank(points: Sequence[Sequence[Fraction]]) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    diffs = [[p - b for p, b in zip(pt, base)] for pt in points[1:]]
    return _exact.rank(diffs)


def _frac_str(x: Fraction) -> str | int:
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_polytope(text: str) -> LatticePolytope:
    """Parse polytope JSON: ``{"dim": n, "facets": [{"normal": [...], "two_pi_alpha": "p/q"}], "name": ...}``."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PolytopeError(f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict) or "facets" not in data or "dim" not in data:
        raise PolytopeError("polytope JSON needs 'dim' and 'facets'")
    dim = data["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise PolytopeError("'dim' must be a positive integer")
    facets = []
    for i, f in enumerate(data["facets"]):
        try:
            nu, off = f["normal"], f["two_pi_alpha"]
        except (KeyError, TypeError) as exc:
            raise PolytopeError(f"facet {i}: needs 'normal' and 'two_pi_alpha'") from exc
        if not isinstance(nu, list) or len(nu) != dim:
            raise PolytopeError(f"facet {i}: normal must be a list of length {dim}")
        try:
            off = to_fraction(off)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise PolytopeError(f"facet {i}: bad offset {off!r}") from exc
        facets.append((nu, off))
    return LatticePolytope.from_facets(facets, name=data.get("name"))


def vertices(P: LatticePolytope) -> list[Vertex]:
    return list(P.vertices)


def is_delzant(P: LatticePolytope) -> DelzantCheck:
    """True iff the facet normals at every vertex form a basis of Z^n."""
    bad = []
    reasons = []
    for v in P.vertices:
        coords = "(" + ", ".join(str(c) for c in v.coords) + ")"
        if len(v.incident_facets) != P.dim:
            bad.append(v)
            reasons.append(f"vertex {coords}: {len(v.incident_facets)} facets meet (not simple)")
            continue
        d = _exact.det([[Fraction(x) for x in P.normals[i]] for i in v.incident_facets])
        if abs(d) != 1:
            bad.append(v)
            reasons.append(f"vertex {coords}: |det| = {abs(d)}")
    return DelzantCheck(not bad, tuple(bad), "; ".join(reasons))


def monotone_point(P: LatticePolytope) -> tuple[tuple[Fraction, ...], Fraction] | None:
    """Point p and value c > 0 with <nu(F), p> + offset(F) = c for every F, if any."""
    a = [[Fraction(v) for v in nu] + [Fraction(-1)] for nu in P.normals]
    x = _exact.solve(a, [-o for o in P.offsets])
    if x is None:
        return None
    p, c = tuple(x[:-1]), x[-1]
    # A solution with free variables would make the facet normals dependent
    # in a way ruled out by boundedness, so p is unique here.
    if c <= 0:
        return None
    return p, c


def is_monotone(P: LatticePolytope) -> bool:
    return monotone_point(P) is not None


def inflate(P: LatticePolytope, k) -> LatticePolytope:
    """Enlarge P by k/(2*pi) in moment units in every direction.

    In the stored (2*pi-scaled) units this adds ``k`` to each offset, which
    multiplies every superpotential weight by ``exp(-k)``.  Every inequality
    is kept even when, for a non-Fano P, one of them stops supporting a
    facet; the result remembers the original polytope as ``base``.
    """
    k = to_fraction(k)
    if k < 0:
        raise PolytopeError("inflation amount must be nonnegative")
    if k == 0:
        return P
    base = P.base if P.base is not None else P
    return LatticePolytope(P.dim, P.normals, tuple(a + k for a in P.offsets), P.name, base)


def transform(P: LatticePolytope, sigma: Sequence[Sequence[int]]) -> LatticePolytope:
    """Image of P under phi -> sigma @ phi for unimodular sigma (normals go by sigma^-T)."""
    inv = _exact.int_inverse(sigma)
    n = P.dim
    normals = tuple(tuple(sum(inv[k][j] * nu[k] for k in range(n)) for j in range(n)) for nu in P.normals)
    base = transform(P.base, sigma) if P.base is not None else None
    return LatticePolytope(n, normals, P.offsets, P.name, base)


def log_map(z: Sequence[complex]) -> tuple[float, ...]:
    """Moment coordinates -(1/2pi) log|z_j|."""
    out = []
    for zj in z:
        if zj == 0:
            raise ValueError("log map undefined at a zero coordinate")
        out.append(-math.log(abs(zj)) / TWO_PI)
    return tuple(out)


def log_slacks(P: LatticePolytope, z: Sequence[complex]) -> list[float]:
    """<nu(F), Log(z)> + alpha(F) in moment units, per facet."""
    if len(z) != P.dim:
        raise ValueError(f"expected {P.dim} coordinates, got {len(z)}")
    phi = log_map(z)
    return [sum(n * p for n, p in zip(nu, phi)) + float(a) / TWO_PI for nu, a in zip(P.normals, P.offsets)]


def contains_log(P: LatticePolytope, z: Sequence[complex], strict: bool = True, tol: float = DEFAULT_LOG_TOL) -> bool:
    s = log_slacks(P, z)
    if strict:
        return all(v > tol for v in s)
    return all(v >= -tol for v in s)


def simplex(n: int, size) -> LatticePolytope:
    """Moment polytope of CP^n; ``size`` is the stored offset of the far facet (the line area)."""
    facets = [(tuple(int(i == j) for j in range(n)), 0) for i in range(n)]
    facets.append(((-1,) * n, size))
    return LatticePolytope.from_facets(facets, name=f"cp{n}")


def product_p1(size1, size2) -> LatticePolytope:
    """Moment rectangle of CP^1 x CP^1 with factor areas ``size1``, ``size2``."""
    return LatticePolytope.from_facets(
        [((1, 0), 0), ((0, 1), 0), ((-1, 0), size1), ((0, -1), size2)], name="p1p1")


def hirzebruch_polytope(m: int, a, b) -> LatticePolytope:
    """Moment polytope of F_m: zero-section area ``a``, fiber area ``b`` (a > m b)."""
    return LatticePolytope.from_facets(
        [((1, 0), 0), ((0, 1), 0), ((0, -1), b), ((-1, -m), a)], name=f"F{m}")
