"""Critical points of numeric superpotentials on the complex torus.

The solver runs batched multistart Newton in logarithmic coordinates
``x = log z``, where the critical equations are ``z_i dW/dz_i = 0``.  The
Jacobian of that system is the matrix of second log-derivatives.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .laurent import LaurentPoly
from .polytope import LatticePolytope, contains_log, DEFAULT_LOG_TOL
from .superpotential import SuperpotentialSpec, hirzebruch

log = logging.getLogger(__name__)

DEGENERATE_COND = 1e5
DEGENERATE_MERGE = 1e-3
_SETTLE_SWEEPS = 80
STEP_TOL = 1e-6


class SolverError(RuntimeError):
    pass


class RootFindingError(SolverError):
    def __init__(self, message: str, roots=None):
        super().__init__(message)
        self.roots = roots


@dataclass(frozen=True)
class CriticalPoint:
    z: tuple[complex, ...]
    value: complex
    residual: float
    in_domain: bool | None = None
    basin_count: int = 1
    degenerate: bool = False

    @property
    def log_z(self) -> tuple[complex, ...]:
        return tuple(cmath.log(v) for v in self.z)


@dataclass(frozen=True)
class SolverConfig:
    """Multistart Newton settings.

    ``grid_radii`` is one list of seed radii per variable; when None the
    radii come from the domain polytope (barycenter and vertex midpoints)
    plus a coarse log-spaced grid sized from the coefficients.
    """

    grid_radii: tuple[tuple[float, ...], ...] | None = None
    grid_angles: int | None = None
    newton_tol: float = 1e-10
    max_iter: int = 100
    dedup_tol: float = 1e-6
    rng_seed: int = 0
    jitter: float = 1e-3
    max_step: float = 1.0

    def __post_init__(self):
        if not self.newton_tol > 0:
            raise ValueError("newton_tol must be positive")
        if not self.dedup_tol > self.newton_tol:
            raise ValueError("dedup_tol must exceed newton_tol")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if self.grid_angles is not None and self.grid_angles < 1:
            raise ValueError("grid_angles must be positive")

    def angles_for(self, n: int) -> int:
        if self.grid_angles is not None:
            return self.grid_angles
        return 8 if n <= 2 else 4


def _numeric_poly(W: SuperpotentialSpec | LaurentPoly) -> LaurentPoly:
    if isinstance(W, LaurentPoly):
        if W.params():
            raise SolverError("polynomial still has formal parameters")
        return W
    return W.numeric().poly


def gradient_system(W: SuperpotentialSpec | LaurentPoly) -> list[LaurentPoly]:
    """``[z_i dW/dz_i for i in range(n)]``."""
    p = _numeric_poly(W)
    return [p.log_derivative(i) for i in range(p.nvars)]


def hessian_system(W: SuperpotentialSpec | LaurentPoly) -> list[list[LaurentPoly]]:
    """Second log-derivatives ``z_j d/dz_j (z_i dW/dz_i)``."""
    grad = gradient_system(W)
    return [[g.log_derivative(j) for j in range(len(grad))] for g in grad]


class _Compiled:
    """A numeric Laurent polynomial as (exponents, coefficients) arrays."""

    def __init__(self, p: LaurentPoly):
        self.exps, self.coeffs = p.to_arrays()

    def __call__(self, x: np.ndarray) -> np.ndarray:
        if not len(self.coeffs):
            return np.zeros(x.shape[0], dtype=complex)
        return np.exp(x @ self.exps.T) @ self.coeffs

    def magnitude(self, x: np.ndarray) -> np.ndarray:
        """Sum of absolute values of the terms."""
        if not len(self.coeffs):
            return np.zeros(x.shape[0])
        return np.abs(np.exp(x @ self.exps.T)) @ np.abs(self.coeffs)


class _System:
    def __init__(self, p: LaurentPoly):
        self.n = p.nvars
        self.W = _Compiled(p)
        self.grad = [_Compiled(g) for g in gradient_system(p)]
        self.hess = [[_Compiled(h) for h in row] for row in hessian_system(p)]

    def gradient(self, x):
        return np.stack([g(x) for g in self.grad], axis=1)

    def jacobian(self, x):
        return np.stack([np.stack([h(x) for h in row], axis=1) for row in self.hess], axis=1)

    def rounding(self, x):
        """Worst-case float error of the computed gradient at each point."""
        mags = np.stack([g.magnitude(x) for g in self.grad], axis=1)
        return 4 * np.finfo(float).eps * np.max(mags, axis=1)


def _seed_log_radii(W: SuperpotentialSpec | LaurentPoly, p: LaurentPoly, cfg: SolverConfig) -> np.ndarray:
    n = p.nvars
    if cfg.grid_radii is not None:
        if len(cfg.grid_radii) != n:
            raise ValueError(f"grid_radii needs {n} lists")
        mesh = np.meshgrid(*[np.log(np.asarray(r, dtype=float)) for r in cfg.grid_radii], indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)
    pts = []
    domain = getattr(W, "domain", None)
    if domain is not None:
        # Stored polytope units are 2*pi*phi = -log|z|.
        b = np.array([float(c) for c in domain.barycenter])
        pts.append(-b)
        for v in domain.vertices:
            pts.append(-(b + np.array([float(c) for c in v.coords])) / 2)
    _, coeffs = p.to_arrays()
    span = max([abs(math.log(abs(c))) for c in coeffs if c != 0] + [1.0]) + 1.0
    k = 7 if n <= 2 else 5
    axis = np.linspace(-span, span, k)
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    broad = np.stack([m.ravel() for m in mesh], axis=1)
    if pts:
        return np.vstack([np.array(pts), broad])
    return broad


def _seeds(W, p: LaurentPoly, cfg: SolverConfig) -> np.ndarray:
    n = p.nvars
    radii = _seed_log_radii(W, p, cfg)
    na = cfg.angles_for(n)
    ang = (np.arange(na) + 0.5) * (2 * np.pi / na)
    amesh = np.meshgrid(*([ang] * n), indexing="ij")
    angles = np.stack([m.ravel() for m in amesh], axis=1)
    x = (radii[:, None, :] + 1j * angles[None, :, :]).reshape(-1, n)
    rng = np.random.default_rng(cfg.rng_seed)
    x = x + cfg.jitter * (rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape))
    return x


def _newton(sys: _System, x: np.ndarray, cfg: SolverConfig) -> tuple[np.ndarray, np.ndarray]:
    """Damped Newton on all seeds at once; returns final x and a converged mask.

    An iterate counts as converged when ``max |z_i dW/dz_i| <= newton_tol``
    and the next Newton step is below ``STEP_TOL``.  The step test keeps
    potentials with tiny coefficients from converging everywhere.  Points
    where the gradient terms are so large that rounding alone exceeds
    ``newton_tol`` are never accepted; these show up near coordinate
    hyperplanes where a factor like ``(1 + w)`` vanishes.
    """
    active = np.ones(x.shape[0], dtype=bool)
    done = np.zeros(x.shape[0], dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(cfg.max_iter + 1):
            idx = np.flatnonzero(active & ~done)
            if not len(idx):
                break
            xa = x[idx]
            g = sys.gradient(xa)
            J = sys.jacobian(xa)
            ok = np.all(np.isfinite(g), axis=1) & np.all(np.isfinite(xa), axis=1)
            ok &= np.all(np.isfinite(J.reshape(len(xa), -1)), axis=1)
            good = ok & (np.abs(np.linalg.det(np.where(ok[:, None, None], J, 0))) > 0)
            step = np.zeros_like(xa)
            if np.any(good):
                step[good] = np.linalg.solve(J[good], g[good][..., None])[..., 0]
            good &= np.all(np.isfinite(step), axis=1)
            norm = np.linalg.norm(step, axis=1)
            small = np.max(np.abs(g), axis=1) <= cfg.newton_tol
            # The residual means nothing if rounding in the terms exceeds it.
            small &= sys.rounding(xa) <= cfg.newton_tol
            conv = good & small & (norm <= STEP_TOL)
            done[idx[conv]] = True
            active[idx[~good]] = False
            move = good & ~conv
            scale = np.where(norm > cfg.max_step, cfg.max_step / np.where(norm > 0, norm, 1), 1.0)
            x[idx[move]] = xa[move] - step[move] * scale[move, None]
    return x, done


def _wrap(x: np.ndarray) -> np.ndarray:
    """Reduce imaginary parts to (-pi, pi]."""
    im = np.angle(np.exp(1j * x.imag))
    return x.real + 1j * im


def _log_distance(a: np.ndarray, b: np.ndarray) -> float:
    d = a - b
    return float(max(np.max(np.abs(d.real)), np.max(np.abs(np.angle(np.exp(1j * d.imag))))))


def _sort_key(pt: CriticalPoint):
    return (pt.value.real, pt.value.imag) + tuple(c for v in pt.z for c in (v.real, v.imag))


def solve_critical(W: SuperpotentialSpec | LaurentPoly, cfg: SolverConfig | None = None) -> list[CriticalPoint]:
    """All critical points reachable from the seed grid, deduplicated.

    Output is sorted by critical value (real, then imaginary part).  An empty
    list is returned, with a logged warning, when no seed converges.
    """
    cfg = cfg or SolverConfig()
    p = _numeric_poly(W)
    if p.nvars > 3:
        log.warning("solve_critical is tuned for n <= 3; got n = %d", p.nvars)
    sys = _System(p)
    if all(g.coeffs.size == 0 for g in sys.grad):
        raise SolverError("superpotential is constant; every point is critical")
    x0 = _seeds(W, p, cfg)
    x, done = _newton(sys, x0.copy(), cfg)
    conv = _wrap(x[done])
    log.debug("%d of %d seeds converged", len(conv), len(x0))
    if not len(conv):
        log.warning("no Newton seed converged (%d seeds)", len(x0))
        return []
    reps: list[np.ndarray] = []
    counts: list[int] = []
    for xi in conv:
        for k, r in enumerate(reps):
            if _log_distance(xi, r) < cfg.dedup_tol:
                counts[k] += 1
                break
        else:
            reps.append(xi)
            counts.append(1)
    X = np.array(reps)
    # A couple of polishing steps on the representatives.
    for _ in range(2):
        g = sys.gradient(X)
        J = sys.jacobian(X)
        with np.errstate(all="ignore"):
            ok = np.abs(np.linalg.det(J)) > 0
            if np.any(ok):
                Xn = X.copy()
                Xn[ok] = X[ok] - np.linalg.solve(J[ok], g[ok][..., None])[..., 0]
                better = np.max(np.abs(sys.gradient(Xn)), axis=1) < np.max(np.abs(g), axis=1)
                X[better] = Xn[better]
    X = _wrap(X)
    X, counts, conds = _merge_degenerate(sys, X, counts, cfg)
    g = sys.gradient(X)
    values = sys.W(X)
    out = []
    for i in range(len(X)):
        z = tuple(complex(v) for v in np.exp(X[i]))
        cond = conds[i]
        out.append(CriticalPoint(
            z=z,
            value=complex(values[i]),
            residual=float(np.max(np.abs(g[i]))),
            basin_count=counts[i],
            degenerate=bool(not np.isfinite(cond) or cond > DEGENERATE_COND),
        ))
    out.sort(key=_sort_key)
    return out


def _conds(sys: _System, X: np.ndarray) -> np.ndarray:
    """Size of the Hessian terms over the smallest singular value of the Hessian.

    Unlike the plain condition number this also sees degeneracy in one
    variable, where the Jacobian is a 1x1 matrix.
    """
    with np.errstate(all="ignore"):
        smin = np.linalg.svd(sys.jacobian(X), compute_uv=False)[:, -1]
        scale = np.max(np.stack([h.magnitude(X) for row in sys.hess for h in row], axis=1), axis=1)
        c = scale / smin
    return np.where(np.isfinite(c), c, np.inf)


def _merge_degenerate(sys: _System, X: np.ndarray, counts: list[int], cfg: SolverConfig):
    """Collapse the scatter Newton leaves around a non-Morse point.

    Near a degenerate critical point Newton only gets within about
    sqrt(newton_tol), so one point shows up as several representatives a
    little farther apart than dedup_tol.  Degenerate representatives within
    DEGENERATE_MERGE of each other are replaced by their centroid, or by the
    best member when the centroid is not better.
    """
    conds = _conds(sys, X)
    bad = np.flatnonzero(conds > DEGENERATE_COND)
    if len(bad) < 2:
        return X, counts, conds
    groups: list[list[int]] = []
    for i in bad:
        for grp in groups:
            if _log_distance(X[i], X[grp[0]]) < DEGENERATE_MERGE:
                grp.append(i)
                break
        else:
            groups.append([i])
    drop = set()
    X = X.copy()
    counts = list(counts)
    for grp in groups:
        if len(grp) == 1:
            continue
        ref = X[grp[0]]
        d = X[grp] - ref
        d = d.real + 1j * np.angle(np.exp(1j * d.imag))
        centroid = ref + d.mean(axis=0)
        res = np.max(np.abs(sys.gradient(np.vstack([centroid[None, :], X[grp]]))), axis=1)
        keep = grp[0]
        X[keep] = centroid if res[0] <= res[1:].max() else X[grp[int(np.argmin(res[1:]))]]
        counts[keep] = sum(counts[i] for i in grp)
        drop.update(grp[1:])
    idx = [i for i in range(len(X)) if i not in drop]
    X = _wrap(X[idx])
    return X, [counts[i] for i in idx], _conds(sys, X)


def filter_in_domain(points: Sequence[CriticalPoint], P: LatticePolytope, tol: float = DEFAULT_LOG_TOL) -> list[CriticalPoint]:
    """Mark each point with whether Log(z) lies in the interior of P."""
    out = []
    for pt in points:
        if len(pt.z) != P.dim:
            raise ValueError("dimension mismatch between points and polytope")
        out.append(replace(pt, in_domain=contains_log(P, pt.z, strict=True, tol=tol)))
    return out


# ---------------------------------------------------------------- univariate


def _horner(coeffs: Sequence[complex], x: complex) -> complex:
    acc = 0j
    for c in coeffs:
        acc = acc * x + c
    return acc


_CLUSTER_RADII = (5e-2, 1e-2, 1e-3)


def poly_roots(coeffs: Sequence[complex], tol: float = 1e-12, max_iter: int = 2000) -> list[complex]:
    """All roots (with multiplicity) of ``coeffs[0] x^d + ... + coeffs[d]``.

    Durand-Kerner iteration from points staggered on a circle around the
    root centroid.  Clusters of roots whose centroid is at least as good a
    root as the members are treated as one multiple root.
    """
    a = [complex(c) for c in coeffs]
    if len(a) < 2:
        raise ValueError("need a polynomial of degree >= 1")
    if a[0] == 0:
        raise ValueError("leading coefficient must be nonzero")
    a = [c / a[0] for c in a]
    d = len(a) - 1
    # Exact zero roots are peeled off first.
    nzero = 0
    while a[-1] == 0 and len(a) > 1:
        a.pop()
        nzero += 1
    d = len(a) - 1
    roots: list[complex] = []
    if d >= 1:
        z = _initial_points(a)
        absa = [abs(c) for c in a]

        def converged(r: complex) -> bool:
            scale = 0.0
            for c in absa:
                scale = scale * abs(r) + c
            return abs(_horner(a, r)) <= tol * scale

        def sweep() -> float:
            # Simultaneous (Jacobi) update: keeps sum(z) equal to -a[1], which
            # is what makes cluster centroids accurate.
            deltas = []
            for k in range(d):
                denom = 1 + 0j
                for j in range(d):
                    if j != k:
                        denom *= z[k] - z[j]
                if denom == 0:
                    denom = 1e-300
                deltas.append(_horner(a, z[k]) / denom)
            for k in range(d):
                z[k] -= deltas[k]
            return max(abs(v) for v in deltas)

        for _ in range(max_iter):
            sweep()
            if all(converged(r) for r in z):
                break
        else:
            raise RootFindingError(f"Durand-Kerner did not converge in {max_iter} iterations", z)
        # Copies of a multiple root converge only linearly; let them settle
        # onto the rounding floor before the centroid merge.
        for _ in range(_SETTLE_SWEEPS):
            sweep()
        roots = _merge_clusters(z, a)
    roots.extend([0j] * nzero)
    return roots


def _taylor_shift(a: list[complex], c: complex) -> list[complex]:
    """Coefficients of p(x + c), highest degree first."""
    b = list(a)
    d = len(b) - 1
    for i in range(d):
        for j in range(1, d + 1 - i):
            b[j] += c * b[j - 1]
    return b


def _initial_points(a: list[complex]) -> list[complex]:
    # Centered at the root centroid, on a circle sized from the shifted
    # coefficients.  Slightly unequal radii break the reflection symmetries
    # that can trap the iteration on a 2-cycle.
    d = len(a) - 1
    c = -a[1] / d
    b = _taylor_shift(a, c)
    radius = max([abs(b[k]) ** (1.0 / k) for k in range(1, d + 1) if b[k] != 0] + [0.0]) or 1.0
    return [c + radius * (1 + 0.1 * k / d) * cmath.exp(1j * (2 * math.pi * k / d + 0.4)) for k in range(d)]


def _merge_clusters(z: list[complex], a: list[complex]) -> list[complex]:
    """Replace tight clusters by their centroid when that lowers the residual.

    A k-fold root comes out of the iteration as k copies spread by about
    ``eps**(1/k)``; their centroid is accurate to rounding.  Distinct but
    close roots are left alone because their centroid is not a root.
    Grouping is tried from the coarsest radius down, so a high-multiplicity
    cluster is not split by a radius that is too tight for it.
    """
    scale = max(abs(r) for r in z) or 1.0
    absa = [abs(c) for c in a]
    deriv = _derivative(a)
    out: list[complex] = []

    def groups_at(idx: list[int], delta: float) -> list[list[int]]:
        groups: list[list[int]] = []
        for i in idx:
            hits = [g for g in groups if any(abs(z[i] - z[j]) < delta for j in g)]
            merged = [i]
            for g in hits:
                groups.remove(g)
                merged.extend(g)
            groups.append(merged)
        return groups

    def resolve(idx: list[int], level: int) -> None:
        if len(idx) > 1:
            c = sum(z[j] for j in idx) / len(idx)
            floor = 8 * 2.2e-16 * _horner(absa, abs(c)).real
            if abs(_horner(a, c)) <= max(abs(_horner(a, z[j])) for j in idx) + floor:
                out.extend([_polish_multiple(a, c, len(idx))] * len(idx))
                return
            if level + 1 < len(_CLUSTER_RADII):
                for g in groups_at(idx, _CLUSTER_RADII[level + 1] * scale):
                    resolve(g, level + 1)
                return
        for j in idx:
            out.append(_newton_polish(a, deriv, z[j]))

    for g in groups_at(list(range(len(z))), _CLUSTER_RADII[0] * scale):
        resolve(g, 0)
    return out


def _newton_polish(a: list[complex], deriv: list[complex], r: complex) -> complex:
    for _ in range(2):
        dp = _horner(deriv, r)
        if dp == 0:
            break
        cand = r - _horner(a, r) / dp
        if abs(_horner(a, cand)) < abs(_horner(a, r)):
            r = cand
    return r


def _derivative(a: list[complex]) -> list[complex]:
    d = len(a) - 1
    return [c * (d - i) for i, c in enumerate(a[:-1])]


def _polish_multiple(a: list[complex], c: complex, k: int) -> complex:
    """Newton on the (k-1)-th derivative, where a k-fold root is simple."""
    f = a
    for _ in range(k - 1):
        f = _derivative(f)
    df = _derivative(f)
    for _ in range(3):
        slope = _horner(df, c)
        if slope == 0:
            break
        cand = c - _horner(f, c) / slope
        if abs(_horner(f, cand)) >= abs(_horner(f, c)):
            break
        c = cand
    return c


def hirzebruch_polynomial(m: int, a_weight: float, b_weight: float) -> list[float]:
    """Coefficients (highest first) of ``z^(m-2) (z^2 - e^-B)^2 - m^2 e^-A``.

    ``a_weight = e^-A``, ``b_weight = e^-B``.  For m = 1 the equation is
    multiplied through by z, giving a quartic.
    """
    quad = np.polymul([1.0, 0.0, -b_weight], [1.0, 0.0, -b_weight])
    if m >= 2:
        lead = np.polymul(quad, [1.0] + [0.0] * (m - 2))
        return list(np.polysub(lead, [m * m * a_weight]))
    return list(np.polysub(quad, [m * m * a_weight, 0.0]))


def hirzebruch_critical(m: int, A: float, B: float, tol: float = 1e-12) -> list[CriticalPoint]:
    """Critical points of the F_m potential by elimination to one variable.

    Roots z2 of :func:`hirzebruch_polynomial` give
    ``z1 = m e^-A z2^(1-m) / (z2^2 - e^-B)``; each point is checked against
    the gradient system.
    """
    W = hirzebruch(m, A, B, mode="numeric")
    a_w, b_w = math.exp(-float(W.parameter_bindings["q2"].area)), math.exp(-float(W.parameter_bindings["q1"].area))
    roots = poly_roots(hirzebruch_polynomial(m, a_w, b_w), tol=tol)
    grad = gradient_system(W)
    out = []
    for z2 in roots:
        gap = z2 * z2 - b_w
        if abs(gap) <= 1e-12 * max(b_w, abs(z2) ** 2):
            raise SolverError(f"degenerate root z2 = {z2}: z2^2 = e^-B, z1 cannot be recovered")
        z1 = m * a_w * z2 ** (1 - m) / gap
        z = (complex(z1), complex(z2))
        res = max(abs(g.eval(z)) for g in grad)
        terms = sum(abs(complex(c)) * abs(z1) ** e[0] * abs(z2) ** e[1] for (e, _), c in W.poly.terms)
        if res > 1e-8 * terms:
            raise SolverError(f"recovered point {z} fails the gradient check (residual {res:.3g})")
        out.append(CriticalPoint(z=z, value=W.poly.eval(z), residual=res))
    out.sort(key=_sort_key)
    return out


def point_distance(a: CriticalPoint, b: CriticalPoint) -> float:
    return max(abs(x - y) for x, y in zip(a.z, b.z))


def match_points(a: Sequence[CriticalPoint], b: Sequence[CriticalPoint]) -> float:
    """Max coordinate distance under the best pairing; inf if sizes differ."""
    from scipy.optimize import linear_sum_assignment

    if len(a) != len(b):
        return math.inf
    if not a:
        return 0.0
    cost = np.array([[point_distance(x, y) for y in b] for x in a])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())
