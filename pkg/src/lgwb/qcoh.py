"""Quantum multiplication by c1 on benchmark spaces, and multiset matching.

The quantum products are tabulated, not computed: for CP^n, ``H^(n+1) = q``
with ``q = exp(-Lambda)``; for CP^1 x CP^1, ``H_i * H_i = q_i``.  A class of
area A is weighted by ``exp(-A)``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .critical import poly_roots

BENCHMARKS = ("cp1", "cp2", "cp3", "p1p1")


@dataclass(frozen=True)
class C1Matrix:
    """Matrix of ``a -> a * c1`` in a fixed basis; column j is the image of basis element j."""

    entries: tuple[tuple, ...]
    basis_labels: tuple[str, ...]
    space_label: str

    def __post_init__(self):
        d = len(self.basis_labels)
        if len(self.entries) != d or any(len(row) != d for row in self.entries):
            raise ValueError("matrix size does not match the basis")

    @property
    def dim(self) -> int:
        return len(self.basis_labels)

    def to_numpy(self) -> np.ndarray:
        return np.array([[complex(v) for v in row] for row in self.entries])


def c1_matrix_cpn(n: int, lam=None, *, q=None) -> C1Matrix:
    """c1 = (n+1) H acting on (1, H, ..., H^n) with H * H^n = q.

    Pass either the line area ``lam`` (q = exp(-lam)) or ``q`` itself; an
    exact ``q`` keeps the matrix exact.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if q is None:
        if lam is None or not lam > 0:
            raise ValueError("need a positive area lam (or q)")
        q = math.exp(-lam)
    d = n + 1
    m = [[0] * d for _ in range(d)]
    for i in range(n):
        m[i + 1][i] = d
    m[0][n] = d * q
    labels = ("1", "H") + tuple(f"H^{k}" for k in range(2, d))
    return C1Matrix(tuple(tuple(r) for r in m), labels, f"cp{n}")


def c1_matrix_p1p1(lam1, lam2, *, q1=None, q2=None) -> C1Matrix:
    """c1 = 2 H1 + 2 H2 on (1, H1, H2, H1H2) with H_i * H_i = q_i."""
    if q1 is None:
        if not lam1 > 0:
            raise ValueError("lam1 must be positive")
        q1 = math.exp(-lam1)
    if q2 is None:
        if not lam2 > 0:
            raise ValueError("lam2 must be positive")
        q2 = math.exp(-lam2)
    # Multiplication by H1 and H2 in the basis (1, H1, H2, H1H2).
    h1 = [[0, q1, 0, 0],
          [1, 0, 0, 0],
          [0, 0, 0, q1],
          [0, 0, 1, 0]]
    h2 = [[0, 0, q2, 0],
          [0, 0, 0, q2],
          [1, 0, 0, 0],
          [0, 1, 0, 0]]
    m = tuple(tuple(2 * h1[i][j] + 2 * h2[i][j] for j in range(4)) for i in range(4))
    return C1Matrix(m, ("1", "H1", "H2", "H1H2"), "p1p1")


def benchmark_matrix(space: str, areas: Sequence[float]) -> C1Matrix:
    if space in ("cp1", "cp2", "cp3"):
        return c1_matrix_cpn(int(space[2]), areas[0])
    if space == "p1p1":
        return c1_matrix_p1p1(areas[0], areas[1])
    raise ValueError(f"unknown benchmark space {space!r}; choose from {', '.join(BENCHMARKS)}")


def char_poly(mtx: C1Matrix | Sequence[Sequence]) -> list:
    """Characteristic polynomial coefficients, highest degree first (monic).

    Faddeev-LeVerrier recursion; exact when the entries are exact.
    """
    a = [list(r) for r in (mtx.entries if isinstance(mtx, C1Matrix) else mtx)]
    d = len(a)
    if any(len(r) != d for r in a):
        raise ValueError("matrix must be square")

    def matmul(x, y):
        return [[sum(x[i][k] * y[k][j] for k in range(d)) for j in range(d)] for i in range(d)]

    coeffs = [1]
    mk = [[0] * d for _ in range(d)]
    c_prev = 1
    for k in range(1, d + 1):
        # M_k = A M_{k-1} + c_{k-1} I ;  c_k = -tr(A M_k) / k
        mk = [[v + (c_prev if i == j else 0) for j, v in enumerate(row)] for i, row in enumerate(matmul(a, mk))]
        am = matmul(a, mk)
        tr = sum(am[i][i] for i in range(d))
        if isinstance(tr, int):
            c_prev = Fraction(-tr, k)
            c_prev = int(c_prev) if c_prev.denominator == 1 else c_prev
        else:
            c_prev = -tr / k
        coeffs.append(c_prev)
    return coeffs


def eigenvalues(mtx: C1Matrix) -> list[complex]:
    return poly_roots(char_poly(mtx))


@dataclass(frozen=True)
class MultisetMatch:
    pairs: tuple[tuple[complex, complex, float], ...]
    max_distance: float
    unmatched_a: tuple[complex, ...] = ()
    unmatched_b: tuple[complex, ...] = ()
    tol: float = field(default=0.0, compare=False)

    @property
    def ok(self) -> bool:
        return not self.unmatched_a and not self.unmatched_b and self.max_distance <= self.tol

    def to_dict(self) -> dict:
        return {
            "pairs": [{"a": _c(a), "b": _c(b), "distance": _f(d)} for a, b, d in self.pairs],
            "max_distance": _f(self.max_distance),
            "unmatched_a": [_c(v) for v in self.unmatched_a],
            "unmatched_b": [_c(v) for v in self.unmatched_b],
            "tol": _f(self.tol),
            "ok": self.ok,
        }


def _f(x: float) -> float:
    return float(format(float(x), ".17g"))


def _c(z: complex) -> list[float]:
    return [_f(z.real), _f(z.imag)]


def _sort_c(values):
    return tuple(sorted(values, key=lambda v: (v.real, v.imag)))


def match_multisets(a: Sequence[complex], b: Sequence[complex], tol: float = 1e-8) -> MultisetMatch:
    """Minimum-cost pairing of two multisets of complex numbers.

    Pairs farther apart than ``tol`` are not accepted; their members are
    reported as unmatched along with any leftovers when sizes differ.
    """
    a = [complex(v) for v in a]
    b = [complex(v) for v in b]
    if not a or not b:
        return MultisetMatch((), 0.0, _sort_c(a), _sort_c(b), tol)
    dist = np.abs(np.subtract.outer(np.array(a), np.array(b)))
    # Pairs beyond tol cost more than any set of within-tol pairs, so the
    # assignment first maximizes the number of acceptable pairs.
    penalty = 1.0 + dist.sum()
    cost = np.where(dist <= tol, dist, penalty + dist)
    rows, cols = linear_sum_assignment(cost)
    pairs, used_a, used_b = [], set(), set()
    for i, j in zip(rows, cols):
        if dist[i, j] <= tol:
            pairs.append((a[i], b[j], float(dist[i, j])))
            used_a.add(i)
            used_b.add(j)
    pairs.sort(key=lambda p: (p[0].real, p[0].imag, p[1].real, p[1].imag))
    maxd = max((p[2] for p in pairs), default=0.0)
    ua = _sort_c(v for i, v in enumerate(a) if i not in used_a)
    ub = _sort_c(v for j, v in enumerate(b) if j not in used_b)
    return MultisetMatch(tuple(pairs), maxd, ua, ub, tol)
