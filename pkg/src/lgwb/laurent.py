"""Sparse Laurent polynomials and rational functions.

Coefficients are scalars (exact ``Fraction``/``int``, or ``float``/``complex``
in numeric work) times monomials in named formal parameters such as ``q``.
A term is keyed by ``(exponents, param_monomial)`` where ``param_monomial``
is a sorted tuple of ``(name, exponent)`` pairs with nonzero exponents.

Terms are kept in lexicographic key order, so structural equality of two
polynomials is mathematical equality (for exact coefficients).
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Number
from typing import Iterable, Mapping, Sequence

import numpy as np

ParamMono = tuple[tuple[str, int], ...]
Key = tuple[tuple[int, ...], ParamMono]


def _pm_mul(a: ParamMono, b: ParamMono) -> ParamMono:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for name, e in b:
        d[name] = d.get(name, 0) + e
    return tuple(sorted((k, v) for k, v in d.items() if v != 0))


def _pm_pow(a: ParamMono, k: int) -> ParamMono:
    return tuple((name, e * k) for name, e in a) if k else ()


def _scalar_inv(c):
    if isinstance(c, int):
        return Fraction(1, c)
    return 1 / c


def _fmt_scalar(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    if isinstance(c, int):
        return str(c)
    if isinstance(c, complex):
        if c.imag == 0:
            return format(c.real, ".17g")
        return f"({c.real:.17g}{c.imag:+.17g}j)"
    return format(c, ".17g")


def _is_real_negative(c) -> bool:
    if isinstance(c, complex):
        return c.imag == 0 and c.real < 0
    return c < 0


class LaurentPoly:
    """Immutable sparse Laurent polynomial in ``nvars`` torus variables."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Key, Number] | Iterable[tuple[Key, Number]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Key, Number] = {}
        for (exp, pm), c in items:
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars:
                raise ValueError(f"exponent {exp} has wrong length for {nvars} variables")
            pm = tuple(sorted((str(n), int(e)) for n, e in pm if e != 0))
            key = (exp, pm)
            acc[key] = acc.get(key, 0) + c
        self.nvars = nvars
        self._terms = tuple(sorted((k, c) for k, c in acc.items() if c != 0))
        self._hash = None

    # construction helpers
    @classmethod
    def zero(cls, nvars: int) -> "LaurentPoly":
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, c=1) -> "LaurentPoly":
        return cls(nvars, {((0,) * nvars, ()): c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "LaurentPoly":
        exp = [0] * nvars
        exp[i] = 1
        return cls(nvars, {(tuple(exp), ()): 1})

    @classmethod
    def gens(cls, nvars: int) -> list["LaurentPoly"]:
        return [cls.var(nvars, i) for i in range(nvars)]

    @classmethod
    def monomial(cls, exp: Sequence[int], coeff=1, params: Mapping[str, int] | None = None) -> "LaurentPoly":
        pm = tuple(sorted((params or {}).items()))
        return cls(len(exp), {(tuple(exp), pm): coeff})

    @classmethod
    def param(cls, nvars: int, name: str, power: int = 1) -> "LaurentPoly":
        return cls(nvars, {((0,) * nvars, ((name, power),)): 1})

    # inspection
    @property
    def terms(self) -> tuple[tuple[Key, Number], ...]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def params(self) -> set[str]:
        return {name for (_, pm), _ in self._terms for name, _ in pm}

    def exponents(self) -> list[tuple[int, ...]]:
        return [exp for (exp, _), _ in self._terms]

    def constant_term(self) -> Number:
        """Scalar coefficient of z^0 with no parameter factor."""
        for (exp, pm), c in self._terms:
            if not pm and not any(exp):
                return c
        return 0

    # arithmetic
    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.nvars != self.nvars:
                raise ValueError(f"mismatched nvars: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, Number):
            return LaurentPoly.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, LaurentRational):
            return LaurentRational(self) + other
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return LaurentPoly(self.nvars, self._terms + o._terms)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.nvars, [(k, -c) for k, c in self._terms])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, LaurentRational):
            return LaurentRational(self) * other
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        acc: dict[Key, Number] = {}
        for (e1, p1), c1 in self._terms:
            for (e2, p2), c2 in o._terms:
                key = (tuple(a + b for a, b in zip(e1, e2)), _pm_mul(p1, p2))
                acc[key] = acc.get(key, 0) + c1 * c2
        return LaurentPoly(self.nvars, acc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("exponent must be an integer")
        if k < 0:
            if self.is_monomial():
                return self.monomial_inverse() ** (-k)
            return LaurentRational(LaurentPoly.const(self.nvars, 1), self ** (-k))
        if self.is_monomial():
            (exp, pm), c = self._terms[0]
            return LaurentPoly(self.nvars, {(tuple(e * k for e in exp), _pm_pow(pm, k)): c ** k})
        result = LaurentPoly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def monomial_inverse(self) -> "LaurentPoly":
        if not self.is_monomial():
            raise ValueError("only monomials are invertible in the Laurent ring")
        (exp, pm), c = self._terms[0]
        return LaurentPoly(self.nvars, {(tuple(-e for e in exp), _pm_pow(pm, -1)): _scalar_inv(c)})

    def __truediv__(self, other):
        if isinstance(other, Number):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * _scalar_inv(other)
        return LaurentRational(self) / other

    def __rtruediv__(self, other):
        return LaurentRational(self._coerce(other)) / self

    def __eq__(self, other) -> bool:
        if isinstance(other, Number):
            other = LaurentPoly.const(self.nvars, other)
        if isinstance(other, LaurentRational):
            return rational_eq(LaurentRational(self), other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, self._terms))
        return self._hash

    # calculus and evaluation
    def log_derivative(self, i: int) -> "LaurentPoly":
        """``z_i * d/dz_i`` (0-based variable index)."""
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range for {self.nvars} variables")
        return LaurentPoly(self.nvars, [((exp, pm), exp[i] * c) for (exp, pm), c in self._terms])

    def specialize(self, params: Mapping[str, Number]) -> "LaurentPoly":
        """Replace named parameters by numbers (all or some)."""
        out = []
        for (exp, pm), c in self._terms:
            rest = []
            for name, e in pm:
                if name in params:
                    c = c * params[name] ** e
                else:
                    rest.append((name, e))
            out.append(((exp, tuple(rest)), c))
        return LaurentPoly(self.nvars, out)

    def eval(self, z: Sequence[complex], params: Mapping[str, complex] | None = None) -> complex:
        if len(z) != self.nvars:
            raise ValueError(f"expected {self.nvars} coordinates, got {len(z)}")
        if any(zi == 0 for zi in z):
            raise ValueError("evaluation at a zero coordinate")
        params = params or {}
        total = 0j
        for (exp, pm), c in self._terms:
            v = complex(c)
            for name, e in pm:
                if name not in params:
                    raise ValueError(f"parameter {name!r} is not assigned")
                v *= complex(params[name]) ** e
            for zi, e in zip(z, exp):
                if e:
                    v *= complex(zi) ** e
            total += v
        return total

    def to_arrays(self, params: Mapping[str, complex] | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Exponent matrix (terms x nvars) and complex coefficient vector."""
        p = self.specialize(params or {})
        if p.params():
            raise ValueError(f"unassigned parameters: {sorted(p.params())}")
        exps = np.array([exp for (exp, _), _ in p._terms], dtype=float).reshape(len(p), self.nvars)
        coeffs = np.array([complex(c) for _, c in p._terms], dtype=complex)
        return exps, coeffs

    def to_text(self, names: Sequence[str] | None = None) -> str:
        if not self._terms:
            return "0"
        names = names or [f"z{i + 1}" for i in range(self.nvars)]
        parts = []
        for (exp, pm), c in self._terms:
            factors = [n if e == 1 else f"{n}^{e}" for n, e in pm]
            factors += [n if e == 1 else f"{n}^{e}" for n, e in zip(names, exp) if e != 0]
            neg = _is_real_negative(c)
            mag = -c if neg else c
            if factors and mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([_fmt_scalar(mag)] + factors)
            parts.append(("-" if neg else "+", body))
        sign, body = parts[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self) -> str:
        return f"LaurentPoly({self.to_text()!r})"

    __str__ = to_text


class LaurentRational:
    """Quotient ``num/den`` of Laurent polynomials in normalized form.

    Normalization divides out a monomial denominator entirely; otherwise it
    shifts the denominator so its minimal exponents are zero and scales it
    so its leading scalar is 1.  No polynomial GCD is taken, so use
    :func:`rational_eq` (cross-multiplication) for equality.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly | None = None):
        if den is None:
            den = LaurentPoly.const(num.nvars, 1)
        if num.nvars != den.nvars:
            raise ValueError("numerator and denominator have different nvars")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        n = num.nvars
        if num.is_zero():
            num, den = num, LaurentPoly.const(n, 1)
        elif den.is_monomial():
            num, den = num * den.monomial_inverse(), LaurentPoly.const(n, 1)
        else:
            shift_exp = [min(exp[j] for exp in den.exponents()) for j in range(n)]
            names = den.params()
            shift_pm = {name: min(dict(pm).get(name, 0) for (_, pm), _ in den.terms) for name in names}
            lead = den.terms[0][1]
            m = LaurentPoly.monomial(shift_exp, lead, shift_pm).monomial_inverse()
            num, den = num * m, den * m
            quo = _exact_quotient(num, den)
            if quo is not None:
                num, den = quo, LaurentPoly.const(n, 1)
        self.num = num
        self.den = den

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def is_polynomial(self) -> bool:
        return self.den == LaurentPoly.const(self.nvars, 1)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    @staticmethod
    def _lift(x, nvars: int) -> "LaurentRational":
        if isinstance(x, LaurentRational):
            return x
        if isinstance(x, LaurentPoly):
            return LaurentRational(x)
        if isinstance(x, Number):
            return LaurentRational(LaurentPoly.const(nvars, x))
        raise TypeError(f"cannot combine LaurentRational with {type(x).__name__}")

    def __add__(self, other):
        o = self._lift(other, self.nvars)
        if self.den == o.den:
            return LaurentRational(self.num + o.num, self.den)
        return LaurentRational(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return LaurentRational(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._lift(other, self.nvars))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other, self.nvars)
        return LaurentRational(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other, self.nvars)
        if o.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return LaurentRational(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._lift(other, self.nvars) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("exponent must be an integer")
        if k < 0:
            if self.num.is_zero():
                raise ZeroDivisionError("zero to a negative power")
            return LaurentRational(self.den ** (-k), self.num ** (-k))
        return LaurentRational(self.num ** k, self.den ** k)

    def __eq__(self, other):
        if isinstance(other, (LaurentPoly, Number)):
            other = self._lift(other, self.nvars)
        if not isinstance(other, LaurentRational):
            return NotImplemented
        return rational_eq(self, other)

    __hash__ = None

    def eval(self, z: Sequence[complex], params: Mapping[str, complex] | None = None) -> complex:
        d = self.den.eval(z, params)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at this point")
        return self.num.eval(z, params) / d

    def specialize(self, params: Mapping[str, Number]) -> "LaurentRational":
        return LaurentRational(self.num.specialize(params), self.den.specialize(params))

    def to_text(self, names: Sequence[str] | None = None) -> str:
        if self.is_polynomial():
            return self.num.to_text(names)
        return f"({self.num.to_text(names)})/({self.den.to_text(names)})"

    def __repr__(self) -> str:
        return f"LaurentRational({self.to_text()!r})"

    __str__ = to_text


def _is_exact(c) -> bool:
    return isinstance(c, (int, Fraction))


def _exact_quotient(num: LaurentPoly, den: LaurentPoly) -> LaurentPoly | None:
    """``num/den`` as a Laurent polynomial when the division is exact, else None.

    Single-divisor division in the polynomial ring obtained by shifting both
    sides to nonnegative exponents (parameters treated as extra variables),
    lexicographic order.  Only attempted for exact coefficients.
    """
    if not all(_is_exact(c) for _, c in num.terms + den.terms):
        return None
    n = num.nvars
    names = sorted(num.params() | den.params())

    def flat(p: LaurentPoly) -> dict[tuple[int, ...], Fraction]:
        return {exp + tuple(dict(pm).get(nm, 0) for nm in names): Fraction(c) for (exp, pm), c in p.terms}

    nn, dd = flat(num), flat(den)
    width = n + len(names)
    s_n = [min(k[j] for k in nn) for j in range(width)]
    s_d = [min(k[j] for k in dd) for j in range(width)]
    rem = {tuple(a - b for a, b in zip(k, s_n)): c for k, c in nn.items()}
    div = {tuple(a - b for a, b in zip(k, s_d)): c for k, c in dd.items()}
    lead_k = max(div)
    lead_c = div[lead_k]
    quo: dict[tuple[int, ...], Fraction] = {}
    while rem:
        k = max(rem)
        shift = tuple(a - b for a, b in zip(k, lead_k))
        if any(v < 0 for v in shift):
            return None
        c = rem[k] / lead_c
        quo[shift] = quo.get(shift, 0) + c
        for dk, dc in div.items():
            key = tuple(a + b for a, b in zip(dk, shift))
            v = rem.get(key, 0) - c * dc
            if v == 0:
                rem.pop(key, None)
            else:
                rem[key] = v
    out = []
    for k, c in quo.items():
        full = [a + b - d for a, b, d in zip(k, s_n, s_d)]
        pm = tuple((nm, e) for nm, e in zip(names, full[n:]) if e)
        out.append(((tuple(full[:n]), pm), c))
    return LaurentPoly(n, out)


def as_rational(x, nvars: int | None = None) -> LaurentRational:
    if isinstance(x, LaurentRational):
        return x
    if isinstance(x, LaurentPoly):
        return LaurentRational(x)
    if nvars is not None and isinstance(x, Number):
        return LaurentRational(LaurentPoly.const(nvars, x))
    raise TypeError(f"not a Laurent expression: {x!r}")


def rational_eq(r1, r2) -> bool:
    """Exact equality of rational functions by cross-multiplication."""
    a, b = as_rational(r1), as_rational(r2)
    if a.nvars != b.nvars:
        raise ValueError("mismatched nvars")
    return a.num * b.den == b.num * a.den


def log_derivative(p: LaurentPoly, i: int) -> LaurentPoly:
    return p.log_derivative(i)


def evaluate(p, z: Sequence[complex], params: Mapping[str, complex] | None = None) -> complex:
    return p.eval(z, params)


def _assignments(m) -> list[LaurentRational]:
    seq = getattr(m, "assignments", m)
    vals = [as_rational(a) for a in seq]
    if not vals:
        raise ValueError("empty substitution")
    n = vals[0].nvars
    if any(v.nvars != n for v in vals):
        raise ValueError("substitution values live in different rings")
    return vals


def substitute(p, m) -> LaurentRational:
    """Substitute ``z_i -> m[i]`` into a Laurent polynomial or rational function.

    ``m`` is a sequence of Laurent expressions (or an object exposing them
    as ``.assignments``), all in the same target variables.
    """
    vals = _assignments(m)
    if isinstance(p, LaurentRational):
        num = substitute(p.num, vals)
        den = substitute(p.den, vals)
        if den.is_zero():
            raise ZeroDivisionError("substitution makes the denominator vanish")
        return num / den
    if len(vals) != p.nvars:
        raise ValueError(f"substitution assigns {len(vals)} variables, polynomial has {p.nvars}")
    n = vals[0].nvars
    one = LaurentPoly.const(n, 1)
    exps = p.exponents()
    unit = [v.is_polynomial() and v.num.is_monomial() for v in vals]
    for i, v in enumerate(vals):
        if v.is_zero() and any(e[i] < 0 for e in exps):
            raise ZeroDivisionError(f"variable {i} is sent to zero but appears with a negative power")
    # Common denominator prod_i n_i^N_i d_i^P_i over non-monomial assignments;
    # each term then contributes prod_i n_i^(N_i + a_i) d_i^(P_i - a_i).
    pos = [max([0] + [e[i] for e in exps]) for i in range(p.nvars)]
    neg = [max([0] + [-e[i] for e in exps]) for i in range(p.nvars)]
    cache: dict[tuple[int, str, int], LaurentPoly] = {}

    def power(i: int, which: str, k: int) -> LaurentPoly:
        key = (i, which, k)
        if key not in cache:
            base = vals[i].num if which == "n" else vals[i].den
            cache[key] = base ** k
        return cache[key]

    den = one
    for i in range(p.nvars):
        if not unit[i]:
            den = den * power(i, "n", neg[i]) * power(i, "d", pos[i])
    num = LaurentPoly.zero(n)
    for (exp, pm), c in p.terms:
        t = LaurentPoly(n, {((0,) * n, pm): c})
        for i, a in enumerate(exp):
            if unit[i]:
                if a:
                    t = t * power(i, "n", a)
            else:
                t = t * power(i, "n", neg[i] + a) * power(i, "d", pos[i] - a)
        num = num + t
    return LaurentRational(num, den)
