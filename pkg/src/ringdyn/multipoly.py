"""Sparse multivariate polynomials with exact rational coefficients."""
from __future__ import annotations

from fractions import Fraction
from math import comb, factorial
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

Monomial = Tuple[int, ...]
Scalar = Union[int, Fraction]


def _mono_key(m: Monomial):
    return (sum(m), m)


class MultiPolyQ:
    """Polynomial in x_1..x_n stored as {exponent tuple: Fraction}.

    Zero coefficients are never stored.  Instances are immutable and
    hashable; iteration order is graded-lexicographic.
    """

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Monomial, Scalar] | None = None):
        self.nvars = nvars
        clean: Dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            if len(mono) != nvars:
                raise ValueError(f"monomial {mono} has wrong arity for {nvars} variables")
            c = Fraction(c)
            if c:
                clean[tuple(mono)] = c
        self._terms = dict(sorted(clean.items(), key=lambda kv: _mono_key(kv[0])))
        self._hash = None

    # constructors
    @classmethod
    def constant(cls, nvars: int, c: Scalar) -> "MultiPolyQ":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def zero(cls, nvars: int) -> "MultiPolyQ":
        return cls(nvars)

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MultiPolyQ":
        mono = tuple(int(j == i) for j in range(nvars))
        return cls(nvars, {mono: 1})

    @classmethod
    def variables(cls, nvars: int) -> List["MultiPolyQ"]:
        return [cls.variable(nvars, i) for i in range(nvars)]

    @classmethod
    def univariate(cls, coeffs: Sequence[Scalar], nvars: int = 1, var: int = 0) -> "MultiPolyQ":
        terms = {}
        for k, c in enumerate(coeffs):
            mono = tuple(k if j == var else 0 for j in range(nvars))
            terms[mono] = c
        return cls(nvars, terms)

    # inspection
    @property
    def terms(self) -> Dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def monomials(self) -> List[Monomial]:
        return list(self._terms)

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(tuple(mono), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def total_degree(self) -> int:
        return max((sum(m) for m in self._terms), default=-1)

    def degree_in(self, i: int) -> int:
        return max((m[i] for m in self._terms), default=-1)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def is_constant(self) -> bool:
        return all(not any(m) for m in self._terms)

    def denominator(self) -> int:
        from math import lcm
        out = 1
        for c in self._terms.values():
            out = lcm(out, c.denominator)
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPolyQ.constant(self.nvars, other)
        if not isinstance(other, MultiPolyQ):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, tuple(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"MultiPolyQ({self.nvars}, {self})"

    def __str__(self):
        if not self._terms:
            return "0"
        names = [f"x{i + 1}" for i in range(self.nvars)]
        parts = []
        for mono, c in sorted(self._terms.items(), key=lambda kv: _mono_key(kv[0]), reverse=True):
            factors = []
            for name, e in zip(names, mono):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            body = "*".join(factors)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    # arithmetic
    def _coerce(self, other) -> "MultiPolyQ":
        if isinstance(other, MultiPolyQ):
            if other.nvars != self.nvars:
                raise ValueError("polynomials have different numbers of variables")
            return other
        if isinstance(other, (int, Fraction)):
            return MultiPolyQ.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for m, c in other._terms.items():
            terms[m] = terms.get(m, 0) + c
        return MultiPolyQ(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPolyQ(self.nvars, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return MultiPolyQ(self.nvars, {m: c * other for m, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                terms[m] = terms.get(m, 0) + c1 * c2
        return MultiPolyQ(self.nvars, terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, e: int):
        result = MultiPolyQ.constant(self.nvars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # calculus and evaluation
    def diff(self, i: int) -> "MultiPolyQ":
        terms = {}
        for m, c in self._terms.items():
            if m[i]:
                nm = list(m)
                nm[i] -= 1
                terms[tuple(nm)] = c * m[i]
        return MultiPolyQ(self.nvars, terms)

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = tuple(point[0])
        return self.evaluate(point)

    def evaluate(self, point: Sequence):
        """Evaluate at a point; entries may be ints, Fractions, or any ring elements."""
        total = 0
        for m, c in self._terms.items():
            term = c
            for x, e in zip(point, m):
                if e:
                    term = term * x ** e
            total = total + term
        return total

    def substitute(self, images: Sequence["MultiPolyQ"]) -> "MultiPolyQ":
        """Compose: replace x_i by images[i] (all in a common variable set)."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        if not images:
            return self
        target = images[0].nvars
        powers: Dict[Tuple[int, int], MultiPolyQ] = {}

        def pw(i, e):
            key = (i, e)
            if key not in powers:
                powers[key] = images[i] ** e
            return powers[key]

        total = MultiPolyQ.zero(target)
        for m, c in self._terms.items():
            term = MultiPolyQ.constant(target, c)
            for i, e in enumerate(m):
                if e:
                    term = term * pw(i, e)
            total = total + term
        return total

    def shift(self, s: Sequence[Scalar]) -> "MultiPolyQ":
        """p(x + s)."""
        xs = MultiPolyQ.variables(self.nvars)
        return self.substitute([x + si for x, si in zip(xs, s)])

    def binomial_coefficients(self) -> Dict[Monomial, Fraction]:
        """Coefficients in the basis prod_j C(x_j, k_j).

        Uses x^n = sum_k S(n, k) k! C(x, k) with Stirling numbers of the
        second kind, applied coordinate-wise.
        """
        out: Dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            expansions = [
                [(k, stirling2(e, k) * factorial(k)) for k in range(e + 1) if stirling2(e, k)]
                for e in m
            ]
            partial = [((), c)]
            for exp in expansions:
                partial = [(mono + (k,), coef * w) for mono, coef in partial for k, w in exp]
            for mono, coef in partial:
                out[mono] = out.get(mono, 0) + coef
        return {m: Fraction(v) for m, v in out.items() if v}


_STIRLING: Dict[Tuple[int, int], int] = {}


def stirling2(n: int, k: int) -> int:
    """Stirling numbers of the second kind."""
    if (n, k) in _STIRLING:
        return _STIRLING[(n, k)]
    if n == k:
        val = 1
    elif k == 0 or k > n:
        val = 0
    else:
        val = k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)
    _STIRLING[(n, k)] = val
    return val


def binomial_poly(p: MultiPolyQ, k: int) -> MultiPolyQ:
    """C(p, k) = p (p-1) ... (p-k+1) / k! as a polynomial."""
    out = MultiPolyQ.constant(p.nvars, 1)
    for j in range(k):
        out = out * (p - j)
    return out / factorial(k)


def binomial(n: int, k: int) -> int:
    """C(n, k) for any integer n (generalized binomial)."""
    if k < 0:
        return 0
    if n >= 0:
        return comb(n, k)
    return (-1) ** k * comb(k - n - 1, k)


def coefficient_matrix(polys: Iterable[MultiPolyQ], include_constant: bool = True):
    """Rows of monomial coefficients over the union of supports."""
    polys = list(polys)
    nvars = polys[0].nvars if polys else 0
    monos = set()
    for p in polys:
        monos.update(p.monomials())
    if include_constant:
        monos.add((0,) * nvars)
    order = sorted(monos, key=_mono_key)
    return [[p.coefficient(m) for m in order] for p in polys], order
