"""Exact arithmetic in a number field K = Q[x]/(f) and its order Z[theta].

The integral basis is always the power basis 1, theta, ..., theta^(d-1) of
the defining polynomial; callers are responsible for choosing f so that this
basis spans the full ring of integers.
"""
from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from . import linalg, upoly
from .errors import FieldMismatch, NotIrreducible, NotMonic, ZeroDivisor, ZeroInput

Rational = Union[int, Fraction]

IRREDUCIBILITY_PRIME_BOUND = 101


class NumberFieldSpec:
    """Degree-d field with power basis and integer structure constants.

    ``structure_constants[j][l][m]`` is the coefficient of b_m in b_j * b_l
    (0-indexed, b_j = theta^j).
    """

    __slots__ = ("min_poly", "degree", "structure_constants", "certificate", "name", "__dict__")

    def __init__(self, min_poly: Sequence[int], certificate: Optional[int], name: Optional[str] = None):
        self.min_poly: Tuple[int, ...] = tuple(int(c) for c in min_poly)
        self.degree = len(self.min_poly) - 1
        self.certificate = certificate
        self.name = name
        d = self.degree
        powers = _reduced_powers(self.min_poly, 2 * d - 1)
        self.structure_constants = tuple(
            tuple(tuple(powers[j + l]) for l in range(d)) for j in range(d)
        )

    def __eq__(self, other):
        return isinstance(other, NumberFieldSpec) and self.min_poly == other.min_poly

    def __hash__(self):
        return hash(self.min_poly)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<NumberFieldSpec{label} {upoly.format_poly(self.min_poly)}>"

    def element(self, coords: Iterable[Rational]) -> "AlgebraicNumber":
        return AlgebraicNumber(self, coords)

    def integer(self, coords: Iterable[int]) -> "AlgebraicNumber":
        a = AlgebraicNumber(self, coords)
        if not a.is_integral():
            raise ValueError(f"coordinates {list(coords)} are not integral")
        return a

    def scalar(self, c: Rational) -> "AlgebraicNumber":
        return AlgebraicNumber(self, [c] + [0] * (self.degree - 1))

    @cached_property
    def zero(self) -> "AlgebraicNumber":
        return self.scalar(0)

    @cached_property
    def one(self) -> "AlgebraicNumber":
        return self.scalar(1)

    @cached_property
    def theta(self) -> "AlgebraicNumber":
        if self.degree == 1:
            return self.scalar(-self.min_poly[0])
        return AlgebraicNumber(self, [0, 1] + [0] * (self.degree - 2))

    def basis(self) -> List["AlgebraicNumber"]:
        d = self.degree
        return [AlgebraicNumber(self, [int(i == j) for i in range(d)]) for j in range(d)]

    def to_dict(self) -> dict:
        out = {"min_poly": list(self.min_poly)}
        if self.name:
            out["name"] = self.name
        return out


def _reduced_powers(f: Sequence[int], count: int) -> List[List[int]]:
    # theta^k expressed in the power basis, for k < count
    d = len(f) - 1
    vec = [1] + [0] * (d - 1)
    out = [list(vec)]
    for _ in range(1, count):
        top = vec[-1]
        vec = [0] + vec[:-1]
        vec = [v - top * c for v, c in zip(vec, f[:-1])]
        out.append(list(vec))
    return out


def make_field(min_poly: Sequence[Rational], assert_irreducible: bool = False,
               name: Optional[str] = None) -> NumberFieldSpec:
    """Build a field spec from a monic integer polynomial [c_0, ..., c_{d-1}, 1].

    Irreducibility is certified by finding a prime p <= 101 modulo which the
    polynomial stays irreducible.  Pass ``assert_irreducible=True`` to accept
    a polynomial (such as x^4 + 1) that is reducible modulo every prime.
    """
    coeffs = [Fraction(c) for c in min_poly]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) < 2:
        raise NotMonic("defining polynomial must have degree >= 1")
    if any(c.denominator != 1 for c in coeffs):
        raise NotMonic("defining polynomial must have integer coefficients")
    if coeffs[-1] != 1:
        raise NotMonic(f"leading coefficient is {coeffs[-1]}, expected 1")
    ints = [int(c) for c in coeffs]
    cert = certify_irreducible(ints)
    if cert is None and not assert_irreducible:
        raise NotIrreducible(
            f"{upoly.format_poly(ints)} is not irreducible modulo any prime <= {IRREDUCIBILITY_PRIME_BOUND}"
        )
    return NumberFieldSpec(ints, cert, name)


def certify_irreducible(f: Sequence[int]) -> Optional[int]:
    """Smallest prime p <= 101 with f irreducible over F_p, or None."""
    if len(f) == 2:
        return 1
    for p in upoly.primes_up_to(IRREDUCIBILITY_PRIME_BOUND):
        if upoly.fp_is_irreducible(f, p):
            return p
    return None


class AlgebraicNumber:
    """Element of K as a vector of rational coordinates over the power basis."""

    __slots__ = ("field", "coords")

    def __init__(self, field: NumberFieldSpec, coords: Iterable[Rational]):
        c = tuple(Fraction(x) for x in coords)
        if len(c) != field.degree:
            raise ValueError(f"expected {field.degree} coordinates, got {len(c)}")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coords", c)

    def __setattr__(self, key, value):
        raise AttributeError("AlgebraicNumber is immutable")

    def __repr__(self):
        return f"AlgebraicNumber({[str(c) for c in self.coords]})"

    def __str__(self):
        return upoly.format_poly(self.coords, "t")

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.scalar(other)
        if not isinstance(other, AlgebraicNumber):
            return NotImplemented
        return self.field == other.field and self.coords == other.coords

    def __hash__(self):
        return hash((self.field.min_poly, self.coords))

    def _coerce(self, other) -> "AlgebraicNumber":
        if isinstance(other, AlgebraicNumber):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.scalar(other)
        raise TypeError(f"cannot combine AlgebraicNumber with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        return AlgebraicNumber(self.field, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicNumber(self.field, [-a for a in self.coords])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        return mul(self, self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * inverse(self._coerce(other))

    def __pow__(self, e: int):
        if e < 0:
            return inverse(self) ** (-e)
        result = self.field.one
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def int_coords(self) -> List[int]:
        if not self.is_integral():
            raise ValueError("element is not integral")
        return [int(c) for c in self.coords]

    def denominator(self) -> int:
        return linalg.denominator_lcm(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])


# Elements with integer coordinates; kept as the same runtime type.
AlgebraicInteger = AlgebraicNumber


def mul(a: AlgebraicNumber, b: AlgebraicNumber, field: Optional[NumberFieldSpec] = None) -> AlgebraicNumber:
    field = field or a.field
    if a.field != field or b.field != field:
        raise FieldMismatch("operands belong to different fields")
    d = field.degree
    S = field.structure_constants
    out = [Fraction(0)] * d
    for j, x in enumerate(a.coords):
        if not x:
            continue
        Sj = S[j]
        for l, y in enumerate(b.coords):
            if not y:
                continue
            xy = x * y
            for m, s in enumerate(Sj[l]):
                if s:
                    out[m] += xy * s
    return AlgebraicNumber(field, out)


def mult_matrix(alpha: AlgebraicNumber, field: Optional[NumberFieldSpec] = None) -> List[List[Fraction]]:
    """Matrix of x -> alpha*x; column m holds the coordinates of alpha*b_m."""
    field = field or alpha.field
    cols = [mul(alpha, b, field).coords for b in field.basis()]
    return [list(row) for row in zip(*cols)]


def norm(alpha: AlgebraicNumber) -> Fraction:
    return linalg.det(mult_matrix(alpha))


def inverse(alpha: AlgebraicNumber) -> AlgebraicNumber:
    if alpha.is_zero():
        raise ZeroDivisor("zero has no inverse")
    sol = linalg.solve(mult_matrix(alpha), alpha.field.one.coords)
    return AlgebraicNumber(alpha.field, sol)


def char_poly(alpha: AlgebraicNumber) -> List[Fraction]:
    return upoly.charpoly(mult_matrix(alpha))


def min_poly_of(alpha: AlgebraicNumber, field: Optional[NumberFieldSpec] = None) -> List[Fraction]:
    """Monic minimal polynomial over Q, low degree first.

    The characteristic polynomial of the multiplication matrix is a power of
    the minimal polynomial, so its squarefree part is the answer.
    """
    return upoly.squarefree_part(char_poly(alpha))


def conjugates_negate(alpha: AlgebraicNumber, field: Optional[NumberFieldSpec] = None) -> bool:
    """True iff two conjugates of alpha over Q are negatives of each other."""
    if alpha.is_zero():
        raise ZeroInput("conjugate-negation test needs a nonzero element")
    m = min_poly_of(alpha)
    return upoly.degree(upoly.gcd(m, upoly.reflect(m))) >= 1


def ratio_conjugates_negate(r: AlgebraicNumber, s: AlgebraicNumber) -> bool:
    """Conjugate-negation test applied to s/r."""
    return conjugates_negate(s / r)


# --- finite-index subgroups r*O_K --------------------------------------------

def _check_modulus(r: AlgebraicNumber) -> None:
    if r.is_zero():
        raise ZeroDivisor("modulus r must be nonzero")


def subgroup_basis(r: AlgebraicNumber) -> List[List[int]]:
    """HNF basis (rows) of the lattice r*O_K inside Z^d."""
    _check_modulus(r)
    if not r.is_integral():
        raise ValueError("modulus must be an algebraic integer")
    M = mult_matrix(r)
    cols = [[int(x) for x in col] for col in zip(*M)]
    return linalg.hnf(cols)


def subgroup_index(r: AlgebraicNumber) -> int:
    H = subgroup_basis(r)
    out = 1
    for i, row in enumerate(H):
        out *= row[i]
    return out


def subgroup_membership(n: AlgebraicNumber, r: AlgebraicNumber, field: Optional[NumberFieldSpec] = None) -> bool:
    """Whether n lies in r*O_K, by solving M_r x = coords(n) over Z."""
    _check_modulus(r)
    x = linalg.solve(mult_matrix(r), n.coords)
    return x is not None and all(c.denominator == 1 for c in x)


class ResidueReducer:
    """Canonical reduction of O_K modulo r*O_K using its HNF basis."""

    def __init__(self, r: AlgebraicNumber):
        self.modulus = r
        self.basis = subgroup_basis(r)
        self.diagonal = [row[i] for i, row in enumerate(self.basis)]
        self.index = 1
        for h in self.diagonal:
            self.index *= h

    def reduce_coords(self, v: Sequence[int]) -> Tuple[int, ...]:
        v = list(v)
        for i, row in enumerate(self.basis):
            q = v[i] // self.diagonal[i]
            if q:
                for j in range(i, len(v)):
                    v[j] -= q * row[j]
        return tuple(v)

    def reduce(self, n: AlgebraicNumber) -> AlgebraicNumber:
        return AlgebraicNumber(n.field, self.reduce_coords(n.int_coords()))

    def contains(self, n: AlgebraicNumber) -> bool:
        if not n.is_integral():
            return False
        return not any(self.reduce_coords(n.int_coords()))

    def representatives(self) -> List[Tuple[int, ...]]:
        out: List[Tuple[int, ...]] = [()]
        for h in self.diagonal:
            out = [t + (c,) for t in out for c in range(h)]
        return out


def residues(r: AlgebraicNumber, field: Optional[NumberFieldSpec] = None) -> List[AlgebraicNumber]:
    """|N(r)| representatives of O_K / r O_K from the HNF fundamental domain."""
    red = ResidueReducer(r)
    return [AlgebraicNumber(r.field, c) for c in red.representatives()]


def field_from_dict(data: dict, assert_irreducible: bool = False) -> NumberFieldSpec:
    return make_field(data["min_poly"], assert_irreducible=assert_irreducible or data.get("assert_irreducible", False),
                      name=data.get("name"))
