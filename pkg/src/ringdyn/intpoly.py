"""Polynomials over a number field K and the hypotheses placed on families of them.

Everything here is exact.  Multivariate questions are asked of the
coordinate polynomials p_1..p_d obtained by writing p(sum x_j b_j) in the
power basis.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import lcm
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import linalg, upoly
from .errors import DegreeLimit, PreconditionFailed, TooManyPolynomials, ZeroModulus
from .multipoly import MultiPolyQ, coefficient_matrix
from .ring import AlgebraicNumber, NumberFieldSpec, ResidueReducer, norm

MAX_DEGREE = 64

Coefficient = Union[int, Fraction, str, Sequence]


class PolyOverK:
    """Univariate polynomial with coefficients in K, lowest degree first."""

    __slots__ = ("field", "coefficients")

    def __init__(self, field: NumberFieldSpec, coefficients: Sequence[Union[AlgebraicNumber, int, Fraction]]):
        coeffs = [c if isinstance(c, AlgebraicNumber) else field.scalar(c) for c in coefficients]
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        if len(coeffs) - 1 > MAX_DEGREE:
            raise DegreeLimit(f"degree {len(coeffs) - 1} exceeds the limit of {MAX_DEGREE}")
        self.field = field
        self.coefficients: Tuple[AlgebraicNumber, ...] = tuple(coeffs)

    @classmethod
    def from_literal(cls, field: NumberFieldSpec, coeffs: Sequence[Coefficient]) -> "PolyOverK":
        """Build from scenario literals: each coefficient is a rational ("3/2")
        or a list of d rationals giving coordinates over the power basis."""
        out = []
        for c in coeffs:
            if isinstance(c, (list, tuple)):
                out.append(field.element([Fraction(str(x)) for x in c]))
            else:
                out.append(field.scalar(Fraction(str(c))))
        return cls(field, out)

    @classmethod
    def rational(cls, field: NumberFieldSpec, coeffs: Sequence[Union[int, Fraction, str]]) -> "PolyOverK":
        return cls(field, [field.scalar(Fraction(str(c))) for c in coeffs])

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __eq__(self, other):
        return isinstance(other, PolyOverK) and self.field == other.field and self.coefficients == other.coefficients

    def __hash__(self):
        return hash(self.coefficients)

    def __repr__(self):
        return f"PolyOverK({[str(c) for c in self.coefficients]})"

    def __call__(self, x: AlgebraicNumber) -> AlgebraicNumber:
        acc = self.field.zero
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def scale(self, c: Union[AlgebraicNumber, int, Fraction]) -> "PolyOverK":
        return PolyOverK(self.field, [a * c for a in self.coefficients])

    def __sub__(self, other: "PolyOverK") -> "PolyOverK":
        n = max(len(self.coefficients), len(other.coefficients))
        z = self.field.zero
        a = list(self.coefficients) + [z] * (n - len(self.coefficients))
        b = list(other.coefficients) + [z] * (n - len(other.coefficients))
        return PolyOverK(self.field, [x - y for x, y in zip(a, b)])

    def common_denominator(self) -> int:
        """Smallest positive integer clearing every coefficient coordinate."""
        out = 1
        for c in self.coefficients:
            out = lcm(out, c.denominator())
        return out

    def to_literal(self) -> list:
        return [[str(x) for x in c.coords] for c in self.coefficients]


@dataclass(frozen=True)
class CoordinateSystem:
    """Coordinate polynomials p_1..p_d with p(sum x_j b_j) = sum p_i(x) b_i."""

    field: NumberFieldSpec
    polys: Tuple[MultiPolyQ, ...]

    def __iter__(self):
        return iter(self.polys)

    def __len__(self):
        return len(self.polys)

    def __getitem__(self, i):
        return self.polys[i]

    def evaluate(self, coords: Sequence) -> List:
        return [p.evaluate(coords) for p in self.polys]

    def reconstruct(self, coords: Sequence) -> AlgebraicNumber:
        return self.field.element(self.evaluate(coords))


@dataclass(frozen=True)
class IntersectiveShift:
    xi: AlgebraicNumber
    D: AlgebraicNumber
    modulus: AlgebraicNumber
    samples_checked: int = 0


def _kmul(u: Sequence[MultiPolyQ], v: Sequence[MultiPolyQ], field: NumberFieldSpec) -> List[MultiPolyQ]:
    d = field.degree
    S = field.structure_constants
    nv = u[0].nvars
    out = [MultiPolyQ.zero(nv) for _ in range(d)]
    for j in range(d):
        if u[j].is_zero():
            continue
        for l in range(d):
            if v[l].is_zero():
                continue
            prod = u[j] * v[l]
            for m, s in enumerate(S[j][l]):
                if s:
                    out[m] = out[m] + prod * s
    return out


def coordinate_expand(p: PolyOverK, field: Optional[NumberFieldSpec] = None) -> CoordinateSystem:
    """Symbolic expansion of p(x_1 b_1 + ... + x_d b_d) through the structure constants."""
    field = field or p.field
    if p.degree > MAX_DEGREE:
        raise DegreeLimit(f"degree {p.degree} exceeds the limit of {MAX_DEGREE}")
    d = field.degree
    X = MultiPolyQ.variables(d)

    def const(a: AlgebraicNumber) -> List[MultiPolyQ]:
        return [MultiPolyQ.constant(d, c) for c in a.coords]

    acc = [MultiPolyQ.zero(d) for _ in range(d)]
    for c in reversed(p.coefficients):
        acc = _kmul(acc, X, field)
        acc = [a + b for a, b in zip(acc, const(c))]
    return CoordinateSystem(field, tuple(acc))


def is_z_valued(q: MultiPolyQ) -> bool:
    """Exact test for q(Z^n) in Z: all binomial-basis coefficients are integers."""
    return all(c.denominator == 1 for c in q.binomial_coefficients().values())


def is_ok_valued(p: PolyOverK, field: Optional[NumberFieldSpec] = None) -> bool:
    """Whether p maps O_K into O_K."""
    return all(is_z_valued(q) for q in coordinate_expand(p, field))


def independence_with_constants(family: Sequence[MultiPolyQ]) -> bool:
    """True iff {1} together with the family is linearly independent over Q."""
    family = list(family)
    if not family:
        return True
    one = MultiPolyQ.constant(family[0].nvars, 1)
    rows, _ = coefficient_matrix([one] + family)
    return linalg.rank(rows) == len(family) + 1


def coordinate_family(family: Sequence[PolyOverK], field: Optional[NumberFieldSpec] = None) -> List[MultiPolyQ]:
    out: List[MultiPolyQ] = []
    for p in family:
        out.extend(coordinate_expand(p, field))
    return out


def is_independent_family(family: Sequence[PolyOverK], field: Optional[NumberFieldSpec] = None) -> bool:
    """Independence over K, decided through the coordinate family over Q."""
    return independence_with_constants(coordinate_family(family, field))


def jacobian(family: Sequence[MultiPolyQ], nvars: int) -> List[List[MultiPolyQ]]:
    return [[p.diff(j) for j in range(nvars)] for p in family]


def _evaluation_points(nvars: int):
    # deterministic sequence: (1,0,..), (1,2,0,..), (1,2,4,..), ..., then (1,3,9,..), (1,5,25,..)
    for t in range(1, nvars + 1):
        yield tuple(2 ** i if i < t else 0 for i in range(nvars))
    for base in (3, 5, 7, 11, 13):
        yield tuple(base ** i for i in range(nvars))
        yield tuple((-1) ** i * (i + base) for i in range(nvars))


def _poly_det(M: List[List[MultiPolyQ]]) -> MultiPolyQ:
    n = len(M)
    if n == 1:
        return M[0][0]
    total = MultiPolyQ.zero(M[0][0].nvars)
    for j in range(n):
        if M[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _poly_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def jacobian_alg_independence(family: Sequence[MultiPolyQ], nvars: Optional[int] = None) -> bool:
    """Jacobian criterion: full generic rank of d(p_i)/d(x_j).

    A point where some maximal minor is nonzero certifies full rank.  If the
    deterministic point sequence finds none, small systems fall back to the
    symbolic minors; larger ones to a grid of side (total degree + 1), on
    which a nonzero minor cannot vanish identically.
    """
    family = list(family)
    if not family:
        return True
    nvars = nvars if nvars is not None else family[0].nvars
    k = len(family)
    if k > nvars:
        raise TooManyPolynomials(f"{k} polynomials in {nvars} variables cannot be algebraically independent")
    J = jacobian(family, nvars)

    def rank_at(pt) -> int:
        return linalg.rank([[Fraction(e.evaluate(pt)) for e in row] for row in J])

    for pt in _evaluation_points(nvars):
        if rank_at(pt) == k:
            return True
    if k <= 4:
        for cols in itertools.combinations(range(nvars), k):
            sub = [[row[c] for c in cols] for row in J]
            if not _poly_det(sub).is_zero():
                return True
        return False
    bound = sum(max(p.total_degree() - 1, 0) for p in family) + 1
    for pt in itertools.product(range(bound), repeat=nvars):
        if rank_at(pt) == k:
            return True
    return False


# --- intersectivity -------------------------------------------------------------

def _as_modulus(r, field: NumberFieldSpec) -> AlgebraicNumber:
    if not isinstance(r, AlgebraicNumber):
        r = field.scalar(r)
    if r.is_zero():
        raise ZeroModulus("modulus must be nonzero")
    if not r.is_integral():
        raise ValueError("modulus must be an algebraic integer")
    return r


def family_denominator(family: Sequence[PolyOverK]) -> int:
    out = 1
    for p in family:
        out = lcm(out, p.common_denominator())
    return out


def joint_intersectivity_search(family: Sequence[PolyOverK], r, field: Optional[NumberFieldSpec] = None,
                                check_valued: bool = True) -> Optional[AlgebraicNumber]:
    """First xi (in HNF residue order modulo r*Delta) with every p_i(xi) in r O_K.

    Values modulo r O_K depend only on xi modulo r*Delta*O_K, where Delta
    clears all coefficient denominators, so ``None`` certifies that the
    family has no common root modulo r.
    """
    family = list(family)
    field = field or family[0].field
    r = _as_modulus(r, field)
    if check_valued:
        for p in family:
            if not is_ok_valued(p, field):
                raise PreconditionFailed(f"{p!r} is not O_K-valued")
    target = ResidueReducer(r)
    if target.index == 1:
        return field.zero
    delta = family_denominator(family)
    systems = [coordinate_expand(p, field) for p in family]
    search = ResidueReducer(r * delta)
    for rep in search.representatives():
        ok = True
        for cs in systems:
            vals = [Fraction(q.evaluate(rep)) for q in cs]
            # a non-integral value is never in r O_K
            if any(v.denominator != 1 for v in vals):
                ok = False
                break
            if target.reduce_coords([int(v) for v in vals]) != (0,) * field.degree:
                ok = False
                break
        if ok:
            return field.element(rep)
    return None


def intersective_shift(family: Sequence[PolyOverK], r, xi: AlgebraicNumber,
                       field: Optional[NumberFieldSpec] = None, samples: int = 100,
                       seed: int = 0) -> IntersectiveShift:
    """Return D with p_i(xi + D n) in r O_K for every n in O_K.

    D = r * lcm(D_1, ..., D_k) where D_i is the least common denominator of
    p_i's coefficients; units r give D = 1.  The inclusion is re-checked on
    ``samples`` pseudorandom n.
    """
    family = list(family)
    field = field or xi.field
    r = _as_modulus(r, field)
    target = ResidueReducer(r)
    for p in family:
        if not target.contains(p(xi)):
            raise PreconditionFailed(f"p({xi}) is not in r*O_K for p = {p!r}")
    if abs(norm(r)) == 1:
        D = field.one
    else:
        D = r * family_denominator(family)
    rng = random.Random(seed)
    d = field.degree
    for _ in range(samples):
        n = field.element([rng.randint(-1000, 1000) for _ in range(d)])
        x = xi + D * n
        for p in family:
            if not target.contains(p(x)):
                raise AssertionError(f"shift postcondition failed at n={n}")
    return IntersectiveShift(xi, D, r, samples)


def default_moduli(field: NumberFieldSpec) -> List[AlgebraicNumber]:
    """Rational primes <= 30 plus the generator-based moduli theta and 1 + theta."""
    out = [field.scalar(p) for p in upoly.primes_up_to(30)]
    for cand in (field.theta, field.theta + 1):
        if cand.is_integral() and not cand.is_zero() and abs(norm(cand)) > 1 and cand not in out:
            out.append(cand)
    return out


@dataclass
class IntersectivityReport:
    """Per-modulus certification; never claims intersectivity outright."""

    witnesses: Dict[str, Optional[AlgebraicNumber]] = dc_field(default_factory=dict)
    moduli: List[AlgebraicNumber] = dc_field(default_factory=list)

    @property
    def failed(self) -> List[AlgebraicNumber]:
        return [m for m in self.moduli if self.witnesses[str(m)] is None]

    @property
    def certified(self) -> bool:
        return not self.failed

    @property
    def verdict(self) -> str:
        if self.failed:
            return f"NOT jointly intersective at modulus {self.failed[0]}"
        return f"jointly intersective certified up to bound ({len(self.moduli)} moduli)"

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "certified": self.certified,
            "moduli": [
                {"modulus": [str(c) for c in m.coords],
                 "witness": None if self.witnesses[str(m)] is None else [str(c) for c in self.witnesses[str(m)].coords]}
                for m in self.moduli
            ],
        }


def certify_family(family: Sequence[PolyOverK], moduli=None, field: Optional[NumberFieldSpec] = None,
                   stop_at_failure: bool = False) -> IntersectivityReport:
    family = list(family)
    field = field or family[0].field
    mods = [_as_modulus(m, field) for m in (moduli if moduli is not None else default_moduli(field))]
    report = IntersectivityReport()
    for m in mods:
        report.moduli.append(m)
        report.witnesses[str(m)] = joint_intersectivity_search(family, m, field)
        if stop_at_failure and report.witnesses[str(m)] is None:
            break
    return report
