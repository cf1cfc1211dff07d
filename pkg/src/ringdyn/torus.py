"""Unipotent affine actions on tori, polynomial orbits and their closures.

Torus points are vectors of ``SymbolicReal``.  A polynomial orbit is kept as
one dictionary per coordinate mapping ``""`` (the rational part) or a
generator name to a ``MultiPolyQ`` in the parameters n = (n_1..n_d), so that

    u(n)_i = P_i[""](n) + sum_g P_i[g](n) * g.

Weyl sums use a 64-bit fixed-point phase for the irrational part and exact
modular arithmetic for the rational part.
"""
from __future__ import annotations

import cmath
import csv
import io
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import linalg as la
from .errors import EmptyBox, NonCommuting, NotUnipotent, PreconditionFailed
from .intpoly import is_z_valued
from .multipoly import MultiPolyQ, binomial_poly
from .reals import SymbolicReal, generator

RATIONAL = ""
Parts = Dict[str, MultiPolyQ]


def _sym_vector(x: Sequence) -> List[SymbolicReal]:
    return [SymbolicReal.coerce(v) for v in x]


class AffineUnipotentMap:
    """x -> A x + t on T^m with A unipotent integer and t symbolic."""

    def __init__(self, A: Sequence[Sequence[int]], t: Sequence):
        self.A = [[int(a) for a in row] for row in A]
        self.m = len(self.A)
        if any(len(row) != self.m for row in self.A):
            raise ValueError("A must be square")
        self.t = _sym_vector(t)
        if len(self.t) != self.m:
            raise ValueError("translation has the wrong length")
        self.N = la.matsub(self.A, la.identity(self.m))
        # powers of the nilpotent part, stopping at the first zero power
        self.N_powers = [la.identity(self.m)]
        P = la.identity(self.m)
        for _ in range(self.m):
            P = la.matmul(P, self.N)
            if la.is_zero_matrix(P):
                break
            self.N_powers.append(P)
        else:
            raise NotUnipotent(f"(A - I)^{self.m} != 0 for A = {self.A}")
        self._inverse = [[int(x) for x in row] for row in la.inverse(self.A)]

    def __repr__(self):
        return f"AffineUnipotentMap(A={self.A}, t={[str(v) for v in self.t]})"

    def apply(self, x: Sequence[SymbolicReal]) -> List[SymbolicReal]:
        return [sum((a * xi for a, xi in zip(row, x)), SymbolicReal()) + ti for row, ti in zip(self.A, self.t)]

    def apply_inverse(self, x: Sequence[SymbolicReal]) -> List[SymbolicReal]:
        y = [xi - ti for xi, ti in zip(x, self.t)]
        return [sum((a * yi for a, yi in zip(row, y)), SymbolicReal()) for row in self._inverse]

    def power(self, k: int, x: Sequence[SymbolicReal]) -> List[SymbolicReal]:
        """T^k x by repeated application (the iteration oracle)."""
        x = list(x)
        step = self.apply if k >= 0 else self.apply_inverse
        for _ in range(abs(k)):
            x = step(x)
        return x

    def to_dict(self) -> dict:
        return {"A": self.A, "t": [v.to_dict() for v in self.t]}


def check_commuting(maps: Sequence[AffineUnipotentMap]) -> None:
    for i, S in enumerate(maps):
        for T in maps[i + 1:]:
            if S.m != T.m:
                raise NonCommuting("maps act on tori of different dimensions")
            if la.matmul(S.A, T.A) != la.matmul(T.A, S.A):
                raise NonCommuting("linear parts do not commute")
            lhs = [sum((a * v for a, v in zip(row, T.t)), SymbolicReal()) for row in S.N]
            rhs = [sum((a * v for a, v in zip(row, S.t)), SymbolicReal()) for row in T.N]
            if not all(p.equal_mod1(q) for p, q in zip(lhs, rhs)):
                raise NonCommuting("translation parts violate (A_i - I)t_j = (A_j - I)t_i mod 1")


def _parts_add(p: Parts, q: Parts) -> Parts:
    out = dict(p)
    for k, v in q.items():
        out[k] = out[k] + v if k in out else v
    return {k: v for k, v in out.items() if not v.is_zero()}


def _parts_scale(p: Parts, s) -> Parts:
    out = {k: v * s for k, v in p.items()}
    return {k: v for k, v in out.items() if not v.is_zero()}


def _parts_from_symbolic(x: SymbolicReal, nvars: int) -> Parts:
    out = {RATIONAL: MultiPolyQ.constant(nvars, x.q0)}
    for g, c in x.terms.items():
        out[g] = MultiPolyQ.constant(nvars, c)
    return {k: v for k, v in out.items() if not v.is_zero()}


def _int_matvec_parts(A: Sequence[Sequence[int]], vec: Sequence[Parts]) -> List[Parts]:
    out = []
    for row in A:
        acc: Parts = {}
        for a, p in zip(row, vec):
            if a:
                acc = _parts_add(acc, _parts_scale(p, a))
        out.append(acc)
    return out


class PolynomialTorusSequence:
    """u: Z^d -> T^m with polynomial coordinates over Q and the generators."""

    def __init__(self, nvars: int, coords: Sequence[Mapping[str, MultiPolyQ]]):
        self.nvars = nvars
        clean = []
        for parts in coords:
            d = {}
            for k, v in parts.items():
                if v.nvars != nvars:
                    raise ValueError("coordinate polynomial has wrong arity")
                if k != RATIONAL:
                    generator(k)
                if not v.is_zero():
                    d[k] = v
            clean.append(dict(sorted(d.items())))
        self.coords: List[Parts] = clean

    @classmethod
    def from_terms(cls, nvars: int, coords: Sequence[Mapping[Tuple[int, ...], object]]) -> "PolynomialTorusSequence":
        """Build from {monomial: SymbolicReal coefficient} per coordinate."""
        out = []
        for terms in coords:
            parts: Dict[str, Dict] = {}
            for mono, coef in terms.items():
                s = SymbolicReal.coerce(coef)
                if s.q0:
                    parts.setdefault(RATIONAL, {})[tuple(mono)] = s.q0
                for g, c in s.terms.items():
                    parts.setdefault(g, {})[tuple(mono)] = c
            out.append({k: MultiPolyQ(nvars, v) for k, v in parts.items()})
        return cls(nvars, out)

    @property
    def m(self) -> int:
        return len(self.coords)

    def generators(self) -> List[str]:
        return sorted({k for parts in self.coords for k in parts if k != RATIONAL})

    def component(self, key: str) -> List[MultiPolyQ]:
        return [parts.get(key, MultiPolyQ.zero(self.nvars)) for parts in self.coords]

    def evaluate(self, n: Sequence[int]) -> List[SymbolicReal]:
        n = tuple(n)
        out = []
        for parts in self.coords:
            q0 = Fraction(0)
            terms = {}
            for k, poly in parts.items():
                val = Fraction(poly.evaluate(n))
                if k == RATIONAL:
                    q0 = val
                else:
                    terms[k] = val
            out.append(SymbolicReal(q0, terms))
        return out

    def evaluate_float(self, n: Sequence[int]) -> List[float]:
        """Point on T^m as floats in [0, 1)."""
        return [x.frac_float() for x in self.evaluate(n)]

    def base_point(self) -> List[SymbolicReal]:
        return self.evaluate((0,) * self.nvars)

    def coefficient_vectors(self, key: str) -> List[List[Fraction]]:
        """Vectors in Q^m attached to the non-constant monomials of one component."""
        comp = self.component(key)
        monos = sorted({mo for p in comp for mo in p.monomials() if any(mo)})
        return [[p.coefficient(mo) for p in comp] for mo in monos]

    def phase(self, c: Sequence[int]) -> Parts:
        """Symbolic polynomial c . u(n)."""
        acc: Parts = {}
        for ci, parts in zip(c, self.coords):
            if ci:
                acc = _parts_add(acc, _parts_scale(parts, ci))
        return acc

    def reparameterize(self, s: Sequence[int]) -> "PolynomialTorusSequence":
        """n -> u(n + s)."""
        return PolynomialTorusSequence(
            self.nvars, [{k: v.shift(s) for k, v in parts.items()} for parts in self.coords]
        )

    def __eq__(self, other):
        return isinstance(other, PolynomialTorusSequence) and self.nvars == other.nvars and self.coords == other.coords

    def __repr__(self):
        return f"PolynomialTorusSequence({self.nvars}, {self.to_dict()['coords']})"

    def to_dict(self) -> dict:
        return {
            "nvars": self.nvars,
            "coords": [{(k or "1"): str(v) for k, v in parts.items()} for parts in self.coords],
        }


def closed_form_orbit(maps: Sequence[AffineUnipotentMap], exponents: Sequence[MultiPolyQ],
                      x: Sequence) -> PolynomialTorusSequence:
    """prod_j T_j^{p_j(n)} x as an exact polynomial in n.

    Uses T^k x = sum_l C(k,l) N^l x + sum_l C(k,l+1) N^l t, valid for every
    integer k because N = A - I is nilpotent.  Maps are applied in list order.
    """
    if len(maps) != len(exponents):
        raise ValueError("need one exponent polynomial per map")
    if not maps:
        raise ValueError("at least one map is required")
    check_commuting(maps)
    nvars = exponents[0].nvars
    for p in exponents:
        if p.nvars != nvars:
            raise ValueError("exponent polynomials must share variables")
        if not is_z_valued(p):
            raise PreconditionFailed(f"exponent {p} is not integer-valued")
    x = _sym_vector(x)
    if len(x) != maps[0].m:
        raise ValueError("point has the wrong dimension")
    state = [_parts_from_symbolic(v, nvars) for v in x]
    for T, k in zip(maps, exponents):
        t_parts = [_parts_from_symbolic(v, nvars) for v in T.t]
        new = [dict() for _ in range(T.m)]
        for l, Nl in enumerate(T.N_powers):
            c_l = binomial_poly(k, l)
            c_l1 = binomial_poly(k, l + 1)
            Ns = _int_matvec_parts(Nl, state)
            Nt = _int_matvec_parts(Nl, t_parts)
            for i in range(T.m):
                new[i] = _parts_add(new[i], _parts_scale(Ns[i], c_l))
                new[i] = _parts_add(new[i], _parts_scale(Nt[i], c_l1))
        state = new
    return PolynomialTorusSequence(nvars, state)


def iterate_orbit(maps: Sequence[AffineUnipotentMap], exponents: Sequence[MultiPolyQ],
                  x: Sequence, n: Sequence[int]) -> List[SymbolicReal]:
    """Step-by-step oracle for closed_form_orbit at one parameter value."""
    y = _sym_vector(x)
    for T, k in zip(maps, exponents):
        y = T.power(int(k.evaluate(tuple(n))), y)
    return y


# --- orbit closures -------------------------------------------------------------

MAX_CLASSES = 1 << 20


def _frac(x: Fraction) -> Fraction:
    return x - math.floor(x)


@dataclass
class SubtorusCosetUnion:
    """Finite union of cosets offset_k + V in T^m.

    ``V_basis`` is the saturated integer basis of V in Hermite normal form and
    ``annihilator`` an integer basis of the characters vanishing on V.
    ``congruence`` maps each class w of n modulo ``modulus`` to a coset index;
    ``witnesses[k]`` is a parameter value whose orbit point is ``cosets[k]``.
    """

    m: int
    V_basis: List[List[int]]
    annihilator: List[List[int]]
    cosets: List[List[SymbolicReal]]
    modulus: Tuple[int, ...]
    congruence: Dict[Tuple[int, ...], int]
    witnesses: List[Tuple[int, ...]] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.V_basis)

    def is_full_torus(self) -> bool:
        return self.dim == self.m

    def same_coset(self, x: Sequence[SymbolicReal], y: Sequence[SymbolicReal]) -> bool:
        """Exact test x - y in V + Z^m (assuming generators independent over Q)."""
        for c in self.annihilator:
            diff = sum((ci * (a - b) for ci, a, b in zip(c, x, y)), SymbolicReal())
            if not diff.is_rational() or diff.q0.denominator != 1:
                return False
        return True

    def contains(self, point: Sequence) -> bool:
        point = _sym_vector(point)
        return any(self.same_coset(point, off) for off in self.cosets)

    def distance(self, point: Sequence[float]) -> float:
        """Max over annihilating characters of ||c.(y - offset)|| mod 1, minimized over cosets."""
        if not self.annihilator:
            return 0.0
        best = math.inf
        for off in self.cosets:
            offf = [o.frac_float() for o in off]
            worst = 0.0
            for c in self.annihilator:
                v = sum(ci * (y - o) for ci, y, o in zip(c, point, offf))
                worst = max(worst, abs(v - round(v)))
            best = min(best, worst)
        return best

    def to_dict(self) -> dict:
        return {
            "dimension": self.dim,
            "V_basis": self.V_basis,
            "annihilator": self.annihilator,
            "modulus": list(self.modulus),
            "cosets": [[v.to_dict() for v in off] for off in self.cosets],
            "witnesses": [list(w) for w in self.witnesses],
            "congruence": {",".join(map(str, w)): k for w, k in sorted(self.congruence.items())},
        }


def orbit_closure(u: PolynomialTorusSequence) -> SubtorusCosetUnion:
    """Closure of {u(n)} as finitely many cosets of a rational subtorus."""
    m = u.m
    vectors = []
    for g in u.generators():
        vectors.extend(u.coefficient_vectors(g))
    vectors = [v for v in vectors if any(v)]
    V = la.saturate(vectors, m) if vectors else []
    ann = la.integer_kernel(V, m) if V else la.identity(m)
    if len(V) == m:
        ann = []
    M = 1
    for p in u.component(RATIONAL):
        for mono, c in p.items():
            if any(mono):
                M = math.lcm(M, c.denominator)
    modulus = (M,) * u.nvars
    if M ** u.nvars > MAX_CLASSES:
        raise PreconditionFailed(f"too many congruence classes ({M}^{u.nvars})")
    out = SubtorusCosetUnion(m, V, ann, [], modulus, {}, [])
    for w in itertools.product(range(M), repeat=u.nvars):
        pt = u.evaluate(w)
        for k, off in enumerate(out.cosets):
            if out.same_coset(pt, off):
                out.congruence[w] = k
                break
        else:
            out.congruence[w] = len(out.cosets)
            out.cosets.append([x.reduce_mod1() for x in pt])
            out.witnesses.append(tuple(w))
    return out


def closure_basis_hnf(closure: SubtorusCosetUnion) -> List[List[int]]:
    return la.hnf(closure.V_basis) if closure.V_basis else []


# --- simultaneous triangularization --------------------------------------------

def simultaneous_triangularize(matrices: Sequence[Sequence[Sequence[int]]], lower: bool = True):
    """Integer P and unipotent triangular B_j with A_j P = P B_j.

    Builds the flag W_{i+1} = {v : (A_j - I) v in W_i for all j} of saturated
    lattices and an adapted Z-basis, so P is unimodular.  The adapted basis
    gives upper-triangular B_j; with ``lower`` the basis order is reversed.
    """
    mats = [[[int(a) for a in row] for row in A] for A in matrices]
    if not mats:
        raise ValueError("need at least one matrix")
    m = len(mats[0])
    for A in mats:
        AffineUnipotentMap(A, [0] * m)
    for i, A in enumerate(mats):
        for B in mats[i + 1:]:
            if la.matmul(A, B) != la.matmul(B, A):
                raise NonCommuting("matrices do not commute")
    Ns = [la.matsub(A, la.identity(m)) for A in mats]
    basis: List[List[int]] = []
    ann = la.identity(m)
    while len(basis) < m:
        rows = [la.matvec(la.transpose(N), c) for c in ann for N in Ns]
        rows = [r for r in rows if any(r)]
        level = la.integer_kernel(rows, m) if rows else la.identity(m)
        basis = la.complete_basis(basis, level) if basis else [list(v) for v in level]
        ann = la.integer_kernel(basis, m) if len(basis) < m else []
    cols = list(reversed(basis)) if lower else basis
    P = la.transpose(cols)
    Pinv = la.inverse(P)
    Bs = []
    for A in mats:
        B = la.matmul(Pinv, la.matmul(A, P))
        Bs.append([[int(x) for x in row] for row in B])
    return P, Bs


def is_unipotent_triangular(B: Sequence[Sequence[int]], lower: bool = True) -> bool:
    m = len(B)
    for i in range(m):
        if B[i][i] != 1:
            return False
        for j in range(m):
            if (j > i if lower else j < i) and B[i][j] != 0:
                return False
    return True


# --- Weyl sums ------------------------------------------------------------------

Box = List[Tuple[int, int]]
_TWO64 = float(2 ** 64)


def folner_box(N: int, d: int) -> Box:
    return [(-N, N)] * d


def _box_size(box: Box) -> int:
    size = 1
    for lo, hi in box:
        size *= max(hi - lo + 1, 0)
    return size


class _PhaseKernel:
    """Vectorized e(phase(n)) for a symbolic phase polynomial."""

    def __init__(self, phase: Parts, nvars: int):
        self.nvars = nvars
        rat = phase.get(RATIONAL, MultiPolyQ.zero(nvars))
        self.L = rat.denominator()
        self.rat_terms = [(mono, int(c * self.L) % self.L) for mono, c in rat.items()]
        self.rat_terms = [(mo, c) for mo, c in self.rat_terms if c]
        irr: Dict[Tuple[int, ...], SymbolicReal] = {}
        for k, poly in phase.items():
            if k == RATIONAL:
                continue
            for mono, c in poly.items():
                irr[mono] = irr.get(mono, SymbolicReal()) + SymbolicReal.gen(k, c)
        self.irr_terms = [(mono, np.uint64(s.fixed_point_frac(64))) for mono, s in sorted(irr.items())]
        self.irr_terms = [(mo, c) for mo, c in self.irr_terms if c]
        if self.L >= 1 << 31:
            raise PreconditionFailed("rational phase denominator too large for the Weyl kernel")

    def values(self, grids: Sequence[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
        npts = grids[0].shape[0] if grids else 1
        frac_irr = np.zeros(npts, dtype=np.uint64)
        if self.irr_terms:
            ug = [g.astype(np.int64).astype(np.uint64) for g in grids]
            with np.errstate(over="ignore"):
                for mono, c in self.irr_terms:
                    acc = np.full(npts, c, dtype=np.uint64)
                    for g, e in zip(ug, mono):
                        for _ in range(e):
                            acc = acc * g
                    frac_irr = frac_irr + acc
        num = np.zeros(npts, dtype=np.int64)
        if self.rat_terms:
            L = self.L
            mg = [np.mod(g.astype(np.int64), L) for g in grids]
            for mono, c in self.rat_terms:
                acc = np.full(npts, c, dtype=np.int64)
                for g, e in zip(mg, mono):
                    for _ in range(e):
                        acc = np.mod(acc * g, L)
                num = np.mod(num + acc, L)
        theta = 2 * np.pi * (frac_irr.astype(np.float64) / _TWO64 + num.astype(np.float64) / self.L)
        return np.cos(theta), np.sin(theta)


def _chunk_sum(kernel: _PhaseKernel, box: Box, first_range: Tuple[int, int],
               residue: Optional[Tuple[Sequence[int], Sequence[int]]]) -> Tuple[float, float, int]:
    axes = [np.arange(first_range[0], first_range[1] + 1, dtype=np.int64)]
    axes += [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in box[1:]]
    if residue is not None:
        mods, ws = residue
        axes = [a[np.mod(a - w, M) == 0] for a, M, w in zip(axes, mods, ws)]
    if any(a.size == 0 for a in axes):
        return 0.0, 0.0, 0
    if len(axes) == 1:
        grids = [axes[0]]
    else:
        mesh = np.meshgrid(*axes, indexing="ij")
        grids = [g.ravel() for g in mesh]
    cos, sin = kernel.values(grids)
    return math.fsum(cos.tolist()), math.fsum(sin.tolist()), cos.size


def weyl_average(c: Sequence[int], u: PolynomialTorusSequence, box: Box, threads: int = 1,
                 residue: Optional[Tuple[Sequence[int], Sequence[int]]] = None,
                 chunk: int = 1 << 16) -> complex:
    """(1/|box|) sum_{n in box} e(c . u(n)).

    ``residue`` = (moduli, classes) restricts to n congruent to the class.
    Partial sums are exactly rounded per chunk, so the result does not depend
    on ``threads`` beyond the last few ulps.
    """
    box = [(int(lo), int(hi)) for lo, hi in box]
    if len(box) != u.nvars:
        raise ValueError("box dimension must match the number of parameters")
    if _box_size(box) == 0:
        raise EmptyBox("Folner box is empty")
    phase = u.phase(c)
    kernel = _PhaseKernel(phase, u.nvars)
    inner = _box_size(box[1:]) if len(box) > 1 else 1
    step = max(1, chunk // max(inner, 1))
    lo, hi = box[0]
    ranges = [(a, min(a + step - 1, hi)) for a in range(lo, hi + 1, step)]
    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda r: _chunk_sum(kernel, box, r, residue), ranges))
    else:
        parts = [_chunk_sum(kernel, box, r, residue) for r in ranges]
    count = sum(p[2] for p in parts)
    if count == 0:
        raise EmptyBox("no box points in the requested residue class")
    re = math.fsum(p[0] for p in parts)
    im = math.fsum(p[1] for p in parts)
    return complex(re / count, im / count)


def weyl_bound_linear(alpha_coeff: float, box_len: int) -> float:
    """Geometric-series bound 2 / (N |1 - e(a)|) for a linear phase."""
    return 2.0 / (box_len * abs(1 - cmath.exp(2j * math.pi * alpha_coeff)))


# --- equidistribution report ----------------------------------------------------

DEFAULT_LADDER = (1000, 10000, 100000)


def tolerance(N: int) -> float:
    return max(0.02, 5.0 / math.sqrt(N))


def characters(m: int, c_max: int) -> List[Tuple[int, ...]]:
    return [c for c in itertools.product(range(-c_max, c_max + 1), repeat=m) if any(c)]


def _annihilates(c: Sequence[int], closure: SubtorusCosetUnion) -> bool:
    return all(sum(ci * vi for ci, vi in zip(c, v)) == 0 for v in closure.V_basis)


def _exact_class_phases(c, u: PolynomialTorusSequence, closure: SubtorusCosetUnion) -> Dict[Tuple[int, ...], SymbolicReal]:
    out = {}
    for w in closure.congruence:
        pt = u.evaluate(w)
        out[w] = sum((ci * x for ci, x in zip(c, pt)), SymbolicReal())
    return out


def _e(x: SymbolicReal) -> complex:
    return cmath.exp(2j * math.pi * x.frac_float())


@dataclass
class CharacterResult:
    character: Tuple[int, ...]
    annihilates: bool
    predicted: complex
    measured: List[complex]
    bound: float
    status: bool
    class_checks: List[dict] = field(default_factory=list)

    def error(self) -> float:
        return abs(self.measured[-1] - self.predicted)

    def to_dict(self) -> dict:
        return {
            "character": list(self.character),
            "annihilates_V": self.annihilates,
            "predicted": [self.predicted.real, self.predicted.imag],
            "measured": [[z.real, z.imag] for z in self.measured],
            "measured_abs": [abs(z) for z in self.measured],
            "error": self.error(),
            "bound": self.bound,
            "status": "pass" if self.status else "fail",
            "class_checks": self.class_checks,
        }


@dataclass
class EquidistributionReport:
    ladder: List[int]
    c_max: int
    closure: SubtorusCosetUnion
    results: List[CharacterResult]

    @property
    def passed(self) -> bool:
        return all(r.status for r in self.results)

    def to_dict(self) -> dict:
        return {
            "ladder": self.ladder,
            "c_max": self.c_max,
            "closure": self.closure.to_dict(),
            "passed": self.passed,
            "characters": [r.to_dict() for r in self.results],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["character", "predicted", "measured", "bound", "status"])
        for r in self.results:
            w.writerow([
                " ".join(map(str, r.character)),
                repr(abs(r.predicted)),
                repr(abs(r.measured[-1])),
                repr(r.bound),
                "pass" if r.status else "fail",
            ])
        return buf.getvalue()


def equidistribution_report(u: PolynomialTorusSequence, closure: SubtorusCosetUnion,
                            box_sizes: Sequence[int] = DEFAULT_LADDER, c_max: int = 3,
                            chars: Optional[Sequence[Sequence[int]]] = None,
                            threads: int = 1) -> EquidistributionReport:
    """Compare Weyl averages along a ladder of boxes [-N, N]^d with predictions.

    Characters annihilating V have a predicted value (the mean of e(c.u(w))
    over congruence classes); when that phase is constant on all classes the
    match must hold to 1e-12, and every class is also checked separately.
    Other characters must be within tau = max(0.02, 5/sqrt(N)) of zero at the
    largest box and may not grow faster than a 1.5 * N^{-1/2} envelope.
    """
    ladder = sorted(int(N) for N in box_sizes)
    if not ladder:
        raise ValueError("empty box ladder")
    chars = [tuple(c) for c in chars] if chars is not None else characters(u.m, c_max)
    results = []
    for c in chars:
        measured = [weyl_average(c, u, folner_box(N, u.nvars), threads=threads) for N in ladder]
        if _annihilates(c, closure):
            phases = _exact_class_phases(c, u, closure)
            values = [_e(x) for x in phases.values()]
            predicted = sum(values) / len(values)
            first = next(iter(phases.values()))
            constant = all(x.equal_mod1(first) for x in phases.values())
            if constant:
                bound = 1e-12
                checks = []
                for w, x in sorted(phases.items()):
                    got = weyl_average(c, u, folner_box(ladder[0], u.nvars), threads=threads,
                                       residue=(closure.modulus, w))
                    checks.append({"class": list(w), "error": abs(got - _e(x))})
                ok = abs(measured[-1] - predicted) <= bound and all(ch["error"] <= bound for ch in checks)
            else:
                # exact per class; whole-box averages only approach the mean
                bound = tolerance(ladder[-1])
                checks = []
                for w, x in sorted(phases.items()):
                    got = weyl_average(c, u, folner_box(ladder[0], u.nvars), threads=threads,
                                       residue=(closure.modulus, w))
                    checks.append({"class": list(w), "error": abs(got - _e(x))})
                ok = abs(measured[-1] - predicted) <= bound and all(ch["error"] <= 1e-9 for ch in checks)
            results.append(CharacterResult(c, True, predicted, measured, bound, ok, checks))
        else:
            bound = tolerance(ladder[-1])
            ok = abs(measured[-1]) <= bound
            for j in range(1, len(ladder)):
                env = 1.5 * abs(measured[j - 1]) * math.sqrt(ladder[j - 1] / ladder[j])
                if abs(measured[j]) > max(tolerance(ladder[j]), env):
                    ok = False
            results.append(CharacterResult(c, False, 0j, measured, bound, ok))
    return EquidistributionReport(ladder, c_max, closure, results)
