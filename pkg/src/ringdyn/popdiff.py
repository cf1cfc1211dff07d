"""Popular differences on cyclic grids Z_N^d with big-integer bit sets.

A grid set is one Python int; bit i is the point x with i = sum_j x_j N^j.
The shifted set E - v (bit x set iff x + v in E) is a per-axis block
rotation, and intersection counts are ``int.bit_count`` of the AND.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import EmptyRange
from .intpoly import PolyOverK
from .multipoly import MultiPolyQ
from .ring import AlgebraicNumber

MAGIC = b"GSET"
HEADER = struct.Struct("<4sIII")
MAX_DIM = 3


@lru_cache(maxsize=4096)
def _axis_mask(N: int, d: int, axis: int, c: int) -> int:
    """Bits of all points with x_axis < c."""
    stride = N ** axis
    block = stride * N
    pattern = (1 << (c * stride)) - 1
    reps = N ** (d - 1 - axis)
    repunit = ((1 << (block * reps)) - 1) // ((1 << block) - 1)
    return pattern * repunit


class GridSet:
    """Subset of Z_N^d (d <= 3) stored as a bit vector."""

    __slots__ = ("d", "N", "bits", "_pop")

    def __init__(self, d: int, N: int, bits: int = 0):
        if not 1 <= d <= MAX_DIM:
            raise ValueError(f"dimension must be 1..{MAX_DIM}")
        if N < 1:
            raise ValueError("side must be positive")
        self.d, self.N = d, N
        if bits < 0 or bits >> (N ** d):
            raise ValueError("bit vector does not fit the grid")
        self.bits = bits
        self._pop = bits.bit_count()

    @property
    def size(self) -> int:
        return self.N ** self.d

    @property
    def popcount(self) -> int:
        return self._pop

    @property
    def density(self) -> Fraction:
        return Fraction(self._pop, self.size)

    def __len__(self):
        return self._pop

    def __eq__(self, other):
        return isinstance(other, GridSet) and (self.d, self.N, self.bits) == (other.d, other.N, other.bits)

    def __hash__(self):
        return hash((self.d, self.N, self.bits))

    def __repr__(self):
        return f"GridSet(d={self.d}, N={self.N}, popcount={self._pop})"

    def index(self, x: Sequence[int]) -> int:
        i = 0
        for j in reversed(range(self.d)):
            i = i * self.N + x[j] % self.N
        return i

    def point(self, i: int) -> Tuple[int, ...]:
        out = []
        for _ in range(self.d):
            i, r = divmod(i, self.N)
            out.append(r)
        return tuple(out)

    def __contains__(self, x) -> bool:
        return bool(self.bits >> self.index(x) & 1)

    def points(self) -> List[Tuple[int, ...]]:
        return [self.point(i) for i in range(self.size) if self.bits >> i & 1]

    @classmethod
    def from_points(cls, d: int, N: int, pts: Iterable[Sequence[int]]) -> "GridSet":
        g = cls(d, N)
        bits = 0
        for x in pts:
            bits |= 1 << g.index(x)
        return cls(d, N, bits)

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "GridSet":
        """From a boolean array of shape (N,)*d indexed as mask[x_0, x_1, ...]."""
        d = mask.ndim
        N = mask.shape[0]
        flat = np.asarray(mask, dtype=bool).transpose().ravel()
        raw = np.packbits(flat, bitorder="little").tobytes()
        return cls(d, N, int.from_bytes(raw, "little"))

    @classmethod
    def full(cls, d: int, N: int) -> "GridSet":
        return cls(d, N, (1 << N ** d) - 1)

    def shifted_back(self, v: Sequence[int]) -> int:
        """Bits of E - v = {x : x + v in E} (cyclic)."""
        out = self.bits
        N, d = self.N, self.d
        for axis, s in enumerate(v):
            s %= N
            if s == 0:
                continue
            stride = N ** axis
            low = _axis_mask(N, d, axis, N - s)
            out = ((out >> (s * stride)) & low) | ((out << ((N - s) * stride)) & ~low & ((1 << N ** d) - 1))
        return out

    def translate(self, v: Sequence[int]) -> "GridSet":
        """E + v."""
        return GridSet(self.d, self.N, self.shifted_back([-x for x in v]))

    # serialization
    def to_bytes(self) -> bytes:
        nbytes = (self.size + 7) // 8
        return HEADER.pack(MAGIC, self.d, self.N, self._pop) + self.bits.to_bytes(nbytes, "little")

    @classmethod
    def from_bytes(cls, data: bytes) -> "GridSet":
        if len(data) < HEADER.size:
            raise ValueError("truncated grid-set header")
        magic, d, N, pop = HEADER.unpack_from(data)
        if magic != MAGIC:
            raise ValueError("bad grid-set magic")
        nbytes = (N ** d + 7) // 8
        body = data[HEADER.size:]
        if len(body) != nbytes:
            raise ValueError("grid-set body has the wrong length")
        g = cls(d, N, int.from_bytes(body, "little"))
        if g.popcount != pop:
            raise ValueError("popcount in header does not match the bits")
        return g

    def to_rle(self) -> str:
        """Header line, then run lengths alternating 0-runs and 1-runs (starting with 0s)."""
        runs = []
        cur, length = 0, 0
        for i in range(self.size):
            b = self.bits >> i & 1
            if b == cur:
                length += 1
            else:
                runs.append(length)
                cur, length = b, 1
        runs.append(length)
        return f"gridset d={self.d} N={self.N} popcount={self._pop}\n" + " ".join(map(str, runs)) + "\n"

    @classmethod
    def from_rle(cls, text: str) -> "GridSet":
        lines = text.strip().splitlines()
        if not lines or not lines[0].startswith("gridset"):
            raise ValueError("missing gridset header")
        meta = dict(tok.split("=") for tok in lines[0].split()[1:])
        d, N, pop = int(meta["d"]), int(meta["N"]), int(meta["popcount"])
        runs = [int(t) for t in " ".join(lines[1:]).split()]
        if sum(runs) != N ** d:
            raise ValueError("run lengths do not cover the grid")
        bits, pos = 0, 0
        for k, r in enumerate(runs):
            if k % 2:
                bits |= ((1 << r) - 1) << pos
            pos += r
        g = cls(d, N, bits)
        if g.popcount != pop:
            raise ValueError("popcount in header does not match the runs")
        return g


def intersection_count(E: GridSet, shifts: Sequence[Sequence[int]]) -> int:
    """#{x : x + v in E for every v in shifts} (cyclic); x itself is not required in E."""
    if not shifts:
        return E.size
    cur = E.shifted_back(shifts[0])
    for v in shifts[1:]:
        cur &= E.shifted_back(v)
        if not cur:
            return 0
    return cur.bit_count()


def intersection_count_naive(E: GridSet, shifts: Sequence[Sequence[int]]) -> int:
    N = E.N
    count = 0
    for x in itertools.product(range(N), repeat=E.d):
        if all(tuple((a + b) % N for a, b in zip(x, v)) in E for v in shifts):
            count += 1
    return count


# --- family evaluation -------------------------------------------------------------------

VectorFn = Callable[[Tuple[int, ...]], Tuple[int, ...]]


def family_vectors(family: Sequence, d: int) -> List[VectorFn]:
    """Grid-vector maps n -> v_i(n) from K-polynomials, univariate MultiPolyQ, or callables.

    A K-polynomial over a degree-d field is evaluated at the element with
    coordinates n and mapped to its integer coordinates.
    """
    out = []
    for p in family:
        if isinstance(p, PolyOverK):
            if p.field.degree != d:
                raise ValueError("field degree must equal the grid dimension")
            out.append(_k_vector(p))
        elif isinstance(p, MultiPolyQ):
            if d != 1 or p.nvars != 1:
                raise ValueError("MultiPolyQ shifts need a one-dimensional grid")
            out.append(_q_vector(p))
        elif callable(p):
            out.append(p)
        else:
            out.append(_q_vector(MultiPolyQ.univariate([Fraction(c) for c in p])))
    return out


def _k_vector(p: PolyOverK) -> VectorFn:
    def f(n):
        v = p(p.field.element(list(n)))
        if not v.is_integral():
            raise ValueError(f"{p} is not integral at {n}")
        return tuple(v.int_coords())
    return f


def _q_vector(p: MultiPolyQ) -> VectorFn:
    def f(n):
        v = Fraction(p.evaluate(tuple(n)))
        if v.denominator != 1:
            raise ValueError(f"{p} is not integral at {n}")
        return (int(v),)
    return f


def default_range(N: int, d: int) -> List[Tuple[int, ...]]:
    R = math.isqrt(N)
    return [n for n in itertools.product(range(-R, R + 1), repeat=d) if any(n)]


@dataclass
class ConfigurationCountReport:
    N: int
    d: int
    k: int
    density: Fraction
    eps: Fraction
    threshold: Fraction
    counts: Dict[Tuple[int, ...], int]
    popular: List[Tuple[int, ...]]
    max_gap: List[Optional[int]]
    boundary_bound: int
    shift_max: int

    @property
    def popular_fraction(self) -> float:
        return len(self.popular) / len(self.counts) if self.counts else 0.0

    def summary(self) -> dict:
        return {
            "N": self.N,
            "d": self.d,
            "k": self.k,
            "density": str(self.density),
            "eps": str(self.eps),
            "threshold": float(self.threshold),
            "threshold_exact": str(self.threshold),
            "scanned": len(self.counts),
            "popular_count": len(self.popular),
            "popular_fraction": self.popular_fraction,
            "max_gap": self.max_gap,
            "boundary_bound": self.boundary_bound,
            "max_shift": self.shift_max,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "count", "popular"])
        pop = set(self.popular)
        for n in sorted(self.counts):
            w.writerow([" ".join(map(str, n)), self.counts[n], int(n in pop)])
        return buf.getvalue()


def _axis_gaps(popular: Sequence[Tuple[int, ...]], d: int) -> List[Optional[int]]:
    out: List[Optional[int]] = []
    for axis in range(d):
        lines: Dict[Tuple[int, ...], List[int]] = {}
        for n in popular:
            key = n[:axis] + n[axis + 1:]
            lines.setdefault(key, []).append(n[axis])
        best = None
        for vals in lines.values():
            vals.sort()
            for a, b in zip(vals, vals[1:]):
                best = b - a if best is None else max(best, b - a)
        out.append(best)
    return out


def popular_differences(E: GridSet, family: Sequence, eps, n_range: Optional[Iterable[Sequence[int]]] = None,
                        threads: int = 1) -> ConfigurationCountReport:
    """Counts |E cap (E - v_1(n)) cap ... cap (E - v_k(n))| and the popular n != 0.

    Counts are cyclic.  The truncated-box count differs by at most
    k * max|v| * N^(d-1), which is reported as ``boundary_bound``.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    fns = family_vectors(family, E.d)
    ns = [tuple(n) for n in (n_range if n_range is not None else default_range(E.N, E.d))]
    if not ns:
        raise EmptyRange("empty n range")
    k = len(fns)
    threshold = (E.density ** (k + 1) - eps) * E.size

    def one(n):
        raw = [f(n) for f in fns]
        shifts = [tuple(x % E.N for x in v) for v in raw]
        c = intersection_count(E, [(0,) * E.d] + shifts)
        return c, max((abs(x) for v in raw for x in v), default=0)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(one, ns))
    else:
        results = [one(n) for n in ns]
    counts = {n: c for n, (c, _) in zip(ns, results)}
    shift_max = max((m for _, m in results), default=0)
    popular = sorted(n for n in ns if any(n) and counts[n] > threshold and counts[n] > 0)
    boundary = k * shift_max * E.N ** (E.d - 1)
    return ConfigurationCountReport(E.N, E.d, k, E.density, eps, threshold, counts, popular,
                                    _axis_gaps(popular, E.d), boundary, shift_max)


# --- structured instances -------------------------------------------------------------------

def interval_set(N: int, lo: int, hi: int, d: int = 1) -> GridSet:
    """{x : lo <= x_0 < hi}."""
    mask = np.zeros((N,) * d, dtype=bool)
    mask[lo:hi] = True
    return GridSet.from_mask(mask)


def residue_class_set(N: int, q: int, residues: Iterable[int] = (0,), d: int = 1) -> GridSet:
    """{x : x_0 mod q in residues}."""
    res = {r % q for r in residues}
    line = np.array([x % q in res for x in range(N)])
    mask = np.broadcast_to(line.reshape((N,) + (1,) * (d - 1)), (N,) * d)
    return GridSet.from_mask(mask)


def quadratic_residue_set(N: int, d: int = 1) -> GridSet:
    """{x : x_0 is a nonzero square mod N}."""
    squares = {x * x % N for x in range(1, N)} - {0}
    line = np.array([x in squares for x in range(N)])
    mask = np.broadcast_to(line.reshape((N,) + (1,) * (d - 1)), (N,) * d)
    return GridSet.from_mask(mask)


@dataclass
class RandomSet:
    grid: GridSet
    delta: float
    seed: int
    deviation: float
    allowed: float

    @property
    def concentrated(self) -> bool:
        return self.deviation <= self.allowed


def random_set(N: int, delta: float, seed: int, d: int = 1) -> RandomSet:
    """Each point independently with probability delta (seeded numpy PCG64)."""
    rng = np.random.default_rng(seed)
    mask = rng.random((N,) * d) < delta
    g = GridSet.from_mask(mask)
    size = N ** d
    dev = abs(g.popcount - delta * size)
    allowed = 4 * math.sqrt(size * delta * (1 - delta))
    return RandomSet(g, delta, seed, dev, allowed)


def structured_instances(N: int = 96, d: int = 1, seed: int = 0) -> Dict[str, GridSet]:
    """Deterministic library of stress sets keyed by name."""
    out = {
        "interval_half": interval_set(N, 0, N // 2, d),
        "residue_0_mod_3": residue_class_set(N, 3, (0,), d),
        "residues_0_1_mod_4": residue_class_set(N, 4, (0, 1), d),
        "quadratic_residues": quadratic_residue_set(N, d),
    }
    for delta in (0.25, 0.5):
        rs = random_set(N, delta, seed, d)
        if not rs.concentrated:
            raise RuntimeError(f"seeded random set deviates by {rs.deviation} > {rs.allowed}")
        out[f"random_{delta}"] = rs.grid
    return out
