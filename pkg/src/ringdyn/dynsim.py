"""Desk-scale measure-preserving systems and multicorrelation checks.

Circle-rotation geometry runs in a *frame*: an integer encoding of the reals
that can appear as endpoints.  For quadratic rotations an element (a, b)
stands for (a + b*sqrt(D)) / L, so comparisons and lengths are exact.  Other
rotations use a dyadic frame (integers scaled by 2^HIGH_PRECISION_BITS).
"""
from __future__ import annotations

import bisect
import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DegenerateShifts, EmptyRange, FamilyRefused
from .multipoly import MultiPolyQ
from .reals import HIGH_PRECISION_BITS, QuadraticReal, SymbolicReal, symbolic_from_dict

ShiftFn = Callable[[int], int]


# --- frames -----------------------------------------------------------------------

class QuadFrame:
    """Exact arithmetic on (a + b*sqrt(D)) / L with integer a, b."""

    def __init__(self, alpha: QuadraticReal, denominators: Iterable[int] = ()):
        self.D = alpha.D
        L = math.lcm(alpha.a.denominator, alpha.b.denominator)
        for q in denominators:
            L = math.lcm(L, q)
        self.L = L
        self.alpha = (int(alpha.a * L), int(alpha.b * L))
        self.zero = (0, 0)
        self.one = (L, 0)

    def rational(self, x: Fraction) -> Tuple[int, int]:
        x = Fraction(x)
        v = x * self.L
        if v.denominator != 1:
            raise ValueError(f"{x} is not representable in this frame")
        return (int(v), 0)

    def sign(self, x) -> int:
        a, b = x
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0 or (a > 0) == (b > 0):
            return 1 if (a > 0 or (a == 0 and b > 0)) else -1
        if a * a > b * b * self.D:
            return 1 if a > 0 else -1
        return 1 if b > 0 else -1

    def lt(self, x, y) -> bool:
        return self.sign((x[0] - y[0], x[1] - y[1])) < 0

    @staticmethod
    def add(x, y):
        return (x[0] + y[0], x[1] + y[1])

    @staticmethod
    def sub(x, y):
        return (x[0] - y[0], x[1] - y[1])

    def frac_multiple(self, s: int):
        """frac(s * alpha) as a frame element."""
        A, B = s * self.alpha[0], s * self.alpha[1]
        if B == 0:
            fl = A // self.L
        else:
            r = math.isqrt(B * B * self.D)
            fs = r if B > 0 else -r - 1
            fl = (A + fs) // self.L
        return (A - fl * self.L, B)

    def exact(self, x) -> Union[QuadraticReal, Fraction]:
        if x[1] == 0:
            return Fraction(x[0], self.L)
        return QuadraticReal(Fraction(x[0], self.L), Fraction(x[1], self.L), self.D)

    def to_float(self, x) -> float:
        if x[1] == 0:
            return x[0] / self.L
        return float(self.exact(x))


class RationalFrame:
    """Plain Fractions; used for rational rotations and exact integrals."""

    zero = Fraction(0)
    one = Fraction(1)

    def __init__(self, alpha: Fraction = Fraction(0)):
        self.alpha = Fraction(alpha)

    @staticmethod
    def rational(x):
        return Fraction(x)

    @staticmethod
    def lt(x, y):
        return x < y

    @staticmethod
    def add(x, y):
        return x + y

    @staticmethod
    def sub(x, y):
        return x - y

    def frac_multiple(self, s: int):
        v = s * self.alpha
        return v - math.floor(v)

    @staticmethod
    def exact(x):
        return x

    @staticmethod
    def to_float(x):
        return float(x)


class DyadicFrame:
    """Integers scaled by 2^bits; exact up to the approximation of alpha."""

    def __init__(self, alpha_approx: Fraction, bits: int = HIGH_PRECISION_BITS):
        self.bits = bits
        self.scale = 1 << bits
        self.alpha = math.floor(alpha_approx * self.scale)
        self.zero = 0
        self.one = self.scale

    def rational(self, x):
        return math.floor(Fraction(x) * self.scale)

    @staticmethod
    def lt(x, y):
        return x < y

    @staticmethod
    def add(x, y):
        return x + y

    @staticmethod
    def sub(x, y):
        return x - y

    def frac_multiple(self, s: int):
        return (s * self.alpha) % self.scale

    def exact(self, x) -> Fraction:
        return Fraction(x, self.scale)

    def to_float(self, x) -> float:
        return x / self.scale


class FloatFrame:
    zero = 0.0
    one = 1.0

    def __init__(self, alpha: float = 0.0):
        self.alpha = alpha

    @staticmethod
    def rational(x):
        return float(x)

    @staticmethod
    def lt(x, y):
        return x < y

    @staticmethod
    def add(x, y):
        return x + y

    @staticmethod
    def sub(x, y):
        return x - y

    def frac_multiple(self, s):
        v = s * self.alpha
        return v - math.floor(v)

    @staticmethod
    def exact(x):
        return x

    @staticmethod
    def to_float(x):
        return float(x)


def make_frame(alpha: SymbolicReal, denominators: Iterable[int] = ()):
    x = alpha.exact()
    if isinstance(x, QuadraticReal):
        return QuadFrame(x, denominators)
    if alpha.is_rational():
        return RationalFrame(alpha.q0)
    return DyadicFrame(x)


# --- interval sets ------------------------------------------------------------------

def canonical_intervals(intervals: Iterable[Tuple]) -> List[Tuple[Fraction, Fraction]]:
    """Sorted, disjoint, merged half-open intervals inside [0, 1)."""
    ivs = []
    for lo, hi in intervals:
        lo, hi = Fraction(lo), Fraction(hi)
        if not (0 <= lo <= hi <= 1):
            raise ValueError(f"interval [{lo}, {hi}) is not inside [0, 1)")
        if lo < hi:
            ivs.append((lo, hi))
    ivs.sort()
    out: List[Tuple[Fraction, Fraction]] = []
    for lo, hi in ivs:
        if out and lo <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], hi))
        else:
            out.append((lo, hi))
    return out


def _shift_back(frame, ivs: Sequence[Tuple], t) -> List[Tuple]:
    """{x : x + t in A} for sorted disjoint A in [0,1) and t in [0,1); stays sorted."""
    lt, sub, add = frame.lt, frame.sub, frame.add
    one, zero = frame.one, frame.zero
    head, mid, tail, last = [], [], [], []
    for lo, hi in ivs:
        a, b = sub(lo, t), sub(hi, t)
        if not lt(a, zero):
            mid.append((a, b))
        elif not lt(zero, b):
            tail.append((add(a, one), add(b, one)))
        else:
            head.append((zero, b))
            last.append((add(a, one), one))
    return head + mid + tail + last


def _intersect(frame, X: Sequence[Tuple], Y: Sequence[Tuple]) -> List[Tuple]:
    lt = frame.lt
    out = []
    i = j = 0
    while i < len(X) and j < len(Y):
        lo = X[i][0] if lt(Y[j][0], X[i][0]) else Y[j][0]
        if lt(X[i][1], Y[j][1]):
            hi = X[i][1]
            i += 1
        else:
            hi = Y[j][1]
            j += 1
        if lt(lo, hi):
            out.append((lo, hi))
    return out


def _measure(frame, ivs: Sequence[Tuple]):
    total = frame.zero
    for lo, hi in ivs:
        total = frame.add(total, frame.sub(hi, lo))
    return total


# --- systems ------------------------------------------------------------------------

class IntervalRotationSystem:
    """Rotation x -> x + alpha on [0,1) with a finite union of intervals A."""

    def __init__(self, alpha, intervals: Iterable[Tuple]):
        self.alpha = symbolic_from_dict(alpha) if not isinstance(alpha, SymbolicReal) else alpha
        self.intervals = canonical_intervals(intervals)
        dens = [x.denominator for iv in self.intervals for x in iv]
        self.frame = make_frame(self.alpha, dens)
        self._A = [(self.frame.rational(lo), self.frame.rational(hi)) for lo, hi in self.intervals]

    @property
    def measure(self) -> Fraction:
        return sum((hi - lo for lo, hi in self.intervals), Fraction(0))

    def translate(self, beta: Fraction) -> "IntervalRotationSystem":
        """Same rotation with A replaced by A + beta (mod 1)."""
        beta = Fraction(beta) - math.floor(Fraction(beta))
        out = []
        for lo, hi in self.intervals:
            a, b = lo + beta, hi + beta
            if b <= 1:
                out.append((a, b))
            elif a >= 1:
                out.append((a - 1, b - 1))
            else:
                out.extend([(a, Fraction(1)), (Fraction(0), b - 1)])
        return IntervalRotationSystem(self.alpha, out)

    def correlation_element(self, shifts: Sequence[int]):
        """mu(A cap (A - s_1 alpha) cap ...) as a frame element."""
        cur = self._A
        for s in shifts:
            t = self.frame.frac_multiple(s)
            cur = _intersect(self.frame, cur, _shift_back(self.frame, self._A, t))
            if not cur:
                break
        return _measure(self.frame, cur)

    def correlation(self, shifts: Sequence[int]):
        return self.frame.exact(self.correlation_element(shifts))

    def contains(self, x: float) -> bool:
        i = bisect.bisect_right([float(lo) for lo, _ in self.intervals], x) - 1
        return i >= 0 and x < float(self.intervals[i][1])


class FiniteRotationSystem:
    """x -> x + a on Z_m with sets stored as Python int bit vectors."""

    def __init__(self, m: int, a: int = 1):
        if m < 1:
            raise ValueError("modulus must be positive")
        self.m = m
        self.a = a % m
        self.full = (1 << m) - 1

    def make_set(self, elements: Iterable[int]) -> int:
        bits = 0
        for x in elements:
            bits |= 1 << (x % self.m)
        return bits

    def shift_back(self, A: int, s: int) -> int:
        # bit x of the result is bit (x + s) mod m of A
        s %= self.m
        if s == 0:
            return A
        return ((A >> s) | (A << (self.m - s))) & self.full

    def correlation(self, A: int, shifts: Sequence[int]) -> Fraction:
        cur = A
        for s in shifts:
            cur &= self.shift_back(A, s * self.a)
        return Fraction(cur.bit_count(), self.m)

    def density(self, A: int) -> Fraction:
        return Fraction(A.bit_count(), self.m)


class SkewProductSystem:
    """(x, y) -> (x + alpha, y + 2x + alpha) on T^2 with rectangle sets.

    T^n(x, y) = (x + n alpha, y + 2 n x + n^2 alpha).  Sets are unions of
    rectangles [x0, x1) x [y0, y1) and are stored as x-slabs carrying a
    canonical union of y-intervals.
    """

    def __init__(self, alpha, rectangles: Iterable[Tuple]):
        self.alpha = symbolic_from_dict(alpha) if not isinstance(alpha, SymbolicReal) else alpha
        self.alpha_f = float(self.alpha.exact() - math.floor(self.alpha.exact()))
        rects = [tuple(Fraction(v) for v in r) for r in rectangles]
        for x0, x1, y0, y1 in rects:
            if not (0 <= x0 <= x1 <= 1 and 0 <= y0 <= y1 <= 1):
                raise ValueError("rectangle outside the unit square")
        cuts = sorted({v for r in rects for v in (r[0], r[1])} | {Fraction(0), Fraction(1)})
        slabs = []
        for a, b in zip(cuts, cuts[1:]):
            ys = canonical_intervals((r[2], r[3]) for r in rects if r[0] <= a and b <= r[1])
            if slabs and slabs[-1][2] == ys:
                slabs[-1] = (slabs[-1][0], b, ys)
            else:
                slabs.append((a, b, ys))
        self.slabs = [s for s in slabs if s[2]] if any(s[2] for s in slabs) else []
        self._edges = [float(s[0]) for s in self.slabs]

    @property
    def measure(self) -> Fraction:
        return sum(((b - a) * sum((hi - lo for lo, hi in ys), Fraction(0)) for a, b, ys in self.slabs), Fraction(0))

    def _section(self, x: float) -> List[Tuple[float, float]]:
        i = bisect.bisect_right(self._edges, x) - 1
        if i < 0 or x >= float(self.slabs[i][1]):
            return []
        return [(float(lo), float(hi)) for lo, hi in self.slabs[i][2]]

    def _y_measure(self, x: float, shifts: Sequence[int]) -> float:
        fr = FloatFrame()
        cur = self._section(x)
        for s in shifts:
            if not cur:
                return 0.0
            xs = (x + s * self.alpha_f) % 1.0
            ts = (2 * s * x + s * s * self.alpha_f) % 1.0
            cur = _intersect(fr, cur, _shift_back(fr, self._section(xs), ts))
        return sum(hi - lo for lo, hi in cur)

    def correlation_quadrature(self, shifts: Sequence[int], points: int = 2048) -> Tuple[float, float]:
        """Midpoint rule in x with exact y-sections; returns (value, error bound).

        The x-integrand has at most J jumps and is Lipschitz with constant
        Lip between them, so the error is at most (J + Lip) / points.
        """
        if not self.slabs:
            return 0.0, 0.0
        h = 1.0 / points
        total = math.fsum(self._y_measure((i + 0.5) * h, shifts) for i in range(points))
        jumps = 2 * len(self.slabs) * (len(shifts) + 1)
        nint = max(len(s[2]) for s in self.slabs)
        lip = sum(4 * abs(s) * nint for s in shifts)
        return total * h, (jumps + lip) / points

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        out = np.zeros(x.shape, dtype=bool)
        for a, b, ys in self.slabs:
            inx = (x >= float(a)) & (x < float(b))
            iny = np.zeros(x.shape, dtype=bool)
            for lo, hi in ys:
                iny |= (y >= float(lo)) & (y < float(hi))
            out |= inx & iny
        return out

    def correlation_monte_carlo(self, shifts: Sequence[int], samples: int = 100000, seed: int = 0):
        rng = np.random.default_rng(seed)
        x, y = rng.random(samples), rng.random(samples)
        hit = self.contains(x, y)
        for s in shifts:
            xs = np.mod(x + s * self.alpha_f, 1.0)
            ys = np.mod(y + 2 * s * x + s * s * self.alpha_f, 1.0)
            hit &= self.contains(xs, ys)
        p = hit.mean()
        return float(p), float(math.sqrt(max(p * (1 - p), 1e-300) / samples))


# --- multicorrelations ----------------------------------------------------------------

def shift_functions(polys: Sequence) -> List[ShiftFn]:
    """Integer shift sequences from univariate MultiPolyQ, int lists, or callables."""
    out = []
    for p in polys:
        if callable(p) and not isinstance(p, MultiPolyQ):
            out.append(p)
        elif isinstance(p, MultiPolyQ):
            out.append(_poly_shift(p))
        else:
            out.append(_poly_shift(MultiPolyQ.univariate([Fraction(c) for c in p])))
    return out


def _poly_shift(p: MultiPolyQ) -> ShiftFn:
    def f(n: int) -> int:
        v = Fraction(p.evaluate((n,)))
        if v.denominator != 1:
            raise ValueError(f"shift polynomial {p} is not integral at n={n}")
        return int(v)
    return f


@dataclass
class CorrelationSeries:
    ns: List[int]
    values: List  # exact values (Fraction / QuadraticReal) or floats
    errors: Optional[List[float]] = None

    def floats(self) -> List[float]:
        return [float(v) for v in self.values]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "value", "exact"] + (["error_bound"] if self.errors else []))
        for i, (n, v) in enumerate(zip(self.ns, self.values)):
            row = [n, repr(float(v)), _exact_str(v)]
            if self.errors:
                row.append(repr(self.errors[i]))
            w.writerow(row)
        return buf.getvalue()


def _exact_str(v) -> str:
    if isinstance(v, QuadraticReal):
        return f"{v.a} + {v.b}*sqrt({v.D})" if v.b else str(v.a)
    if isinstance(v, Fraction):
        return str(v)
    return repr(float(v))


def multicorrelation(system, shifts: Sequence, n_range: Iterable[int], A: Optional[int] = None,
                     quadrature_points: int = 2048) -> CorrelationSeries:
    """mu(A cap T^{-s_1(n)} A cap ... cap T^{-s_k(n)} A) for each n in the range.

    Rotations give exact values; finite systems need the bit-set ``A``;
    skew products use midpoint quadrature with a rigorous error bound.
    """
    ns = list(n_range)
    if not ns:
        raise EmptyRange("empty n range")
    fns = shift_functions(shifts)
    if isinstance(system, IntervalRotationSystem):
        vals = [system.correlation([f(n) for f in fns]) for n in ns]
        return CorrelationSeries(ns, vals)
    if isinstance(system, FiniteRotationSystem):
        if A is None:
            raise ValueError("finite systems need the set A")
        return CorrelationSeries(ns, [system.correlation(A, [f(n) for f in fns]) for n in ns])
    if isinstance(system, SkewProductSystem):
        vals, errs = [], []
        for n in ns:
            v, e = system.correlation_quadrature([f(n) for f in fns], quadrature_points)
            vals.append(v)
            errs.append(e)
        return CorrelationSeries(ns, vals, errs)
    raise TypeError(f"unsupported system {type(system).__name__}")


def monte_carlo_correlation(system: IntervalRotationSystem, shifts: Sequence[int], samples: int = 10 ** 6,
                            seed: int = 0) -> Tuple[float, float]:
    """Independent float estimate with its standard error."""
    rng = np.random.default_rng(seed)
    x = rng.random(samples)

    def member(v):
        hit = np.zeros(v.shape, dtype=bool)
        for lo, hi in system.intervals:
            hit |= (v >= float(lo)) & (v < float(hi))
        return hit

    hit = member(x)
    for s in shifts:
        t = float(system.frame.to_float(system.frame.frac_multiple(s)))
        hit &= member(np.mod(x + t, 1.0))
    p = float(hit.mean())
    return p, math.sqrt(max(p * (1 - p), 1e-300) / samples)


# --- Khintchine report ----------------------------------------------------------------

def _max_gap(P: Sequence[int]) -> Optional[int]:
    if len(P) < 2:
        return None
    return max(b - a for a, b in zip(P, P[1:]))


@dataclass
class KhintchineReport:
    threshold: Fraction
    scanned: List[int]
    popular: List[int]
    max_gap: Optional[int]
    density: Fraction
    gap_ladder: Dict[int, Optional[int]] = field(default_factory=dict)
    syndetic_at_scale: bool = False

    @property
    def popular_count(self) -> int:
        return len(self.popular)

    def summary(self) -> dict:
        return {
            "threshold": float(self.threshold),
            "threshold_exact": str(self.threshold),
            "popular_count": self.popular_count,
            "scanned": len(self.scanned),
            "max_gap": self.max_gap,
            "density": float(self.density),
            "gap_ladder": {str(k): v for k, v in self.gap_ladder.items()},
            "syndetic_at_scale": self.syndetic_at_scale,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True, indent=2)


def khintchine_report(correlations: CorrelationSeries, delta, k: int, eps) -> KhintchineReport:
    """Popular set {n : value > max(delta^(k+1) - eps, 0)} with gap statistics.

    The max gap is the largest difference between consecutive popular n.
    It is also computed on the first quarter, half and all of the scanned
    window; equal values are reported as syndetic-at-scale.
    """
    delta, eps = Fraction(delta), Fraction(eps)
    threshold = delta ** (k + 1) - eps
    ns, vals = correlations.ns, correlations.values
    # a popular n must also carry some mass, so empty sets never qualify
    popular = [n for n, v in zip(ns, vals) if v > threshold and v > 0]
    popular.sort()
    gap = _max_gap(popular)
    ladder: Dict[int, Optional[int]] = {}
    sorted_ns = sorted(ns)
    for frac in (4, 2, 1):
        cut = sorted_ns[len(sorted_ns) // frac - 1] if len(sorted_ns) // frac else sorted_ns[0]
        ladder[cut] = _max_gap([n for n in popular if n <= cut])
    gaps = list(ladder.values())
    stable = len(popular) >= 2 and all(g is not None and g == gaps[-1] for g in gaps)
    density = Fraction(len(popular), len(ns))
    return KhintchineReport(threshold, ns, popular, gap, density, ladder, stable)


# --- step functions and the limit formula ------------------------------------------------

@dataclass(frozen=True)
class Piece:
    """value * e(freq * x) on [lo, hi)."""

    lo: Fraction
    hi: Fraction
    value: Union[Fraction, complex] = Fraction(1)
    freq: int = 0


class StepFunction:
    """Finite sum of pieces on [0,1) with rational breakpoints."""

    def __init__(self, pieces: Iterable[Piece]):
        ps = []
        for p in pieces:
            lo, hi = Fraction(p.lo), Fraction(p.hi)
            if not (0 <= lo <= hi <= 1):
                raise ValueError("piece outside [0, 1)")
            if lo < hi and p.value != 0:
                v = p.value if isinstance(p.value, complex) else Fraction(p.value)
                ps.append(Piece(lo, hi, v, int(p.freq)))
        self.pieces = ps

    @classmethod
    def indicator(cls, intervals: Iterable[Tuple]) -> "StepFunction":
        return cls(Piece(lo, hi) for lo, hi in canonical_intervals(intervals))

    @classmethod
    def constant(cls, c=1) -> "StepFunction":
        return cls([Piece(Fraction(0), Fraction(1), Fraction(c))])

    @classmethod
    def character(cls, k: int) -> "StepFunction":
        return cls([Piece(Fraction(0), Fraction(1), Fraction(1), k)])

    @property
    def is_real_step(self) -> bool:
        return all(p.freq == 0 and isinstance(p.value, Fraction) for p in self.pieces)

    def endpoints(self) -> List[Fraction]:
        return sorted({v for p in self.pieces for v in (p.lo, p.hi)} | {Fraction(0)})

    def denominators(self) -> List[int]:
        return [v.denominator for v in self.endpoints()]


def _e(x: float) -> complex:
    return complex(math.cos(2 * math.pi * x), math.sin(2 * math.pi * x))


def _triple_integral(frame, fs: Sequence[StepFunction], ts: Sequence, exact_acc: Dict, float_acc: List[complex]):
    """Accumulate int f_0(x) f_1(x + t_1) f_2(x + t_2) dx.

    Real step contributions are added exactly per value product into
    ``exact_acc``; oscillating ones go to ``float_acc``.
    """
    shifted = []
    for f, t in zip(fs, ts):
        items = []
        for p in f.pieces:
            iv = [(frame.rational(p.lo), frame.rational(p.hi))]
            if t is not None:
                iv = _shift_back(frame, iv, t)
            items.append((p, iv))
        shifted.append(items)

    def rec(i, cur, value, freq, phase):
        if i == len(shifted):
            if not cur:
                return
            if freq == 0 and isinstance(value, Fraction) and phase == 0:
                key = value
                exact_acc[key] = frame.add(exact_acc.get(key, frame.zero), _measure(frame, cur))
            else:
                tot = 0j
                for lo, hi in cur:
                    a, b = frame.to_float(lo), frame.to_float(hi)
                    if freq == 0:
                        tot += b - a
                    else:
                        tot += (_e(freq * b) - _e(freq * a)) / (2j * math.pi * freq)
                float_acc.append(complex(value) * _e(phase) * tot)
            return
        t = ts[i]
        tf = frame.to_float(t) if t is not None else 0.0
        for p, iv in shifted[i]:
            nxt = iv if cur is None else _intersect(frame, cur, iv)
            if nxt:
                rec(i + 1, nxt, value * p.value, freq + p.freq, phase + p.freq * tf)

    rec(0, None, Fraction(1), 0, 0.0)


@dataclass
class LimitCheck:
    ladder: List[int]
    lhs: List[complex]
    rhs: complex
    gaps: List[float]
    lhs_exact: List[object] = field(default_factory=list)
    rhs_exact: Optional[Fraction] = None

    @property
    def decreasing(self) -> bool:
        # gaps at rounding level count as zero
        return all(b <= a or b <= 1e-12 for a, b in zip(self.gaps, self.gaps[1:]))

    def to_dict(self) -> dict:
        def cx(z):
            return [z.real, z.imag]
        return {
            "ladder": self.ladder,
            "lhs": [cx(z) for z in self.lhs],
            "rhs": cx(self.rhs),
            "rhs_exact": None if self.rhs_exact is None else str(self.rhs_exact),
            "gaps": self.gaps,
            "gap_decreasing": self.decreasing,
        }


def _integral_at(fs, mults, u) -> Tuple[Dict, List[complex], object]:
    if isinstance(u, Fraction):
        frame = RationalFrame()
        ts = [None] + [frame.rational(m * u - math.floor(m * u)) for m in mults]
    else:
        frame = FloatFrame()
        ts = [None] + [(m * u) % 1.0 for m in mults]
    acc: Dict = {}
    flt: List[complex] = []
    _triple_integral(frame, fs, ts, acc, flt)
    return acc, flt, frame


def subgroup_integral(fs: Sequence[StepFunction], r: int, s: int, gauss_nodes: int = 24):
    """int_0^1 int_0^1 f_0(z) f_1(z + r u) f_2(z + s u) dz du.

    The inner integral is piecewise linear in u for real step functions, so
    the trapezoid rule on the breakpoints is exact; oscillating pieces use
    Gauss-Legendre on each breakpoint cell.
    """
    mults = [0, r, s]
    eps = [f.endpoints() for f in fs]
    bps = {Fraction(0), Fraction(1)}
    for i in range(3):
        for j in range(i + 1, 3):
            delta = mults[j] - mults[i]
            if delta == 0:
                continue
            for a in eps[i]:
                for b in eps[j]:
                    for kk in range(abs(delta)):
                        u = (b - a + kk) / delta
                        bps.add(u - math.floor(u))
    bps = sorted(bps)
    exact = all(f.is_real_step for f in fs)
    if exact:
        vals = []
        for u in bps:
            acc, flt, frame = _integral_at(fs, [r, s], u)
            vals.append(sum((k * v for k, v in acc.items()), Fraction(0)))
        total = sum(((b - a) * (va + vb) / 2 for a, b, va, vb in zip(bps, bps[1:], vals, vals[1:])), Fraction(0))
        return total, total
    nodes, weights = np.polynomial.legendre.leggauss(gauss_nodes)
    re_parts, im_parts = [], []
    for a, b in zip(bps, bps[1:]):
        a, b = float(a), float(b)
        for x, w in zip(nodes, weights):
            u = (b - a) / 2 * x + (a + b) / 2
            acc, flt, frame = _integral_at(fs, [r, s], u)
            val = sum(flt, 0j) + sum(float(k) * frame.to_float(v) for k, v in acc.items())
            re_parts.append(w * (b - a) / 2 * val.real)
            im_parts.append(w * (b - a) / 2 * val.imag)
    return complex(math.fsum(re_parts), math.fsum(im_parts)), None


DEFAULT_LIMIT_LADDER = (1000, 10000, 100000)


def kronecker_limit_check(system: IntervalRotationSystem, r: int, s: int, p, fs: Sequence[StepFunction],
                          ladder: Sequence[int] = DEFAULT_LIMIT_LADDER) -> LimitCheck:
    """Cesaro averages of int f_0 f_1(x + r p(n) alpha) f_2(x + s p(n) alpha) vs the subgroup integral."""
    if r == s:
        raise DegenerateShifts("r and s must differ")
    if r == 0 or s == 0:
        raise DegenerateShifts("r and s must be nonzero")
    if len(fs) != 3:
        raise ValueError("need exactly three functions")
    (pf,) = shift_functions([p])
    ladder = sorted(int(N) for N in ladder)
    if not ladder or ladder[0] < 1:
        raise EmptyRange("empty ladder")
    dens = [q for f in fs for q in f.denominators()]
    frame = make_frame(system.alpha, dens)
    exact_acc: Dict = {}
    float_re: List[float] = []
    float_im: List[float] = []
    lhs, lhs_exact = [], []
    n = 0
    for N in ladder:
        while n < N:
            n += 1
            pn = pf(n)
            ts = [None, frame.frac_multiple(r * pn), frame.frac_multiple(s * pn)]
            flt: List[complex] = []
            _triple_integral(frame, fs, ts, exact_acc, flt)
            for z in flt:
                float_re.append(z.real)
                float_im.append(z.imag)
        ex = _combine_exact(frame, exact_acc)
        lhs_exact.append(ex / N if ex is not None else None)
        exf = float(ex) if ex is not None else 0.0
        lhs.append(complex(exf + math.fsum(float_re), math.fsum(float_im)) / N)
    rhs, rhs_exact = subgroup_integral(fs, r, s)
    rhs = complex(rhs)
    gaps = [abs(z - rhs) for z in lhs]
    return LimitCheck(ladder, lhs, rhs, gaps, lhs_exact, rhs_exact)


def _combine_exact(frame, acc: Dict):
    if not acc:
        return None
    total = None
    for val, elem in acc.items():
        term = frame.exact(elem) * val
        total = term if total is None else total + term
    return total


# --- finite systems -----------------------------------------------------------------------

@dataclass
class FiniteCheck:
    m: int
    period: int
    average: Fraction
    subgroup_average: Fraction
    independent_prediction: Fraction
    equidistributed: bool
    partial_averages: Dict[int, Fraction]

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "period": self.period,
            "average": str(self.average),
            "subgroup_prediction": str(self.subgroup_average),
            "independent_prediction": str(self.independent_prediction),
            "equidistributed_in_subgroup": self.equidistributed,
            "partial_averages": {str(k): str(v) for k, v in self.partial_averages.items()},
        }


def _sequence_period(fns: Sequence[ShiftFn], m: int, bound: int) -> int:
    seq = [tuple(f(n) % m for f in fns) for n in range(2 * bound)]
    for q in range(1, bound + 1):
        if bound % q == 0 and all(seq[n] == seq[n + q] for n in range(bound)):
            return q
    return bound


def finite_rational_check(system: FiniteRotationSystem, A: int, shifts: Sequence,
                          denominator: int = 1, multiples: int = 3) -> FiniteCheck:
    """Exact uniform-Cesaro limit of the correlations over one period.

    Integer-valued polynomials with coefficient denominator D are periodic
    mod m with period dividing m*D; the minimal period is found by search.
    """
    fns = shift_functions(shifts)
    for p in shifts:
        if isinstance(p, MultiPolyQ):
            denominator = math.lcm(denominator, p.denominator())
    m = system.m
    period = _sequence_period(fns, m, m * denominator) if fns else 1
    vals = [system.correlation(A, [f(n) for f in fns]) for n in range(period)]
    avg = sum(vals, Fraction(0)) / period
    partial = {}
    acc = Fraction(0)
    for n in range(period * multiples):
        acc += system.correlation(A, [f(n) for f in fns])
        if (n + 1) % period == 0:
            partial[n + 1] = acc / (n + 1)
    # subgroup generated by the attained shift tuples and the visit counts
    tuples = [tuple(f(n) * system.a % m for f in fns) for n in range(period)]
    H = {tuple(0 for _ in fns)}
    frontier = list(H)
    gens = set(tuples)
    while frontier:
        h = frontier.pop()
        for g in gens:
            x = tuple((a + b) % m for a, b in zip(h, g))
            if x not in H:
                H.add(x)
                frontier.append(x)
    counts: Dict[Tuple, int] = {}
    for t in tuples:
        counts[t] = counts.get(t, 0) + 1
    equi = set(counts) == H and len(set(counts.values())) == 1
    sub = sum((_finite_corr(system, A, h) for h in H), Fraction(0)) / len(H)
    delta = system.density(A)
    return FiniteCheck(m, period, avg, sub, delta ** (len(fns) + 1), equi, partial)


def _finite_corr(system: FiniteRotationSystem, A: int, h: Sequence[int]) -> Fraction:
    cur = A
    for s in h:
        cur &= system.shift_back(A, s)
    return Fraction(cur.bit_count(), system.m)


# --- family admissibility -------------------------------------------------------------------

def require_jointly_intersective(family, moduli, field=None) -> None:
    """Refuse a family that has no common root at one of the moduli."""
    from .intpoly import joint_intersectivity_search

    for r in moduli:
        if joint_intersectivity_search(family, r, field) is None:
            raise FamilyRefused(f"family has no common root modulo {r}")
