"""Independent reference implementations used only by the tests."""
from __future__ import annotations

from decimal import Decimal, localcontext
from fractions import Fraction
from typing import List, Sequence, Tuple

PREC = 90


def dec(x: Fraction) -> Decimal:
    return Decimal(x.numerator) / Decimal(x.denominator)


def decimal_sqrt(n: int) -> Decimal:
    return Decimal(n).sqrt()


def sweep_correlation(alpha: Decimal, intervals: Sequence[Tuple[Fraction, Fraction]],
                      shifts: Sequence[int]) -> Decimal:
    """mu(A cap (A - s_1 alpha) cap ...) by a midpoint sweep over all endpoints.

    Works at PREC decimal digits with no shared code with the library.
    """
    with localcontext() as ctx:
        ctx.prec = PREC
        base = [(dec(lo), dec(hi)) for lo, hi in intervals]
        sets: List[List[Tuple[Decimal, Decimal]]] = [base]
        for s in shifts:
            t = (s * alpha) % 1
            pieces = []
            for lo, hi in base:
                a, b = lo - t, hi - t
                for off in (-1, 0, 1):
                    x0, x1 = max(a + off, Decimal(0)), min(b + off, Decimal(1))
                    if x0 < x1:
                        pieces.append((x0, x1))
            sets.append(pieces)
        cuts = sorted({Decimal(0), Decimal(1)} | {v for S in sets for iv in S for v in iv})
        total = Decimal(0)
        for a, b in zip(cuts, cuts[1:]):
            mid = (a + b) / 2
            if all(any(lo <= mid < hi for lo, hi in S) for S in sets):
                total += b - a
        return total


def max_consecutive_gap(ns: Sequence[int]):
    ns = sorted(ns)
    if len(ns) < 2:
        return None
    return max(b - a for a, b in zip(ns, ns[1:]))
