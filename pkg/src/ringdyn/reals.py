"""Real numbers built from rationals and declared irrational generators.

``SymbolicReal`` is the exact symbolic form q_0 + sum c_i alpha_i.  The
generators are axioms: their rational independence is assumed, never checked.
For geometry, a symbolic real is turned into either a ``QuadraticReal``
(exact order and floor, when only one quadratic generator is involved) or a
``Fraction`` approximating it to ``HIGH_PRECISION_BITS`` bits (about 100
decimal digits).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

HIGH_PRECISION_BITS = 340

Rational = Union[int, Fraction]


def _squarefree_part(n: int) -> Tuple[int, int]:
    # n = k^2 * D with D squarefree; returns (k, D)
    k, D, p = 1, n, 2
    while p * p <= D:
        while D % (p * p) == 0:
            D //= p * p
            k *= p
        p += 1
    return k, D


@dataclass(frozen=True)
class Generator:
    """An irrational real a + b*sqrt(D) (quadratic) with a name."""

    name: str
    a: Fraction
    b: Fraction
    D: int

    def exact(self) -> "QuadraticReal":
        return QuadraticReal(self.a, self.b, self.D)

    def approx(self, bits: int = HIGH_PRECISION_BITS) -> Fraction:
        return self.exact().approx(bits)

    def __float__(self):
        return float(self.exact())


PRESET_GENERATORS: Dict[str, Generator] = {
    "sqrt2": Generator("sqrt2", Fraction(0), Fraction(1), 2),
    "sqrt3": Generator("sqrt3", Fraction(0), Fraction(1), 3),
    "golden": Generator("golden", Fraction(1, 2), Fraction(1, 2), 5),
}

_SQRT_RE = re.compile(r"^sqrt(\d+)$")


def generator(name: str) -> Generator:
    """Look up a preset generator; ``sqrtN`` works for any non-square N."""
    if name in PRESET_GENERATORS:
        return PRESET_GENERATORS[name]
    if name in ("phi", "golden_ratio"):
        return PRESET_GENERATORS["golden"]
    m = _SQRT_RE.match(name)
    if m:
        n = int(m.group(1))
        k, D = _squarefree_part(n)
        if D == 1:
            raise ValueError(f"{name} is rational")
        return Generator(name, Fraction(0), Fraction(k), D)
    raise KeyError(f"unknown irrational generator {name!r}")


class QuadraticReal:
    """Exact real a + b*sqrt(D) with rational a, b and squarefree D > 1."""

    __slots__ = ("a", "b", "D")

    def __init__(self, a: Rational, b: Rational, D: int):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.D = D

    def __repr__(self):
        return f"QuadraticReal({self.a}, {self.b}, {self.D})"

    def _lift(self, other) -> Optional["QuadraticReal"]:
        if isinstance(other, QuadraticReal):
            if other.D != self.D and other.b and self.b:
                raise ValueError("mixing different quadratic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticReal(other, 0, self.D)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        D = self.D if self.b else o.D
        return QuadraticReal(self.a + o.a, self.b + o.b, D)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticReal(-self.a, -self.b, self.D)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadraticReal(self.a * other, self.b * other, self.D)
        o = self._lift(other)
        if o is None:
            return NotImplemented
        D = self.D if self.b else o.D
        return QuadraticReal(self.a * o.a + self.b * o.b * D, self.a * o.b + self.b * o.a, D)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadraticReal(self.a / other, self.b / other, self.D)
        o = self._lift(other)
        if o is None:
            return NotImplemented
        n = o.a * o.a - o.b * o.b * o.D
        if n == 0:
            raise ZeroDivisionError("division by zero")
        return self * QuadraticReal(o.a / n, -o.b / n, o.D)

    def sign(self) -> int:
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0 or (a > 0) == (b > 0):
            return 1 if (b > 0 if a == 0 else a > 0) else -1
        # opposite signs: compare magnitudes exactly
        if a * a > b * b * self.D:
            return 1 if a > 0 else -1
        return 1 if b > 0 else -1

    def _cmp(self, other) -> int:
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return (self - o).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.D))

    def __floor__(self) -> int:
        if self.b == 0:
            return math.floor(self.a)
        L = math.lcm(self.a.denominator, self.b.denominator)
        A = int(self.a * L)
        B = int(self.b * L)
        r = math.isqrt(B * B * self.D)
        fs = r if B > 0 else -r - 1
        return (A + fs) // L

    def __float__(self):
        return float(self.approx(80))

    def approx(self, bits: int = HIGH_PRECISION_BITS) -> Fraction:
        """Rational within 2^-bits (times |b|) of the value."""
        if self.b == 0:
            return self.a
        scale = 1 << (2 * bits)
        root = Fraction(math.isqrt(self.D * scale), 1 << bits)
        return self.a + self.b * root

    def frac(self) -> "QuadraticReal":
        return self - math.floor(self)

    def is_rational(self) -> bool:
        return self.b == 0


ExactReal = Union[QuadraticReal, Fraction]


def floor_exact(x) -> int:
    return math.floor(x)


def frac_exact(x):
    return x - math.floor(x)


class SymbolicReal:
    """q_0 + sum_i c_i * alpha_i over named generators; exact and immutable."""

    __slots__ = ("q0", "terms")

    def __init__(self, q0: Rational = 0, terms: Optional[Mapping[str, Rational]] = None):
        object.__setattr__(self, "q0", Fraction(q0))
        clean = {k: Fraction(v) for k, v in sorted((terms or {}).items()) if Fraction(v) != 0}
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, key, value):
        raise AttributeError("SymbolicReal is immutable")

    @classmethod
    def gen(cls, name: str, coeff: Rational = 1) -> "SymbolicReal":
        generator(name)
        return cls(0, {name: coeff})

    @classmethod
    def coerce(cls, x) -> "SymbolicReal":
        if isinstance(x, SymbolicReal):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        if isinstance(x, str):
            return parse_symbolic(x)
        raise TypeError(f"cannot interpret {x!r} as a symbolic real")

    def __repr__(self):
        return f"SymbolicReal({self})"

    def __str__(self):
        parts = [str(self.q0)] if self.q0 or not self.terms else []
        for k, v in self.terms.items():
            parts.append(f"{v}*{k}" if v != 1 else k)
        return " + ".join(parts).replace("+ -", "- ")

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SymbolicReal(other)
        if not isinstance(other, SymbolicReal):
            return NotImplemented
        return self.q0 == other.q0 and self.terms == other.terms

    def __hash__(self):
        return hash((self.q0, tuple(self.terms.items())))

    def __add__(self, other):
        o = SymbolicReal.coerce(other)
        terms = dict(self.terms)
        for k, v in o.terms.items():
            terms[k] = terms.get(k, 0) + v
        return SymbolicReal(self.q0 + o.q0, terms)

    __radd__ = __add__

    def __neg__(self):
        return SymbolicReal(-self.q0, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-SymbolicReal.coerce(other))

    def __rsub__(self, other):
        return SymbolicReal.coerce(other) - self

    def __mul__(self, c):
        if isinstance(c, SymbolicReal):
            if c.terms and self.terms:
                raise TypeError("product of two irrational symbolic reals is not linear")
            if c.terms:
                return c * self.q0
            c = c.q0
        if not isinstance(c, (int, Fraction)):
            return NotImplemented
        return SymbolicReal(self.q0 * c, {k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def is_rational(self) -> bool:
        return not self.terms

    def is_zero(self) -> bool:
        return self.q0 == 0 and not self.terms

    def equal_mod1(self, other) -> bool:
        diff = self - SymbolicReal.coerce(other)
        return diff.is_rational() and diff.q0.denominator == 1

    def reduce_mod1(self) -> "SymbolicReal":
        """Drop the integer part of the rational constant (irrational part kept)."""
        return SymbolicReal(self.q0 - math.floor(self.q0), self.terms)

    def exact(self) -> ExactReal:
        """QuadraticReal when all generators share one sqrt(D); Fraction approximation otherwise."""
        if not self.terms:
            return self.q0
        gens = [generator(k) for k in self.terms]
        Ds = {g.D for g in gens}
        if len(Ds) == 1:
            out = QuadraticReal(self.q0, 0, gens[0].D)
            for g, c in zip(gens, self.terms.values()):
                out = out + g.exact() * c
            return out
        return self.approx()

    def approx(self, bits: int = HIGH_PRECISION_BITS) -> Fraction:
        out = self.q0
        for k, c in self.terms.items():
            out += c * generator(k).approx(bits)
        return out

    def __float__(self):
        return float(self.approx(96))

    def frac_float(self) -> float:
        x = self.exact()
        return float(x - math.floor(x))

    def fixed_point_frac(self, bits: int = 64) -> int:
        """floor(frac(x) * 2^bits), computed exactly or to ~100 digits."""
        x = self.exact() * (1 << bits)
        return math.floor(x) % (1 << bits)

    def to_dict(self) -> dict:
        return {"rational": str(self.q0), "generators": {k: str(v) for k, v in self.terms.items()}}


_TERM_RE = re.compile(r"\s*([+-]?)\s*([^+-]+)")


def parse_symbolic(text: str) -> SymbolicReal:
    """Parse strings like ``"1/3 + 2*sqrt2 - golden/2"``."""
    out = SymbolicReal()
    s = text.strip()
    if not s:
        raise ValueError("empty symbolic real")
    for sign, body in _TERM_RE.findall(s):
        body = body.strip()
        if not body:
            continue
        mult = -1 if sign == "-" else 1
        factors = [f.strip() for f in body.split("*")]
        coeff = Fraction(mult)
        gen_name = None
        for f in factors:
            if "/" in f and not re.match(r"^[\d\s/]+$", f):
                name, den = f.split("/", 1)
                gen_name = name.strip()
                coeff /= Fraction(den.strip())
            elif re.match(r"^[\d\s/.]+$", f):
                coeff *= Fraction(f)
            else:
                if gen_name is not None:
                    raise ValueError(f"nonlinear term in {text!r}")
                gen_name = f
        if gen_name is None:
            out = out + coeff
        else:
            out = out + SymbolicReal.gen(gen_name, coeff)
    return out


def symbolic_from_dict(data) -> SymbolicReal:
    """Accept ``{"rational": "1/2", "generators": {"sqrt2": "3"}}``, a string, or a number."""
    if isinstance(data, SymbolicReal):
        return data
    if isinstance(data, dict):
        q0 = Fraction(str(data.get("rational", 0)))
        gens = {k: Fraction(str(v)) for k, v in (data.get("generators") or {}).items()}
        for k in gens:
            generator(k)
        return SymbolicReal(q0, gens)
    if isinstance(data, (int, Fraction)):
        return SymbolicReal(data)
    if isinstance(data, float):
        raise TypeError("floats are not accepted as exact reals; use a rational string")
    return parse_symbolic(str(data))
