"""Univariate polynomials over Q and F_p as coefficient lists (low degree first)."""
from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

Poly = List[Fraction]


def strip(p: Sequence) -> list:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def qpoly(coeffs: Sequence) -> Poly:
    return strip([Fraction(c) for c in coeffs])


def degree(p: Sequence) -> int:
    p = strip(p)
    return len(p) - 1


def add(p: Sequence, q: Sequence) -> Poly:
    n = max(len(p), len(q))
    return strip([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def sub(p: Sequence, q: Sequence) -> Poly:
    return add(p, [-c for c in q])


def mul(p: Sequence, q: Sequence) -> Poly:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return strip(out)


def divmod_poly(p: Sequence, q: Sequence):
    q = qpoly(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = qpoly(p)
    quot = [Fraction(0)] * max(len(r) - len(q) + 1, 0)
    lead = q[-1]
    while len(r) >= len(q):
        c = r[-1] / lead
        shift = len(r) - len(q)
        quot[shift] = c
        for i, b in enumerate(q):
            r[i + shift] -= c * b
        r = strip(r)
    return strip(quot), r


def monic(p: Sequence) -> Poly:
    p = qpoly(p)
    if not p:
        return p
    lead = p[-1]
    return [c / lead for c in p]


def gcd(p: Sequence, q: Sequence) -> Poly:
    """Monic gcd by the Euclidean algorithm (exact)."""
    a, b = qpoly(p), qpoly(q)
    while b:
        a, b = b, divmod_poly(a, b)[1]
    return monic(a)


def derivative(p: Sequence) -> Poly:
    return strip([Fraction(i) * c for i, c in enumerate(p)][1:])


def evaluate(p: Sequence, x):
    acc = 0
    for c in reversed(list(p)):
        acc = acc * x + c
    return acc


def reflect(p: Sequence) -> Poly:
    """(-1)^deg p * p(-x); monic input stays monic."""
    p = qpoly(p)
    d = len(p) - 1
    sign = -1 if d % 2 else 1
    return [sign * c * (-1) ** i for i, c in enumerate(p)]


def squarefree_part(p: Sequence) -> Poly:
    p = qpoly(p)
    g = gcd(p, derivative(p))
    return monic(divmod_poly(p, g)[0])


def charpoly(M: Sequence[Sequence]) -> Poly:
    """Characteristic polynomial det(xI - M) via Faddeev-LeVerrier, exact."""
    n = len(M)
    A = [[Fraction(x) for x in row] for row in M]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    Mk = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # Mk = A * (M_{k-1}) + c_{n-k+1} I
        prev = Mk
        Mk = [[sum(A[i][t] * prev[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            Mk[i][i] += coeffs[n - k + 1]
        AMk = [[sum(A[i][t] * Mk[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        coeffs[n - k] = -sum(AMk[i][i] for i in range(n)) / k
    return coeffs


def eval_matrix(p: Sequence, M: Sequence[Sequence]) -> List[List[Fraction]]:
    """p(M) by Horner's rule on matrices."""
    n = len(M)
    acc = [[Fraction(0)] * n for _ in range(n)]
    for c in reversed(list(p)):
        acc = [[sum(acc[i][t] * M[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            acc[i][i] += c
    return acc


def format_poly(p: Sequence, var: str = "x") -> str:
    terms = []
    for i in range(len(p) - 1, -1, -1):
        c = Fraction(p[i])
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{mag}*{mono}"
        else:
            body = str(mag)
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


# --- F_p arithmetic (coefficients are ints in [0, p)) ---------------------------

def _fp_strip(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def fp_mod(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    a = _fp_strip([x % p for x in a])
    b = _fp_strip([x % p for x in b])
    inv = pow(b[-1], -1, p)
    while len(a) >= len(b):
        c = a[-1] * inv % p
        s = len(a) - len(b)
        for i, y in enumerate(b):
            a[i + s] = (a[i + s] - c * y) % p
        _fp_strip(a)
    return a


def fp_mulmod(a, b, f, p) -> List[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return fp_mod(out, f, p)


def fp_powmod(base, e: int, f, p) -> List[int]:
    result = [1]
    base = fp_mod(base, f, p)
    while e:
        if e & 1:
            result = fp_mulmod(result, base, f, p)
        base = fp_mulmod(base, base, f, p)
        e >>= 1
    return result


def fp_gcd(a, b, p) -> List[int]:
    a = _fp_strip([x % p for x in a])
    b = _fp_strip([x % p for x in b])
    while b:
        a, b = b, fp_mod(a, b, p)
    return a


def _prime_factors(n: int) -> List[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def fp_is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic integer polynomial reduced mod p."""
    f = _fp_strip([int(c) % p for c in f])
    n = len(f) - 1
    if n < 1 or f[-1] != 1:
        return False
    if n == 1:
        return True
    x = [0, 1]
    for q in _prime_factors(n):
        h = fp_powmod(x, p ** (n // q), f, p)
        g = fp_gcd(f, _fp_sub(h, x, p), p)
        if len(g) > 1:
            return False
    h = fp_powmod(x, p ** n, f, p)
    return not _fp_strip(_fp_sub(h, x, p))


def _fp_sub(a, b, p):
    n = max(len(a), len(b))
    return _fp_strip([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)])


def primes_up_to(n: int) -> List[int]:
    sieve = bytearray([1]) * (n + 1)
    sieve[:2] = b"\x00\x00"
    for i in range(2, int(n ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i, v in enumerate(sieve) if v]
