"""Exact arithmetic in Z[zeta_8] and its archimedean embeddings.

An element is stored as four integer coordinates (c0, c1, c2, c3) in the
basis 1, z, z^2, z^3 with z^4 = -1.  Python integers are arbitrary precision,
so there is no overflow mode to select; all ring operations are exact.

The trace pairing <a, b> = Tr(a*b / (4*z^3)) equals the z^3-coordinate of
a*b and is unimodular on the coordinate lattice (its Gram matrix is the
antidiagonal permutation), which is what makes O_K self-dual and additive
characters mod q well behaved.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from math import gcd
from typing import Iterable, NamedTuple


class Vec2Int(NamedTuple):
    v1: int
    v2: int


def det2(c: Iterable[int], n: Iterable[int]) -> int:
    """det(c, n) = c1*n2 - c2*n1."""
    c1, c2 = c
    n1, n2 = n
    return c1 * n2 - c2 * n1


@dataclass(frozen=True)
class CycInt:
    c0: int = 0
    c1: int = 0
    c2: int = 0
    c3: int = 0

    def coords(self) -> tuple[int, int, int, int]:
        return (self.c0, self.c1, self.c2, self.c3)

    def __add__(self, other: "CycInt") -> "CycInt":
        return CycInt(self.c0 + other.c0, self.c1 + other.c1,
                      self.c2 + other.c2, self.c3 + other.c3)

    def __sub__(self, other: "CycInt") -> "CycInt":
        return CycInt(self.c0 - other.c0, self.c1 - other.c1,
                      self.c2 - other.c2, self.c3 - other.c3)

    def __neg__(self) -> "CycInt":
        return CycInt(-self.c0, -self.c1, -self.c2, -self.c3)

    def __mul__(self, other) -> "CycInt":
        if isinstance(other, int):
            return CycInt(self.c0 * other, self.c1 * other,
                          self.c2 * other, self.c3 * other)
        a, b = self.coords(), other.coords()
        # convolution reduced by z^4 = -1
        c = [0, 0, 0, 0]
        for i in range(4):
            if a[i] == 0:
                continue
            for j in range(4):
                k = i + j
                if k < 4:
                    c[k] += a[i] * b[j]
                else:
                    c[k - 4] -= a[i] * b[j]
        return CycInt(*c)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords())

    def scalar_divisible(self, m: int) -> bool:
        return all(x % m == 0 for x in self.coords())

    def scalar_div(self, m: int) -> "CycInt":
        if not self.scalar_divisible(m):
            raise ValueError(f"{self} not divisible by {m}")
        return CycInt(*(x // m for x in self.coords()))

    def to_json(self) -> list[int]:
        return [self.c0, self.c1, self.c2, self.c3]

    def __repr__(self) -> str:
        return f"CycInt({self.c0}, {self.c1}, {self.c2}, {self.c3})"


ZETA = CycInt(0, 1, 0, 0)
ONE = CycInt(1, 0, 0, 0)
DELTA_K = CycInt(0, 0, 0, 4)  # generator of the different ideal


def mul(a: CycInt, b: CycInt) -> CycInt:
    return a * b


def norm(a: CycInt) -> int:
    """Field norm: product of the four complex embeddings, exactly.

    Computed as a * conj_star(a) which lands in Z; equivalently the resultant
    of the coordinate polynomial with x^4 + 1.
    """
    if a.is_zero():
        return 0
    prod = a * _sigma(a, 3) * _sigma(a, 5) * _sigma(a, 7)
    assert prod.c1 == prod.c2 == prod.c3 == 0, "norm computation left the rationals"
    return prod.c0


def _sigma(a: CycInt, k: int) -> CycInt:
    """Galois conjugate z -> z^k for odd k (exact coordinate permutation)."""
    out = [0, 0, 0, 0]
    for i, coef in enumerate(a.coords()):
        e = (i * k) % 8
        if e < 4:
            out[e] += coef
        else:
            out[e - 4] -= coef
    return CycInt(*out)


def conj_star(a: CycInt) -> CycInt:
    """a* = N(a)/a, the product of the three nontrivial conjugates."""
    if a.is_zero():
        raise ValueError("conj_star of zero")
    return _sigma(a, 3) * _sigma(a, 5) * _sigma(a, 7)


def trace_pair(a: CycInt, b: CycInt) -> int:
    """<a, b> = Tr(a*b/delta_K) = z^3-coordinate of a*b."""
    return (a * b).c3


# Gram matrix of the trace pairing in the power basis: G[i][j] = <z^i, z^j>
GRAM = [[1 if i + j == 3 else 0 for j in range(4)] for i in range(4)]


def ell(a: CycInt) -> Vec2Int:
    """ell(n0 + n1 z + n2 z^2 + n3 z^3) = (n3, n2) = (<a,1>, <a,z>)."""
    return Vec2Int(a.c3, a.c2)


# the four archimedean embeddings send z to exp(2*pi*i*k/8), k in 1,3,5,7
_EMBED_ROOTS = tuple(cmath.exp(2j * cmath.pi * k / 8) for k in (1, 3, 5, 7))


def embeddings(a: CycInt) -> tuple[complex, complex, complex, complex]:
    return tuple(
        a.c0 + a.c1 * z + a.c2 * z * z + a.c3 * z ** 3 for z in _EMBED_ROOTS
    )


def sup_norm(a: CycInt) -> float:
    """|a|_sup = max over archimedean embeddings of |sigma_v(a)|."""
    return max(abs(z) for z in embeddings(a))


def abs_inf(a: CycInt) -> float:
    """|a|_inf = |N(a)|^(1/4)."""
    return abs(norm(a)) ** 0.25


def content(a: CycInt) -> int:
    """Largest rational integer dividing a (0 for a = 0)."""
    g = 0
    for x in a.coords():
        g = gcd(g, abs(x))
    return g


def mult_matrix(a: CycInt) -> list[list[int]]:
    """Matrix of multiplication by a on coordinates: column j is a * z^j."""
    cols = []
    b = CycInt(1)
    for _ in range(4):
        cols.append((a * b).coords())
        b = b * ZETA
    # cols[j] is the image of z^j; build row-major matrix M with M @ x = coords(a*x)
    return [[cols[j][i] for j in range(4)] for i in range(4)]


@dataclass(frozen=True)
class CycRes:
    """Residue class in O_K / q O_K, coordinates reduced into [0, q)."""

    coords: tuple[int, int, int, int]
    q: int

    def __init__(self, value: CycInt | tuple[int, int, int, int], q: int):
        if q <= 0:
            raise ValueError("modulus must be positive")
        raw = value.coords() if isinstance(value, CycInt) else tuple(value)
        object.__setattr__(self, "coords", tuple(x % q for x in raw))
        object.__setattr__(self, "q", q)

    def lift(self) -> CycInt:
        return CycInt(*self.coords)

    def reduce_to(self, q2: int) -> "CycRes":
        if self.q % q2 != 0:
            raise ValueError("can only reduce to a divisor of the modulus")
        return CycRes(self.coords, q2)

    def __add__(self, other: "CycRes") -> "CycRes":
        assert self.q == other.q
        return CycRes(tuple(a + b for a, b in zip(self.coords, other.coords)), self.q)

    def __mul__(self, other: "CycRes") -> "CycRes":
        assert self.q == other.q
        return CycRes(self.lift() * other.lift(), self.q)
