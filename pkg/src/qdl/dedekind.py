"""Cubic resolvent data, Galois classification, and good-prime L-coefficients.

For alpha = n0 + n1 z + n2 z^2 + n3 z^3 the attached cubic is
f_alpha(x) = n3 x^3 + n2 x^2 + n1 x + n0.  When f is an S3 cubic, the degree-3
Dedekind zeta of Q[x]/(f) factors as zeta(s) L(s, pi) with pi of level
dividing n3^2 Disc(f), and the good-prime Dirichlet coefficients are
lambda(p) = -1 + #{x mod p : f(x) = 0}.  Prime-power values follow from the
splitting type, equivalently from the root count:

    3 roots (split):      lambda(p^j) = j + 1
    1 root  ((1,2) type): lambda(p^j) = 1 if j even else 0
    0 roots ((3) type):   lambda(p^j) = 1, -1, 0 with period 3

lambda extends multiplicatively; |lambda(n)| <= d(n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import gcd, isqrt

import numpy as np

from .cyclotomic import CycInt, sup_norm
from .residues import IntPoly, factorize, is_prime, roots_mod_p, sieve_primes

GALOIS_SWEEP_YMAX = 60


@dataclass(frozen=True)
class CubicFieldDesc:
    f: IntPoly
    disc: int
    galois_type: str  # S3 | A3 | reducible | degenerate
    level_bound: int
    bad_primes: frozenset[int]


def _is_square(n: int) -> bool:
    if n < 0:
        return False
    r = isqrt(n)
    return r * r == n


def _has_rational_root(f: IntPoly) -> bool:
    """Rational-root test on the primitive part of a genuine cubic."""
    c = f.content()
    a0, a1, a2, a3 = f.a0 // c, f.a1 // c, f.a2 // c, f.a3 // c
    if a0 == 0:
        return True  # root 0
    for p in _divisors_abs(a0):
        for q in _divisors_abs(a3):
            if gcd(p, q) != 1:
                continue
            for s in (1, -1):
                # f(s*p/q) = 0 <=> a3 s^3 p^3 + a2 s^2 p^2 q + a1 s p q^2 + a0 q^3 = 0
                if a3 * (s * p) ** 3 + a2 * (s * p) ** 2 * q + a1 * (s * p) * q ** 2 + a0 * q ** 3 == 0:
                    return True
    return False


def _divisors_abs(n: int) -> list[int]:
    n = abs(n)
    out = []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
    return out


def classify(f: IntPoly) -> CubicFieldDesc:
    """Galois trichotomy of a cubic: degenerate / reducible / A3 / S3."""
    disc = f.disc()
    if f.a3 == 0:
        typ = "degenerate"
    elif _has_rational_root(f):
        typ = "reducible"
    elif _is_square(disc):  # disc = 0 implies a repeated (hence rational) root
        typ = "A3"
    else:
        typ = "S3"
    bad = frozenset(factorize(abs(f.a3) * abs(disc))) if f.a3 != 0 and disc != 0 else frozenset()
    return CubicFieldDesc(f, disc, typ, f.a3 ** 2 * abs(disc), bad)


def lambda_p(desc: CubicFieldDesc, p: int) -> int:
    """lambda(p) = -1 + #roots of f mod p, at good primes of an S3 cubic."""
    if desc.galois_type != "S3":
        raise ValueError("lambda is defined here only for S3 cubics")
    if p in desc.bad_primes:
        raise ValueError(f"{p} is a bad prime for this cubic")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return -1 + len(roots_mod_p(desc.f, p))


def _lambda_prime_power(nroots: int, j: int) -> int:
    if nroots == 3:
        return j + 1
    if nroots == 1:
        return 1 if j % 2 == 0 else 0
    return (1, -1, 0)[j % 3]


def lambda_n(desc: CubicFieldDesc, n: int) -> int:
    """Multiplicative extension of lambda to integers coprime to bad primes."""
    if desc.galois_type != "S3":
        raise ValueError("lambda is defined here only for S3 cubics")
    if n < 1:
        raise ValueError("n must be >= 1")
    out = 1
    for p, j in factorize(n).items():
        if p in desc.bad_primes:
            raise ValueError(f"{n} shares the bad prime {p}")
        out *= _lambda_prime_power(len(roots_mod_p(desc.f, p)), j)
    return out


def _squarefree_kernel(n: int) -> int:
    out = 1
    for p, e in factorize(abs(n)).items():
        if e % 2 == 1:
            out *= p
    return out * (1 if n > 0 else -1)


def fundamental_discriminant(n: int) -> int:
    d = _squarefree_kernel(n)
    return d if d % 4 == 1 else 4 * d


def _kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n) for n > 0."""
    if n == 0:
        return 1 if abs(a) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def hecke_check(desc: CubicFieldDesc, p: int, kmax: int = 6) -> bool:
    """Verify lambda(p) lambda(p^k) = lambda(p^(k+1)) + chi(p) lambda(p^(k-1)).

    chi is the Kronecker symbol of the fundamental discriminant attached to
    Disc(f) (the central character of the quadratic resolvent field).
    """
    if desc.galois_type != "S3":
        raise ValueError("hecke_check requires an S3 cubic")
    if p in desc.bad_primes:
        raise ValueError(f"{p} is a bad prime")
    nroots = len(roots_mod_p(desc.f, p))
    chi = _kronecker(fundamental_discriminant(desc.disc), p)
    lam = [_lambda_prime_power(nroots, j) for j in range(kmax + 2)]
    for k in range(1, kmax):
        if lam[1] * lam[k] != lam[k + 1] + chi * lam[k - 1]:
            return False
    return True


def rankin_partial(d1: CubicFieldDesc, d2: CubicFieldDesc, Q: float, B: int,
                   phi) -> float:
    """sum over squarefree q coprime to B and both bad-prime sets of
    lambda_1(q) lambda_2(q) phi(q/Q)."""
    if d1.galois_type != "S3" or d2.galois_type != "S3":
        raise ValueError("rankin_partial requires S3 cubics")
    qmax = int(math.ceil(2.0 * Q)) + 1  # phi supported within [lo, hi] <= [?, 2]
    lam1 = _lambda_vector(d1, qmax)
    lam2 = lam1 if d2 is d1 else _lambda_vector(d2, qmax)
    bad = set(d1.bad_primes) | set(d2.bad_primes) | set(factorize(B)) if B > 1 else \
        set(d1.bad_primes) | set(d2.bad_primes)
    sf, ok = _squarefree_coprime_mask(qmax, bad)
    total = 0.0
    for q in range(1, qmax + 1):
        w = phi(q / Q)
        if w and sf[q] and ok[q]:
            total += lam1[q] * lam2[q] * w
    return total


def _lambda_vector(desc: CubicFieldDesc, qmax: int) -> np.ndarray:
    """lambda(q) for squarefree q <= qmax (garbage elsewhere), via a prime sieve."""
    lam = np.ones(qmax + 1, dtype=np.int64)
    for p in sieve_primes(qmax):
        if p in desc.bad_primes:
            continue
        lp = -1 + len(roots_mod_p(desc.f, p))
        lam[p::p] *= lp
    return lam


def _squarefree_coprime_mask(qmax: int, bad: set[int]) -> tuple[np.ndarray, np.ndarray]:
    sf = np.ones(qmax + 1, dtype=bool)
    for p in sieve_primes(isqrt(qmax)):
        sf[p * p::p * p] = False
    ok = np.ones(qmax + 1, dtype=bool)
    for p in bad:
        ok[p::p] = False
    sf[0] = ok[0] = False
    return sf, ok


# ---------------------------------------------------------------------------
# non-S3 sweep
# ---------------------------------------------------------------------------

def _sup_norms_batch(coords: np.ndarray) -> np.ndarray:
    """|alpha|_sup for an (N, 4) coordinate array."""
    out = None
    for k in (1, 3, 5, 7):
        z = np.exp(2j * np.pi * k / 8)
        vals = np.abs(coords[:, 0] + coords[:, 1] * z + coords[:, 2] * z ** 2
                      + coords[:, 3] * z ** 3)
        out = vals if out is None else np.maximum(out, vals)
    return out


def galois_count_sweep(Y: float) -> int:
    """#{alpha in O_K : |alpha|_sup < Y, Gal(f_alpha) != S3}, exactly.

    Degenerate (n3 = 0) and square-discriminant candidates are counted by a
    vectorized box scan filtered by |.|_sup < Y; reducible cubics are found
    by enumerating their rational roots -a/b (b | n3, a | n0 force
    |a|, b <= Y) and collecting the rank-3 solution lattices into a set, so
    multiple factorizations never double count.
    """
    if Y > GALOIS_SWEEP_YMAX:
        raise ValueError(f"sweep budget capped at Y <= {GALOIS_SWEEP_YMAX}")
    B = int(math.ceil(Y))
    # --- degenerate: n3 = 0 --------------------------------------------------
    degen = 0
    grid = np.arange(-B, B + 1)
    g0, g1, g2 = np.meshgrid(grid, grid, grid, indexing="ij")
    coords3 = np.stack([g0.ravel(), g1.ravel(), g2.ravel(),
                        np.zeros(g0.size, dtype=np.int64)], axis=1)
    degen = int(np.count_nonzero(_sup_norms_batch(coords3) < Y))

    # --- square discriminant among n3 != 0 (A3 plus some reducible) ----------
    sq_set: set[tuple] = set()
    for n3 in range(-B, B + 1):
        if n3 == 0:
            continue
        c0, c1, c2 = np.meshgrid(grid, grid, grid, indexing="ij")
        arr = np.stack([c0.ravel(), c1.ravel(), c2.ravel(),
                        np.full(c0.size, n3, dtype=np.int64)], axis=1)
        arr = arr[_sup_norms_batch(arr) < Y]
        a = arr[:, 3].astype(np.int64)  # x^3 coeff
        b = arr[:, 2].astype(np.int64)
        c = arr[:, 1].astype(np.int64)
        d = arr[:, 0].astype(np.int64)
        disc = (18 * a * b * c * d - 4 * b ** 3 * d + b ** 2 * c ** 2
                - 4 * a * c ** 3 - 27 * a ** 2 * d ** 2)
        nonneg = disc >= 0
        r = np.zeros_like(disc)
        r[nonneg] = np.sqrt(disc[nonneg].astype(np.float64)).astype(np.int64)
        issq = np.zeros_like(nonneg)
        for adj in (-1, 0, 1, 2):
            issq |= nonneg & ((r + adj) ** 2 == disc)
        for row in arr[issq]:
            sq_set.add(tuple(int(x) for x in row))

    # --- reducible (n3 != 0): factor as (b x + a)(m x^2 + w x + u) -----------
    # A cubic with rational root -a/b (lowest terms, b >= 1) factors over Z by
    # Gauss; coordinates are n3 = b m, n2 = a m + b w, n1 = a w + b u, n0 = a u,
    # so enumerating (a, b, m, w, u) with the box bounds |n_i| <= B catches
    # every reducible cubic at least once and the set dedupes repeats.
    red_set: set[tuple] = set()
    for b in range(1, B + 1):
        for a in range(-B, B + 1):
            if gcd(a, b) != 1:
                continue
            for m in range(-(B // b), B // b + 1):
                if m == 0:
                    continue
                wlo = int(math.floor((-B - a * m) / b))
                whi = int(math.ceil((B - a * m) / b))
                for w in range(wlo, whi + 1):
                    n2 = a * m + b * w
                    if abs(n2) > B:
                        continue
                    if a == 0:
                        ulo, uhi = -B, B
                    else:
                        ulo, uhi = -(B // abs(a)), B // abs(a)
                    for u in range(ulo, uhi + 1):
                        n1 = a * w + b * u
                        n0 = a * u
                        if abs(n1) > B or abs(n0) > B:
                            continue
                        n = (n0, n1, n2, b * m)
                        if abs(n[3]) <= B and n not in red_set:
                            if sup_norm(CycInt(*n)) < Y:
                                red_set.add(n)

    a3_reducible = sum(1 for t in sq_set if t in red_set)
    # A3 = square disc, irreducible, n3 != 0 (disc = 0 is always reducible)
    a3 = len(sq_set) - a3_reducible
    return degen + len(red_set) + a3
