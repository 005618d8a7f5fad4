"""Complete exponential sums S1, S2 over (O_K/q)^2 and their zero frequencies.

Both sums are defined by congruence-constrained character sums

    S1(a1, a2; q)       = q^-3 * sum over beta1, beta2 mod q with
                          ell(beta1 beta2) = 0 (q/(q,M)), beta_i = beta_i' ((q,M))
                          of e(<a1 beta1 + a2 beta2, 1>/q)
    S2(a1, a2, c; d, q) = (dq)^-3 * sum over beta1, beta2 mod dq with
                          ell = 0 (d), det(c, ell) = 0 (dq/(q,M)),
                          beta_i = beta_i' ((dq,M)), same phase mod dq

The brute evaluators enumerate residue pairs literally (vectorized, with the
phase accumulated as integer counts per rational phase class, so the only
floating-point step is one evaluation of a count vector against roots of
unity).  The fast evaluators detect the ell/det congruences with additive
characters, execute the beta2 sum, and reduce each remaining term to an exact
character sum over a beta1 coset computed by integer linear algebra mod q.

The zero-frequency normalizations use the full-modulus convention

    N1~(q) = q^-6 #{beta pairs: ell(beta1 beta2) = 0 (q), beta_i = beta_i' ((q,M))}

(the one whose p^k values match N1~(p^m) = p^-6m * [ell compatibility]); the
Moebius-differenced coefficients in the singular-series module use the
reduced-modulus variant, which is the one entering the S-hat identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd

import numpy as np

from .counts import beta_coset_char_sum, count_pairs
from .cyclotomic import CycInt, CycRes, Vec2Int
from .residues import factorize, is_prime as is_prime_fast

# enumeration budgets; configuration constants, not hard limits of the method
S1_BRUTE_QMAX = 9
S1_FAST_QMAX = 10_000
S2_BRUTE_DQMAX = 6
S2_FAST_DQMAX = 200


class BudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class CongruenceData:
    """Congruence datum (M, beta1', beta2') for the finite weight Phi^f."""

    M: int
    beta1p: CycRes
    beta2p: CycRes
    strict: bool = False

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if self.beta1p.q != self.M or self.beta2p.q != self.M:
            raise ValueError("beta' residues must live mod M")
        if self.strict and not self.compatible():
            raise ValueError("ell(beta1' * beta2') != 0 mod M")

    def compatible(self) -> bool:
        prod = self.beta1p.lift() * self.beta2p.lift()
        l1, l2 = prod.c3, prod.c2
        return l1 % self.M == 0 and l2 % self.M == 0

    @staticmethod
    def trivial() -> "CongruenceData":
        return CongruenceData(1, CycRes((0, 0, 0, 0), 1), CycRes((0, 0, 0, 0), 1))


@dataclass(frozen=True)
class ExpSumValue:
    value: complex
    modulus: int
    normalization: str


def _phase_value(counts: dict[int, int], q: int) -> complex:
    return sum(c * np.exp(2j * np.pi * (r % q) / q) for r, c in counts.items())


# ---------------------------------------------------------------------------
# brute force
# ---------------------------------------------------------------------------

@lru_cache(maxsize=32)
def _residue_block(q: int, g: int, b_coords: tuple[int, int, int, int]) -> np.ndarray:
    """All beta mod q with beta = b (mod g), as an (N, 4) int array."""
    step = q // g
    axes = [np.arange(step) * g + (b_coords[i] % g) for i in range(4)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 4)
    return grid % q


def _mult_rows() -> np.ndarray:
    # rows r such that coords(a*b) = sum_j M(a) b_j; built from structure consts
    # (a*b)_k = sum_{i+j=k} a_i b_j - sum_{i+j=k+4} a_i b_j
    out = np.zeros((4, 4, 4), dtype=np.int64)
    for i in range(4):
        for j in range(4):
            k = i + j
            if k < 4:
                out[k, i, j] += 1
            else:
                out[k - 4, i, j] -= 1
    return out


_STRUCT = _mult_rows()


def _pair_phase_counts(q: int, adm1: np.ndarray, adm2: np.ndarray,
                       idx1: np.ndarray, idx2: np.ndarray,
                       a1: CycInt, a2: CycInt) -> dict[int, int]:
    """Integer counts of e(r/q) phases over an admissible index-pair list."""
    u = _trace_phase_vec(q, adm1, a1)
    w = _trace_phase_vec(q, adm2, a2)
    tot = (u[idx1] + w[idx2]) % q
    binc = np.bincount(tot, minlength=q)
    return {int(r): int(c) for r, c in enumerate(binc) if c}


def _trace_phase_vec(q: int, betas: np.ndarray, a: CycInt) -> np.ndarray:
    """<a * beta, 1> mod q for each beta row."""
    row = np.array([sum(_STRUCT[3, i, j] * a.coords()[i] for i in range(4))
                    for j in range(4)], dtype=np.int64)
    return (betas @ row) % q


@lru_cache(maxsize=16)
def _admissible_pairs_s1(q: int, g: int, b1c, b2c) -> tuple:
    qp = q // g
    adm1 = _residue_block(q, g, b1c)
    adm2 = _residue_block(q, g, b2c)
    idx1_all, idx2_all = [], []
    for i, b1 in enumerate(adm1):
        # coords of b1 * beta2 for all beta2 at once: ell components are rows 3, 2
        c3 = _ell_components(b1, adm2, 3) % qp
        c2 = _ell_components(b1, adm2, 2) % qp
        ok = np.nonzero((c3 == 0) & (c2 == 0))[0]
        idx1_all.append(np.full(len(ok), i, dtype=np.int64))
        idx2_all.append(ok)
    return adm1, adm2, np.concatenate(idx1_all), np.concatenate(idx2_all)


def _ell_components(b1: np.ndarray, betas: np.ndarray, k: int) -> np.ndarray:
    coefs = np.array([sum(int(_STRUCT[k, i, j]) * int(b1[i]) for i in range(4))
                      for j in range(4)], dtype=np.int64)
    return betas @ coefs


def s1_brute(a1: CycInt, a2: CycInt, q: int, cong: CongruenceData) -> ExpSumValue:
    """S1 by direct enumeration of residue pairs (the oracle)."""
    if q > S1_BRUTE_QMAX:
        raise BudgetExceeded(f"brute-force S1 capped at q <= {S1_BRUTE_QMAX}")
    g = gcd(q, cong.M)
    adm1, adm2, idx1, idx2 = _admissible_pairs_s1(
        q, g, tuple(c % g for c in cong.beta1p.coords),
        tuple(c % g for c in cong.beta2p.coords))
    counts = _pair_phase_counts(q, adm1, adm2, idx1, idx2, a1, a2)
    return ExpSumValue(_phase_value(counts, q) / q ** 3, q, "q^-3")


def s2_brute(a1: CycInt, a2: CycInt, c: Vec2Int, d: int, q: int,
             cong: CongruenceData) -> ExpSumValue:
    """S2 by direct enumeration of residue pairs mod dq (the oracle)."""
    if gcd(c[0], c[1]) != 1:
        raise ValueError("c must be primitive")
    if d * q > S2_BRUTE_DQMAX:
        raise BudgetExceeded(f"brute-force S2 capped at dq <= {S2_BRUTE_DQMAX}")
    n = d * q
    g = gcd(n, cong.M)
    Q0 = n // gcd(q, cong.M)
    adm1 = _residue_block(n, g, tuple(cong.beta1p.coords))
    adm2 = _residue_block(n, g, tuple(cong.beta2p.coords))
    idx1_all, idx2_all = [], []
    for i, b1 in enumerate(adm1):
        l1 = _ell_components(b1, adm2, 3)
        l2 = _ell_components(b1, adm2, 2)
        ok = np.nonzero((l1 % d == 0) & (l2 % d == 0)
                        & ((c[0] * l2 - c[1] * l1) % Q0 == 0))[0]
        idx1_all.append(np.full(len(ok), i, dtype=np.int64))
        idx2_all.append(ok)
    counts = _pair_phase_counts(n, adm1, adm2,
                                np.concatenate(idx1_all), np.concatenate(idx2_all),
                                a1, a2)
    return ExpSumValue(_phase_value(counts, n) / (d ** 3 * q ** 3), n, "d^-3 q^-3")


# ---------------------------------------------------------------------------
# fast evaluators
# ---------------------------------------------------------------------------

def _s1_prime_coprime(a1: CycInt, a2: CycInt, p: int) -> complex:
    """S1(a1, a2; p) for p prime with M = 1, vectorized over (x, y).

    For lambda = x + y*zeta invertible mod p the beta1 solution is unique and
    the phase is -<a1 a2 lambda*, 1> / (x^4 + y^4) mod p, a closed form in
    the coordinates of a1*a2; only the O(p) pairs with p | x^4 + y^4 need the
    generic character-sum solver.
    """
    w = (a1 * a2).coords()
    xs, ys = np.meshgrid(np.arange(p, dtype=np.int64), np.arange(p, dtype=np.int64),
                         indexing="ij")
    xs, ys = xs.ravel(), ys.ravel()
    nval = (xs ** 2 % p) ** 2 % p
    nval = (nval + (ys ** 2 % p) ** 2) % p
    inv = np.zeros(p, dtype=np.int64)
    if p > 1:
        inv[1:] = np.vectorize(lambda t: pow(int(t), -1, p))(np.arange(1, p))
    # T = x^3 w3 - x^2 y w2 + x y^2 w1 - y^3 w0 (coordinates of a1*a2)
    x2, y2 = xs * xs % p, ys * ys % p
    T = (x2 * xs % p * (w[3] % p) - x2 * ys % p * (w[2] % p)
         + xs * y2 % p * (w[1] % p) - y2 * ys % p * (w[0] % p)) % p
    unit = nval != 0
    r = (-T[unit] * inv[nval[unit]]) % p
    counts = np.bincount(r, minlength=p).astype(np.int64)
    total = sum(int(c) * np.exp(2j * np.pi * k / p) for k, c in enumerate(counts) if c)
    # singular lambdas via the generic path
    zero = CycInt(0)
    for i in np.nonzero(~unit)[0]:
        lam = CycInt(int(xs[i]), int(ys[i]), 0, 0)
        cnt, rr = beta_coset_char_sum(p, 1, p, lam, -a2, zero, a1 + lam * zero)
        if cnt:
            total += cnt * np.exp(2j * np.pi * rr / p)
    return total * p ** 2 / p ** 3


def s1_fast(a1: CycInt, a2: CycInt, q: int, cong: CongruenceData) -> ExpSumValue:
    """S1 via the x, y parametrization and exact beta1-coset character sums.

    Detecting ell(beta1 beta2) = 0 (q') with characters and summing beta2
    leaves, for each (x, y) mod q' = q/(q,M),

        q'^2/q^3 * psi_q(a2 b2') * sum over {beta = b1' (g),
             g(x + y z) beta = -a2 (q')} of e(<(a1 + g(x+yz) b2') beta, 1>/q).
    """
    if q > S1_FAST_QMAX:
        raise BudgetExceeded(f"fast S1 capped at q <= {S1_FAST_QMAX}")
    g = gcd(q, cong.M)
    qp = q // g
    if g == 1 and q > 2 and is_prime_fast(q):
        return ExpSumValue(_s1_prime_coprime(a1, a2, q), q, "q^-3")
    b1 = CycInt(*(x % g for x in cong.beta1p.coords))
    b2 = CycInt(*(x % g for x in cong.beta2p.coords))
    base_r = (a2 * b2).c3  # <a2 b2', 1>
    counts: dict[int, int] = {}
    for x in range(qp):
        for y in range(qp):
            lam = CycInt(g * x, g * y, 0, 0)
            cnt, r = beta_coset_char_sum(q, g, qp, lam, -a2, b1, a1 + lam * b2)
            if cnt:
                rr = (r + base_r) % q
                counts[rr] = counts.get(rr, 0) + cnt
    val = _phase_value(counts, q) * qp ** 2 / q ** 3
    return ExpSumValue(val, q, "q^-3")


def s2_fast(a1: CycInt, a2: CycInt, c: Vec2Int, d: int, q: int,
            cong: CongruenceData) -> ExpSumValue:
    """S2 via the x, y, z parametrization (gamma_c multiplier) and exact
    beta1-coset character sums mod dq."""
    if gcd(c[0], c[1]) != 1:
        raise ValueError("c must be primitive")
    n = d * q
    if n > S2_FAST_DQMAX:
        raise BudgetExceeded(f"fast S2 capped at dq <= {S2_FAST_DQMAX}")
    g2 = gcd(n, cong.M)
    gq = gcd(q, cong.M)
    Q0 = n // gq
    npr = n // g2
    b1 = CycInt(*(x % g2 for x in cong.beta1p.coords))
    b2 = CycInt(*(x % g2 for x in cong.beta2p.coords))
    base_r = (a2 * b2).c3
    counts: dict[int, int] = {}
    cyc_c = CycInt(-c[1], c[0], 0, 0)  # c1*zeta - c2; det(c, ell(a)) = <a, c1 z - c2>
    for x0 in range(Q0):
        for x1 in range(d):
            for y1 in range(d):
                gam = gq * x0 * cyc_c + q * CycInt(x1, y1, 0, 0)
                cnt, r = beta_coset_char_sum(n, g2, npr, gam, -a2, b1, a1 + gam * b2)
                if cnt:
                    rr = (r + base_r) % n
                    counts[rr] = counts.get(rr, 0) + cnt
    val = _phase_value(counts, n) * npr ** 4 / (d ** 3 * q ** 3 * d * d * Q0)
    return ExpSumValue(val, n, "d^-3 q^-3")


# ---------------------------------------------------------------------------
# zero frequencies
# ---------------------------------------------------------------------------

def n1_tilde(q: int, cong: CongruenceData, ell_modulus: str = "full") -> float:
    """N1~(q): normalized count of pairs at the zero frequency.

    ell_modulus selects the congruence ell(beta1 beta2) = 0 mod q ("full",
    the convention of the zero-frequency bounds) or mod q/(q,M) ("reduced",
    the convention entering the Moebius coefficients N1*).
    """
    if ell_modulus not in ("full", "reduced"):
        raise ValueError("ell_modulus must be 'full' or 'reduced'")

    def rows(p, e):
        if ell_modulus == "full":
            return []
        m = min(e, _vp(cong.M, p))
        s = p ** (e - m)
        return [[s, 0], [0, s]]

    cnt = count_pairs(q, cong.M, cong.beta1p.lift(), cong.beta2p.lift(), rows)
    return cnt / q ** 6


def n2_tilde(c: Vec2Int, d: int, q: int, cong: CongruenceData) -> float:
    """N2~(c, d; q) = (d^3 q^4)^-1 S2(0,0; d,q), computed as an exact count."""
    if gcd(c[0], c[1]) != 1:
        raise ValueError("c must be primitive")
    n = d * q
    mq = cong.M

    def rows(p, e):
        h = min(_vp(d, p), e)
        v0 = _vp(d, p) + _vp(q, p) - min(_vp(q, p), _vp(mq, p))
        v0 = min(v0, e)
        return [[p ** h * c[0], p ** h * c[1]],
                [p ** v0, 0], [0, p ** v0]]

    cnt = count_pairs(n, cong.M, cong.beta1p.lift(), cong.beta2p.lift(), rows)
    return cnt / (d ** 6 * q ** 7)


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        v += 1
        n //= p
    return v


def a_alpha(alpha: CycInt, p: int) -> int:
    """Main term of the prime-modulus S1 evaluation:
    -1 - [p | <alpha,1>] + #{x mod p : f_alpha(x) = 0 (p)}."""
    from .residues import IntPoly, is_prime, roots_mod_p

    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    n0, n1, n2, n3 = alpha.coords()
    if all(x % p == 0 for x in (n0, n1, n2, n3)):
        nroots = p
    else:
        nroots = len(roots_mod_p(IntPoly(n0, n1, n2, n3), p))
    return -1 - (1 if alpha.c3 % p == 0 else 0) + nroots


def s2_bound_rhs(a1: CycInt, a2: CycInt, c: Vec2Int, d: int, q: int,
                 cong: CongruenceData) -> float:
    """Right side of the S2 upper bound (the M-dependent display), with the
    implicit constant set to 1 and the o(1) exponent set to 0.

    Only used for ratio monitoring; the (x, y, z) sum is enumerated literally.
    """
    if gcd(c[0], c[1]) != 1:
        raise ValueError("c must be primitive")
    n = d * q
    if n > 60:
        raise BudgetExceeded("s2_bound_rhs enumeration capped at dq <= 60")
    M = cong.M
    alpha = a1 * a2
    Nalpha = _norm(alpha)
    gq = gcd(q, M)
    cyc_c = CycInt(c[1], -c[0], 0, 0)  # c2 - c1*zeta as in gamma_c
    from .cyclotomic import conj_star

    # the (x, y, z, r) sum does not depend on the divisor tuple; do it once
    divs_n = _divisors(n)
    inner = 0.0
    for x in range(n):
        for y in range(n):
            for z in range(n):
                gam = gq * x * cyc_c + q * CycInt(y, z, 0, 0)
                yv = 0 if gam.is_zero() else (alpha * conj_star(gam)).c3
                for r in divs_n:
                    if (M * yv) % (n // r) == 0:
                        inner += 1.0 / r

    total = 0.0
    divs_d = _divisors(d)
    divs_q = _divisors(q)
    for gp in divs_d:
        for hp in divs_d:
            if d % (gp * hp) != 0:
                continue
            for gpp in divs_q:
                for hpp in divs_q:
                    if q % (gpp * hpp) != 0:
                        continue
                    gg, hh = gp * gpp, hp * hpp
                    if not (M * alpha).scalar_divisible(gg):
                        continue
                    t = M ** 2 * Nalpha
                    if t % gg ** 8 != 0 or (t // gg ** 8) % (hh * hh) != 0:
                        continue
                    total += gg ** 4 * hh / n ** 2 * inner
    return total


def oracle_sweep(qmax: int = 8, Ms: tuple[int, ...] = (1, 2, 3), n_inputs: int = 50,
                 seed: int = 0) -> list[tuple]:
    """Brute-vs-fast S1 sweep rows: (q, M, input_hash, brute, fast, abs_diff).

    The rows serialize to the TSV report; the max |diff| is the headline
    statistic of the oracle-equivalence criterion.
    """
    import hashlib

    rng = np.random.default_rng(seed)
    rows = []
    for q in range(1, qmax + 1):
        for M in Ms:
            cong = (CongruenceData.trivial() if M == 1 else
                    CongruenceData(M, CycRes((1, 0, 0, 0), M), CycRes((1, 0, 0, 0), M)))
            for _ in range(n_inputs):
                a1 = CycInt(*[int(x) for x in rng.integers(-8, 9, 4)])
                a2 = CycInt(*[int(x) for x in rng.integers(-8, 9, 4)])
                h = hashlib.sha256(repr((a1.coords(), a2.coords())).encode()).hexdigest()[:12]
                vb = s1_brute(a1, a2, q, cong).value
                vf = s1_fast(a1, a2, q, cong).value
                rows.append((q, M, h, complex(vb), complex(vf), abs(vb - vf)))
    return rows


def _norm(a: CycInt) -> int:
    from .cyclotomic import norm

    return norm(a)


def _divisors(n: int) -> list[int]:
    out = [1]
    for p, e in factorize(n).items():
        out = [d * p ** i for d in out for i in range(e + 1)]
    return sorted(out)
