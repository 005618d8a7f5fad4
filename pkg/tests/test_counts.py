import itertools

import numpy as np
import pytest

from qdl.counts import count_pairs, sp_vk
from qdl.cyclotomic import CycInt


def sp_vk_brute(v, p, k, M, b1, b2):
    """Literal triple character sum from the defining display."""
    pk = p ** k
    m = 0
    MM = M
    while MM % p == 0:
        m += 1
        MM //= p
    if k == 0:
        return p ** (-8.0 * m)
    eta = min(m, k)
    g = p ** eta
    total = 0j
    reps = list(itertools.product(range(pk // g), repeat=4))
    res1 = [CycInt(*[g * a + (b1.coords()[i] % g) for i, a in enumerate(t)]) for t in reps]
    res2 = [CycInt(*[g * a + (b2.coords()[i] % g) for i, a in enumerate(t)]) for t in reps]
    for B1 in res1:
        for B2 in res2:
            pr = B1 * B2
            ell = (pr.c3, pr.c2)
            for w in range(pk):
                u1 = (ell[0] - v[0] * w) % pk
                u2 = (ell[1] - v[1] * w) % pk
                # primitive-pair character sum over a (Ramanujan-type)
                s = pk * pk if (u1 == 0 and u2 == 0) else 0
                if u1 % p ** (k - 1) == 0 and u2 % p ** (k - 1) == 0:
                    s -= p ** (2 * (k - 1))
                total += s
    return total / p ** (9 * k + 8 * max(0, m - k))


@pytest.mark.parametrize("v,p,k", [((1, 0), 2, 1), ((1, 1), 2, 1), ((0, 1), 3, 1),
                                   ((1, 2), 3, 1), ((2, 2), 2, 2), ((1, 0), 2, 2)])
def test_sp_vk_matches_brute_m1(v, p, k):
    want = sp_vk_brute(v, p, k, 1, CycInt(0), CycInt(0))
    got = sp_vk(v, p, k, 1, CycInt(0), CycInt(0))
    assert abs(want - got) < 1e-9


@pytest.mark.parametrize("v,p,k", [((1, 0), 2, 1), ((1, 1), 2, 2), ((3, 1), 2, 2)])
def test_sp_vk_matches_brute_m2(v, p, k):
    b = CycInt(1, 0, 0, 0)
    want = sp_vk_brute(v, p, k, 2, b, b)
    got = sp_vk(v, p, k, 2, b, b)
    assert abs(want - got) < 1e-9


def test_sp_vk_tail_bound_shape():
    # |S_p(v;k)| <= C (k+1) (v1^4+v2^4, p^k) p^(-3k) on a sweep
    import math

    worst = 0.0
    for p in (2, 3, 5):
        for v in ((1, 0), (1, 1), (2, 1), (p, p)):
            for k in (1, 2, 3):
                val = abs(sp_vk(v, p, k, 1, CycInt(0), CycInt(0)))
                bound = (k + 1) * math.gcd(v[0] ** 4 + v[1] ** 4, p ** k) / p ** (3 * k)
                worst = max(worst, val / bound)
    assert worst <= 8.0, worst


def test_count_pairs_exhaustive():
    """count_pairs against literal pair enumeration for composite moduli and
    both the full and a twisted target subgroup."""
    for (n, M, b1, b2) in ((6, 1, (0,) * 4, (0,) * 4),
                           (4, 2, (1, 0, 0, 0), (1, 0, 0, 0)),
                           (12, 2, (1, 0, 0, 0), (1, 0, 0, 0))):
        import math

        B1, B2 = CycInt(*b1), CycInt(*b2)

        def rows_zero(p, e):
            return []

        got = count_pairs(n, M, B1, B2, rows_zero)
        count = 0
        g = math.gcd(n, M)
        for c1 in itertools.product(range(n), repeat=4):
            if any((x - b) % g for x, b in zip(c1, b1)):
                continue
            A = CycInt(*c1)
            for c2 in itertools.product(range(n), repeat=4):
                if any((x - b) % g for x, b in zip(c2, b2)):
                    continue
                pr = A * CycInt(*c2)
                if pr.c3 % n == 0 and pr.c2 % n == 0:
                    count += 1
        assert got == count, (n, M, got, count)


def test_count_pairs_sublattice_target():
    # target subgroup L = Z*(1,1) + nZ^2: l(b1 b2) = w*(1,1) mod n
    n = 5
    count = 0
    for c1 in itertools.product(range(n), repeat=4):
        A = CycInt(*c1)
        for c2 in itertools.product(range(n), repeat=4):
            pr = A * CycInt(*c2)
            if (pr.c3 - pr.c2) % n == 0:
                count += 1
    got = count_pairs(n, 1, CycInt(0), CycInt(0), lambda p, e: [[1, 1]])
    assert got == count
