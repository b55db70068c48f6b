#!/usr/bin/env python3
"""Generate the nested Gauss-Hermite (Genz-Keister) quadrature tables.

Builds the Patterson-style extension chain 1 -> 3 -> 9 -> 19 -> 35 for the
standard normal weight, plus the truncated intermediate rules (7, 17, 31, 33
nodes) obtained by dropping outermost node pairs and re-solving the
interpolatory weights.  Everything is done in 120-digit arithmetic; the end
of the script prints Rust source for the node/weight tables together with a
moment cross-check and the Smolyak point-count tables for dimensions 1, 2, 4.

Usage: python3 tools/gen_gk_tables.py > /tmp/gk_report.txt
"""

import mpmath as mp
from itertools import product

mp.mp.dps = 120


def normal_moment(k):
    """E[X^k] for X ~ N(0,1): 0 for odd k, (k-1)!! for even k."""
    if k % 2 == 1:
        return mp.mpf(0)
    m = mp.mpf(1)
    for j in range(1, k, 2):
        m *= j
    return m


MOMENTS = [normal_moment(k) for k in range(200)]


def poly_mul(a, b):
    out = [mp.mpf(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def poly_from_roots(roots):
    p = [mp.mpf(1)]
    for r in roots:
        p = poly_mul(p, [-r, mp.mpf(1)])
    return p


def integrate_poly(p):
    """integral of p(x) * phi(x) dx."""
    return mp.fsum(c * MOMENTS[k] for k, c in enumerate(p) if c != 0)


def extend(nodes, n_new):
    """Patterson extension: add n_new nodes to symmetric node set `nodes`.

    Finds even monic G of degree n_new with int phi * P * G * x^j = 0 for
    j = 0..n_new-1, where P has the existing nodes as roots.  Returns the
    new nodes (symmetric pairs) as a sorted list.
    """
    assert n_new % 2 == 0
    P = poly_from_roots(nodes)
    half = n_new // 2
    # G(x) = sum_{i=0}^{half} g_i x^(2i), g_half = 1.
    # Nontrivial orthogonality conditions are the ones with odd j
    # (P is odd: the existing sets all contain 0 and are symmetric).
    assert len(nodes) % 2 == 1
    rows = [j for j in range(n_new) if (j % 2) == 1]
    assert len(rows) == half
    A = mp.matrix(half, half)
    b = mp.matrix(half, 1)
    for r, j in enumerate(rows):
        xj = [mp.mpf(0)] * j + [mp.mpf(1)]
        Pxj = poly_mul(P, xj)
        for i in range(half):
            mono = [mp.mpf(0)] * (2 * i) + [mp.mpf(1)]
            A[r, i] = integrate_poly(poly_mul(Pxj, mono))
        mono = [mp.mpf(0)] * (2 * half) + [mp.mpf(1)]
        b[r] = -integrate_poly(poly_mul(Pxj, mono))
    g = mp.lu_solve(A, b)
    coeffs_y = [g[i] for i in range(half)] + [mp.mpf(1)]  # in y = x^2
    roots_y = mp.polyroots(list(reversed(coeffs_y)), maxsteps=200, extraprec=200)
    new = []
    for ry in roots_y:
        assert abs(mp.im(ry)) < mp.mpf(10) ** (-60), f"complex root {ry}"
        ry = mp.re(ry)
        assert ry > 0, f"nonpositive squared root {ry}"
        x = mp.sqrt(ry)
        new.extend([-x, x])
    return sorted(new)


def solve_weights(nodes):
    """Interpolatory weights: match moments 0..len(nodes)-1."""
    n = len(nodes)
    A = mp.matrix(n, n)
    b = mp.matrix(n, 1)
    for j in range(n):
        for i, x in enumerate(nodes):
            A[j, i] = x ** j
        b[j] = MOMENTS[j]
    return mp.lu_solve(A, b)


def exact_degree(nodes, weights, dmax=80):
    d = -1
    for k in range(dmax + 1):
        approx = mp.fsum(w * x ** k for x, w in zip(nodes, weights))
        exact = MOMENTS[k]
        scale = max(mp.mpf(1), abs(exact))
        if abs(approx - exact) / scale > mp.mpf(10) ** (-70):
            break
        d = k
    return d


# --- build the chain ---------------------------------------------------
chain = {}
X = [mp.mpf(0)]
chain[1] = X
for add in (2, 6, 10, 16):
    new = extend(X, add)
    X = sorted(X + new)
    chain[len(X)] = X

# truncated intermediates: drop outermost pairs, keep symmetry
def drop_outer(nodes, pairs):
    return nodes[pairs:len(nodes) - pairs]

chain[7] = drop_outer(chain[9], 1)
chain[17] = drop_outer(chain[19], 1)
chain[31] = drop_outer(chain[35], 2)
chain[33] = drop_outer(chain[35], 1)

sizes = [1, 3, 7, 9, 17, 19, 31, 33, 35]
rules = {}
for m in sizes:
    nodes = chain[m]
    w = solve_weights(nodes)
    rules[m] = (nodes, [w[i] for i in range(m)])

# --- checks ------------------------------------------------------------
print("== rule summary ==")
master = chain[35]


def node_key(x):
    return mp.nstr(x, 40)


master_keys = {node_key(x) for x in master}
prev_set = None
degrees = {}
for m in sizes:
    nodes, w = rules[m]
    deg = exact_degree(nodes, w)
    degrees[m] = deg
    wsum = mp.fsum(w)
    wmin = min(abs(x) for x in w)
    neg = sum(1 for x in w if x < 0)
    nested = all(node_key(x) in master_keys for x in nodes)
    subset_prev = prev_set is None or all(node_key(x) in prev_set for x in nodes if False)
    print(f"m={m:3d} degree={deg:3d} sum(w)-1={mp.nstr(wsum - 1, 3)} "
          f"min|w|={mp.nstr(wmin, 3)} negative_w={neg} in_master={nested} "
          f"max|x|={mp.nstr(nodes[-1], 8)}")
    prev_set = {node_key(x) for x in nodes}

print("\nnesting along the level chain:")
for lo, hi in zip(sizes[:-1], sizes[1:]):
    lo_keys = {node_key(x) for x in chain[lo]}
    hi_keys = {node_key(x) for x in chain[hi]}
    print(f"  S{lo} subset of S{hi}: {lo_keys <= hi_keys}")

# --- delayed level map --------------------------------------------------
LMAX = 25
level_rule = []
for a in range(1, LMAX + 1):
    want = 2 * a - 1
    for m in sizes:
        if degrees[m] >= want:
            level_rule.append(m)
            break
    else:
        raise SystemExit(f"no rule of degree >= {want}")
print("\nlevel -> rule size:", level_rule)

# --- smolyak point counts ----------------------------------------------
# level_of(x): smallest level whose rule contains x.  new(a) counts nodes
# appearing first at level a.
new_at = []
seen = 0
for a in range(1, LMAX + 1):
    m = level_rule[a - 1]
    new_at.append(m - seen)
    seen = m

def count(dim, k):
    total = 0
    def rec(d, budget, acc):
        nonlocal total
        if d == 0:
            total += acc
            return
        for a in range(1, budget - (d - 1) + 1):
            na = new_at[a - 1]
            if na:
                rec(d - 1, budget - a, acc * na)
    rec(dim, k + dim - 1, 1)
    return total

for dim in (1, 2, 4):
    print(f"\ndim {dim}: level -> points")
    for k in range(1, LMAX + 1):
        print(f"  k={k:2d}  i={count(dim, k)}")

# --- f64-level smolyak weight audit (dim 2 and 4, selected levels) ------
import math


def f64(x):
    return float(mp.nstr(x, 25))


rules64 = {m: ([f64(x) for x in rules[m][0]], [f64(w) for w in rules[m][1]])
           for m in sizes}


def smolyak(dim, k):
    q = dim + k - 1
    pts = {}
    def comb(n, r):
        return math.comb(n, r)
    def rec(d, rem, idx):
        if d == 1:
            for a in range(1, rem + 1):
                yield from ((idx + (a,),) )
            return
    # enumerate multi-indices with q-dim+1 <= |i| <= q
    def multi(d, lo, hi):
        if d == 1:
            for a in range(max(1, lo), hi + 1):
                yield (a,)
            return
        for a in range(1, hi - (d - 1) + 1):
            for rest in multi(d - 1, lo - a, hi - a):
                yield (a,) + rest
    for mi in multi(dim, q - dim + 1, q):
        s = sum(mi)
        coef = (-1) ** (q - s) * comb(dim - 1, q - s)
        grids = [rules64[level_rule[a - 1]] for a in mi]
        for combo in product(*[range(len(g[0])) for g in grids]):
            key = tuple(grids[d][0][combo[d]] for d in range(dim))
            w = coef
            for d in range(dim):
                w *= grids[d][1][combo[d]]
            pts[key] = pts.get(key, 0.0) + w
    return pts


for dim, ks in ((2, (5, 14, 25)), (4, (5, 8, 9, 10, 11, 12))):
    for k in ks:
        pts = smolyak(dim, k)
        ws = sorted(abs(w) for w in pts.values())
        n_tiny = sum(1 for w in ws if w < 1e-15)
        print(f"dim={dim} k={k}: merged={len(pts)} sum(w)-1={sum(pts.values())-1:.3e} "
              f"min|w|={ws[0]:.3e} tiny(<1e-15)={n_tiny}")

# --- emit rust tables ---------------------------------------------------
print("\n== rust tables ==")
print("// positive half (including zero) of each nested rule;")
print("// nodes are listed in increasing order.")
for m in sizes:
    nodes, w = rules[m]
    half = [(x, wi) for x, wi in zip(nodes, w) if x >= 0]
    print(f"\npub(crate) const GK{m:02d}: [(f64, f64); {len(half)}] = [")
    for x, wi in half:
        print(f"    ({mp.nstr(x, 30)}, {mp.nstr(wi, 30)}),")
    print("];")
