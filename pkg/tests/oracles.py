"""Naive reference implementations used as test oracles.

Nothing here imports the package's relation or closure code: everything is
plain loops over python sets so the checks are independent.
"""

from __future__ import annotations

import itertools


def apply(alg, op, args):
    idx = 0
    for v in args:
        idx = idx * alg.size + v
    return op.table[idx]


def naive_closure(alg, seeds):
    """Pointwise closure of vectors (tuples) by repeating full passes until nothing changes."""
    closed = set(seeds)
    while True:
        new = set()
        for op in alg.ops:
            for args in itertools.product(sorted(closed), repeat=op.arity):
                width = len(next(iter(closed)))
                vec = tuple(apply(alg, op, [a[i] for a in args]) for i in range(width))
                if vec not in closed:
                    new.add(vec)
        if not new:
            return closed
        closed |= new


def naive_is_congruence(alg, part) -> bool:
    s = alg.size
    for op in alg.ops:
        for xs in itertools.product(range(s), repeat=op.arity):
            for ys in itertools.product(range(s), repeat=op.arity):
                if all(part[x] == part[y] for x, y in zip(xs, ys)):
                    if part[apply(alg, op, xs)] != part[apply(alg, op, ys)]:
                        return False
    return True


def set_partitions(n):
    """All partitions of range(n) as canonical block vectors, by brute force over label tuples."""
    out = set()
    for labels in itertools.product(range(n), repeat=n):
        seen = {}
        out.add(tuple(seen.setdefault(v, len(seen)) for v in labels))
    return sorted(out)


def brute_congruences(alg):
    return [p for p in set_partitions(alg.size) if naive_is_congruence(alg, p)]


def pairs_of(part):
    n = len(part)
    return {(x, y) for x in range(n) for y in range(n) if part[x] == part[y]}


def path_exists(s, factors, x, y) -> bool:
    """Is there x = u_0 R_1 u_1 R_2 ... R_k u_k = y?  ``factors`` are sets of pairs."""
    frontier = {x}
    for rel in factors:
        frontier = {v for u in frontier for v in range(s) if (u, v) in rel}
    return y in frontier


def naive_identity(s, alpha, beta, gamma, m, k, rhs_start="beta") -> bool:
    """alpha(beta o gamma ...) <= (alpha beta) o (alpha gamma) ... by explicit path search."""
    A, B, G = pairs_of(alpha), pairs_of(beta), pairs_of(gamma)
    lhs_f = [B if i % 2 == 0 else G for i in range(m)]
    ab, ag = A & B, A & G
    first, second = (ab, ag) if rhs_start == "beta" else (ag, ab)
    rhs_f = [first if i % 2 == 0 else second for i in range(k)]
    for x in range(s):
        for y in range(s):
            if (x, y) in A and path_exists(s, lhs_f, x, y) and not path_exists(s, rhs_f, x, y):
                return False
    return True


def alternating_chains(s, n, alpha, beta, gamma):
    """Every b_0 beta b_1 gamma ... b_n with b_0 alpha b_n (partitions as block vectors)."""
    def rec(seq):
        if len(seq) == n + 1:
            if alpha[seq[0]] == alpha[seq[-1]]:
                yield tuple(seq)
            return
        th = beta if (len(seq) - 1) % 2 == 0 else gamma
        for v in range(s):
            if th[seq[-1]] == th[v]:
                yield from rec(seq + [v])

    for a in range(s):
        yield from rec([a])
