"""Binary relations as dense boolean matrices, and congruences as partitions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import FiniteAlgebra
from .errors import ResourceLimit, SizeMismatch

DEFAULT_CONGRUENCE_CAP = 100_000


class BinRel:
    """A relation on ``range(size)``; ``bits[x, y]`` is true iff ``(x, y)`` is in it."""

    __slots__ = ("bits",)

    def __init__(self, bits):
        bits = np.array(bits, dtype=bool)
        if bits.ndim != 2 or bits.shape[0] != bits.shape[1]:
            raise ValueError("relation matrix must be square")
        bits.setflags(write=False)
        self.bits = bits

    @property
    def size(self) -> int:
        return self.bits.shape[0]

    @classmethod
    def from_pairs(cls, size: int, pairs) -> "BinRel":
        bits = np.zeros((size, size), dtype=bool)
        for x, y in pairs:
            bits[x, y] = True
        return cls(bits)

    @classmethod
    def identity(cls, size: int) -> "BinRel":
        return cls(np.eye(size, dtype=bool))

    @classmethod
    def full(cls, size: int) -> "BinRel":
        return cls(np.ones((size, size), dtype=bool))

    def pairs(self) -> list[tuple[int, int]]:
        return [(int(x), int(y)) for x, y in np.argwhere(self.bits)]

    def __contains__(self, pair) -> bool:
        return bool(self.bits[pair[0], pair[1]])

    def __eq__(self, other) -> bool:
        return isinstance(other, BinRel) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.tobytes())

    def __le__(self, other: "BinRel") -> bool:
        _same_size(self, other)
        return not bool((self.bits & ~other.bits).any())

    def __len__(self):
        return int(self.bits.sum())

    def __repr__(self):
        return f"BinRel({self.pairs()})"


def _same_size(r: BinRel, s: BinRel) -> None:
    if r.size != s.size:
        raise SizeMismatch(f"relations on {r.size} and {s.size} elements")


def compose(r: BinRel, s: BinRel) -> BinRel:
    """``(x, z)`` such that ``x r y s z`` for some ``y``."""
    _same_size(r, s)
    prod = r.bits.astype(np.int64) @ s.bits.astype(np.int64)
    return BinRel(prod > 0)


def intersect(r: BinRel, s: BinRel) -> BinRel:
    _same_size(r, s)
    return BinRel(r.bits & s.bits)


def converse(r: BinRel) -> BinRel:
    return BinRel(r.bits.T)


def alt_compose(rho: BinRel, sigma: BinRel, k: int) -> BinRel:
    """``rho o sigma o rho o ...`` with exactly ``k`` factors."""
    if k < 1:
        raise ValueError("k must be positive")
    _same_size(rho, sigma)
    out = rho
    for i in range(1, k):
        out = compose(out, sigma if i % 2 else rho)
    return out


def alt_chain(rho: BinRel, sigma: BinRel, k_max: int) -> list[BinRel]:
    """``[alt_compose(rho, sigma, k) for k in 1..k_max]`` computed incrementally."""
    out = [rho]
    for i in range(1, k_max):
        out.append(compose(out[-1], sigma if i % 2 else rho))
    return out


# ---------------------------------------------------------------------------
# Congruences
# ---------------------------------------------------------------------------


def canonical_blocks(labels) -> tuple[int, ...]:
    """Renumber block labels by first occurrence."""
    seen: dict = {}
    return tuple(seen.setdefault(v, len(seen)) for v in labels)


@dataclass(frozen=True)
class Congruence:
    """Equivalence relation given by a block index per element (canonical numbering)."""

    partition: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "partition", canonical_blocks(self.partition))

    @property
    def size(self) -> int:
        return len(self.partition)

    @cached_property
    def rel(self) -> BinRel:
        p = np.asarray(self.partition)
        return BinRel(p[:, None] == p[None, :])

    def related(self, x: int, y: int) -> bool:
        return self.partition[x] == self.partition[y]

    def blocks(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for x, b in enumerate(self.partition):
            out.setdefault(b, []).append(x)
        return list(out.values())

    @classmethod
    def bottom(cls, size: int) -> "Congruence":
        return cls(tuple(range(size)))

    @classmethod
    def top(cls, size: int) -> "Congruence":
        return cls((0,) * size)

    @classmethod
    def parse(cls, text: str) -> "Congruence":
        """Block-index vector such as ``"0 0 1"`` (commas also accepted)."""
        parts = text.replace(",", " ").split()
        return cls(tuple(int(p) for p in parts))

    def __str__(self):
        return " ".join(str(b) for b in self.partition)

    def __le__(self, other: "Congruence") -> bool:
        return self.rel <= other.rel


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x, y) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if ry < rx:
            rx, ry = ry, rx
        self.parent[ry] = rx
        return True


def _translations(alg: FiniteAlgebra):
    """Yield ``(table, position, other-args)`` for every basic translation."""
    for op in alg.ops:
        if op.arity == 0:
            continue
        arr = alg.arrays[op.symbol]
        for pos in range(op.arity):
            for rest in itertools.product(alg.universe, repeat=op.arity - 1):
                yield arr, pos, rest


def congruence_generated_by(alg: FiniteAlgebra, pairs) -> Congruence:
    """Least congruence containing ``pairs``.

    Only pairs that merged two blocks are pushed through the translations;
    that suffices because translations preserve the equivalence they generate.
    """
    uf = _UnionFind(alg.size)
    queue = []
    for a, b in pairs:
        if uf.union(a, b):
            queue.append((a, b))
    trans = list(_translations(alg))
    while queue:
        u, v = queue.pop()
        for arr, pos, rest in trans:
            args_u = rest[:pos] + (u,) + rest[pos:]
            args_v = rest[:pos] + (v,) + rest[pos:]
            fu, fv = int(arr[args_u]), int(arr[args_v])
            if uf.union(fu, fv):
                queue.append((fu, fv))
    return Congruence(tuple(uf.find(x) for x in alg.universe))


def principal_congruence(alg: FiniteAlgebra, a: int, b: int) -> Congruence:
    return congruence_generated_by(alg, [(a, b)])


def join(alg: FiniteAlgebra, th: Congruence, ph: Congruence) -> Congruence:
    gens = [(x, y) for x, y in itertools.combinations(alg.universe, 2)
            if th.related(x, y) or ph.related(x, y)]
    return congruence_generated_by(alg, gens)


def is_congruence(alg: FiniteAlgebra, partition) -> bool:
    part = tuple(partition)
    if len(part) != alg.size:
        return False
    for op in alg.ops:
        arr = alg.arrays[op.symbol]
        r = op.arity
        if r == 0:
            continue
        # compatibility: change one argument at a time within its block
        for args in itertools.product(alg.universe, repeat=r):
            base = part[int(arr[args])]
            for pos in range(r):
                for alt in alg.universe:
                    if part[alt] == part[args[pos]] and alt != args[pos]:
                        moved = args[:pos] + (alt,) + args[pos + 1:]
                        if part[int(arr[moved])] != base:
                            return False
    return True


def all_congruences(alg: FiniteAlgebra, cap: int = DEFAULT_CONGRUENCE_CAP) -> list[Congruence]:
    """Every congruence of ``alg``, in canonical (lexicographic block-vector) order."""
    s = alg.size
    principals = {principal_congruence(alg, a, b) for a, b in itertools.combinations(range(s), 2)}
    found = {Congruence.bottom(s)} | principals
    if len(found) > cap:
        raise ResourceLimit(f"more than {cap} congruences")
    frontier = list(found)
    while frontier:
        nxt = []
        for th in frontier:
            for ph in principals:
                j = join(alg, th, ph)
                if j not in found:
                    found.add(j)
                    nxt.append(j)
                    if len(found) > cap:
                        raise ResourceLimit(f"more than {cap} congruences")
        frontier = nxt
    return sorted(found, key=lambda c: c.partition)


def all_partitions(n: int):
    """Every partition of ``range(n)`` as a canonical block vector (restricted growth strings)."""
    def rec(prefix, m):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for b in range(m + 1):
            yield from rec(prefix + [b], max(m, b + 1))

    if n == 0:
        yield ()
        return
    yield from rec([0], 1)
