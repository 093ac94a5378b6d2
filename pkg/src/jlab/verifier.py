"""Brute-force ground truth for congruence identities of a finite algebra.

An identity instance asks whether

    alpha ∩ (beta o gamma o beta ...)   [m factors]
      ⊆  (alpha∩beta) o (alpha∩gamma) o ...   [k factors]

with the right-hand side optionally starting from alpha∩gamma instead.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass, field

from .algebra import FiniteAlgebra
from .errors import ResourceLimit, SizeMismatch
from .relations import (
    DEFAULT_CONGRUENCE_CAP,
    BinRel,
    Congruence,
    all_congruences,
    alt_chain,
    alt_compose,
    intersect,
)

BETA_FIRST = "beta"
GAMMA_FIRST = "gamma"


def _check_sizes(*ths: Congruence) -> None:
    if len({th.size for th in ths}) != 1:
        raise SizeMismatch("congruences live on different universes")


def lhs_relation(alpha: Congruence, beta: Congruence, gamma: Congruence, m: int) -> BinRel:
    _check_sizes(alpha, beta, gamma)
    return intersect(alpha.rel, alt_compose(beta.rel, gamma.rel, m))


def _rhs_factors(alpha, beta, gamma, rhs_start):
    ab = intersect(alpha.rel, beta.rel)
    ag = intersect(alpha.rel, gamma.rel)
    if rhs_start == BETA_FIRST:
        return ab, ag
    if rhs_start == GAMMA_FIRST:
        return ag, ab
    raise ValueError(f"rhs_start must be {BETA_FIRST!r} or {GAMMA_FIRST!r}")


def rhs_relation(alpha, beta, gamma, k: int, rhs_start: str = BETA_FIRST) -> BinRel:
    _check_sizes(alpha, beta, gamma)
    return alt_compose(*_rhs_factors(alpha, beta, gamma, rhs_start), k)


@dataclass(frozen=True)
class IdentityInstance:
    alpha: Congruence
    beta: Congruence
    gamma: Congruence
    m: int
    k: int
    rhs_start: str = BETA_FIRST

    def __post_init__(self):
        if self.m < 1 or self.k < 1:
            raise ValueError("m and k must be at least 1")
        _check_sizes(self.alpha, self.beta, self.gamma)


def violations(inst: IdentityInstance) -> list[tuple[int, int]]:
    """Pairs of the left side missing from the right side, in row-major order."""
    lhs = lhs_relation(inst.alpha, inst.beta, inst.gamma, inst.m)
    rhs = rhs_relation(inst.alpha, inst.beta, inst.gamma, inst.k, inst.rhs_start)
    return BinRel(lhs.bits & ~rhs.bits).pairs()


def check_identity(inst: IdentityInstance) -> bool:
    lhs = lhs_relation(inst.alpha, inst.beta, inst.gamma, inst.m)
    rhs = rhs_relation(inst.alpha, inst.beta, inst.gamma, inst.k, inst.rhs_start)
    return lhs <= rhs


@dataclass(frozen=True)
class NoneUpTo:
    """No k up to ``k_max`` makes the inclusion hold."""

    k_max: int

    def __str__(self):
        return f">{self.k_max}"


@dataclass
class SpectrumRow:
    alpha: Congruence
    beta: Congruence
    gamma: Congruence
    m: int
    minimal_k: int | NoneUpTo
    witness_pair: tuple[int, int] | None = None  # in LHS, not in the RHS with minimal_k - 1 factors
    ids: tuple = ()  # canonical congruence indices, when known
    rhs_start: str = BETA_FIRST

    @property
    def found(self) -> bool:
        return isinstance(self.minimal_k, int)

    @property
    def compositions(self):
        """The same bound counted in occurrences of composition."""
        return self.minimal_k - 1 if self.found else None

    def to_json(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "beta": str(self.beta),
            "gamma": str(self.gamma),
            "ids": list(self.ids),
            "m": self.m,
            "rhs_start": self.rhs_start,
            "minimal_k": self.minimal_k if self.found else None,
            "none_up_to": None if self.found else self.minimal_k.k_max,
            "compositions": self.compositions,
            "witness_pair": list(self.witness_pair) if self.witness_pair else None,
        }


def default_k_max(size: int) -> int:
    return max(1, 2 * size * size)


def minimal_k(alg: FiniteAlgebra | None, alpha, beta, gamma, m: int, k_max: int | None = None,
              rhs_start: str = BETA_FIRST) -> SpectrumRow:
    _check_sizes(alpha, beta, gamma)
    if k_max is None:
        k_max = default_k_max(alpha.size)
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    lhs = lhs_relation(alpha, beta, gamma, m)
    rhs = alt_chain(*_rhs_factors(alpha, beta, gamma, rhs_start), k_max)
    for k, r in enumerate(rhs, start=1):
        if lhs <= r:
            witness = None
            if k > 1:
                witness = BinRel(lhs.bits & ~rhs[k - 2].bits).pairs()[0]
            return SpectrumRow(alpha, beta, gamma, m, k, witness, rhs_start=rhs_start)
        if k >= 2 and r == rhs[k - 2]:
            break  # the chain of relations has stabilised below the left side
    missing = BinRel(lhs.bits & ~rhs[-1].bits).pairs()[0]
    return SpectrumRow(alpha, beta, gamma, m, NoneUpTo(k_max), missing, rhs_start=rhs_start)


@dataclass
class Spectrum:
    algebra: str
    congruences: list
    rows: list = field(default_factory=list)

    def max_by_m(self) -> dict:
        """Per m: the largest minimal_k, or a NoneUpTo if some row has none."""
        out: dict = {}
        for r in self.rows:
            cur = out.get(r.m)
            if isinstance(cur, NoneUpTo):
                continue
            if not r.found:
                out[r.m] = r.minimal_k
            elif cur is None or r.minimal_k > cur:
                out[r.m] = r.minimal_k
        return out

    COLUMNS = ("alpha", "beta", "gamma", "m", "minimal_k", "witness_pair", "compositions")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for r in self.rows:
            w.writerow([
                str(r.alpha), str(r.beta), str(r.gamma), r.m, str(r.minimal_k),
                "" if r.witness_pair is None else f"{r.witness_pair[0]} {r.witness_pair[1]}",
                "" if r.compositions is None else r.compositions,
            ])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "algebra": self.algebra,
            "congruences": [str(c) for c in self.congruences],
            "max_minimal_k": {str(m): (v if isinstance(v, int) else str(v))
                              for m, v in sorted(self.max_by_m().items())},
            "rows": [r.to_json() for r in self.rows],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def spectrum(alg: FiniteAlgebra, m_list, k_max: int | None = None, rhs_start: str = BETA_FIRST,
             cap: int = DEFAULT_CONGRUENCE_CAP, max_rows: int = 2_000_000) -> Spectrum:
    """Minimal k for every congruence triple and every m, in canonical order."""
    cons = all_congruences(alg, cap=cap)
    n_rows = len(cons) ** 3 * len(m_list)
    if n_rows > max_rows:
        raise ResourceLimit(f"{n_rows} spectrum rows exceed the limit of {max_rows}")
    out = Spectrum(alg.name, cons)
    for (i, al), (j, be), (l, ga) in itertools.product(enumerate(cons), repeat=3):
        for m in m_list:
            row = minimal_k(alg, al, be, ga, m, k_max, rhs_start)
            row.ids = (i, j, l)
            out.rows.append(row)
    return out


@dataclass
class Counterexample:
    algebra: FiniteAlgebra
    alpha: Congruence
    beta: Congruence
    gamma: Congruence
    pair: tuple[int, int]
    m: int
    k: int
    rhs_start: str = BETA_FIRST

    def to_json(self) -> dict:
        return {"algebra": self.algebra.name, "alpha": str(self.alpha), "beta": str(self.beta),
                "gamma": str(self.gamma), "pair": list(self.pair), "m": self.m, "k": self.k,
                "rhs_start": self.rhs_start}


def counterexample_search(catalog, m: int, k: int, rhs_start: str = BETA_FIRST):
    """First violation in catalog order, then canonical triple order, then row-major pair order."""
    for alg in catalog:
        cons = all_congruences(alg)
        for al, be, ga in itertools.product(cons, repeat=3):
            bad = violations(IdentityInstance(al, be, ga, m, k, rhs_start))
            if bad:
                return Counterexample(alg, al, be, ga, bad[0], m, k, rhs_start)
    return None
