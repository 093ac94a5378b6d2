"""Jónsson, alvin and defective 4-Jónsson term systems.

A system of flavor Jonsson(n) is a chain of ternary terms t_1..t_{n-1};
with d_0 = x and d_n = z the equations are

    d_i(x, y, x) = x                        for every term,
    d_i(x, x, z) = d_{i+1}(x, x, z)         i even,
    d_i(x, z, z) = d_{i+1}(x, z, z)         i odd.

Alvin(n) swaps the two linking shapes; its terms are numbered t_0..t_{n-2}
so that t_0(x, x, z) = t_1(x, x, z) and the indices of the later terms agree
with the Jónsson ones.  Defective4 is Jonsson(4) without x = t_2(x, y, x).

Terms are searched for by closing the three projections inside the direct
power indexed by the triples (a,b,a), (a,a,b), (a,b,b): every equation above
only ever evaluates a term on such triples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .algebra import (
    App,
    Closure,
    FiniteAlgebra,
    Term,
    Var,
    X,
    Y,
    Z,
    check_signature,
    eval_grid,
    first_counterexample,
    parse_term,
    substitute,
)
from .errors import AlgebraFormatError, NotFound, VerificationFailed

JONSSON = "jonsson"
ALVIN = "alvin"
DEFECTIVE4 = "defective4"
KINDS = (JONSSON, ALVIN, DEFECTIVE4)

N_MAX = 64

XXZ = (X, X, Z)
XZZ = (X, Z, Z)
XYX = (X, Y, X)


@dataclass(frozen=True)
class Flavor:
    kind: str
    n: int = 4

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown flavor {self.kind!r}")
        if self.kind == DEFECTIVE4 and self.n != 4:
            raise ValueError("defective flavor only exists for n = 4")
        if not 2 <= self.n <= N_MAX:
            raise ValueError(f"n must be in 2..{N_MAX}")

    @classmethod
    def jonsson(cls, n):
        return cls(JONSSON, n)

    @classmethod
    def alvin(cls, n):
        return cls(ALVIN, n)

    @classmethod
    def defective4(cls):
        return cls(DEFECTIVE4, 4)

    @property
    def first_index(self) -> int:
        """Index of the first term: 0 for alvin, 1 otherwise."""
        return 0 if self.kind == ALVIN else 1

    @property
    def term_count(self) -> int:
        return self.n - 1

    def link_shape(self, j: int):
        """Shape linking d_j to d_{j+1} in the full sequence d_0 = x, ..., d_n = z."""
        even = j % 2 == 0
        if self.kind == ALVIN:
            even = not even
        return XXZ if even else XZZ

    def absorbs(self, pos: int) -> bool:
        """Whether the term at position ``pos`` (1-based in d) must satisfy x = t(x, y, x)."""
        return not (self.kind == DEFECTIVE4 and pos == 2)

    def __str__(self):
        return DEFECTIVE4 if self.kind == DEFECTIVE4 else f"{self.kind}({self.n})"


def _shape_name(shape) -> str:
    return "(" + ",".join(str(v) for v in shape) + ")"


@dataclass(frozen=True)
class Equation:
    name: str
    lhs: Term
    rhs: Term


@dataclass
class EquationResult:
    name: str
    ok: bool
    counterexample: tuple | None = None


@dataclass
class ValidationReport:
    results: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    @property
    def failures(self) -> list:
        return [r for r in self.results if not r.ok]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "equations": [
                {"equation": r.name, "ok": r.ok,
                 "counterexample": list(r.counterexample) if r.counterexample else None}
                for r in self.results
            ],
        }


def flavor_equations(flavor: Flavor, terms) -> list[Equation]:
    """Defining equations of ``flavor`` instantiated with concrete ``terms``."""
    off = flavor.first_index
    names = [f"t_{i + off}" for i in range(len(terms))]
    d = [X] + list(terms) + [Z]
    dn = ["x"] + names + ["z"]
    eqs = []
    for pos in range(1, flavor.n):
        if flavor.absorbs(pos):
            eqs.append(Equation(f"x = {dn[pos]}(x,y,x)", X, substitute(d[pos], XYX)))
    if flavor.kind == ALVIN:
        eqs.append(Equation("x = t_0(x,y,y)", X, substitute(d[1], (X, Y, Y))))
    for j in range(flavor.n):
        shape = flavor.link_shape(j)
        if flavor.kind == ALVIN and j == 0:
            continue  # restated above as x = t_0(x,y,y)
        lhs_name = dn[j] if j > 0 else "x"
        rhs_name = dn[j + 1] if j + 1 < flavor.n else "z"
        lhs = substitute(d[j], shape) if j > 0 else X
        rhs = substitute(d[j + 1], shape) if j + 1 < flavor.n else Z
        sn = _shape_name(shape)
        left = f"{lhs_name}{sn}" if j > 0 else "x"
        right = f"{rhs_name}{sn}" if j + 1 < flavor.n else "z"
        eqs.append(Equation(f"{left} = {right}", lhs, rhs))
    return eqs


@dataclass(frozen=True)
class JonssonSystem:
    flavor: Flavor
    terms: tuple
    algebra: FiniteAlgebra

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if len(self.terms) != self.flavor.term_count:
            raise ValueError(f"{self.flavor} needs {self.flavor.term_count} terms, got {len(self.terms)}")
        for t in self.terms:
            check_signature(self.algebra, t)

    @property
    def indices(self) -> range:
        off = self.flavor.first_index
        return range(off, off + len(self.terms))

    def term(self, i: int) -> Term:
        """Term by its index (t_0 exists only for alvin systems)."""
        return self.terms[i - self.flavor.first_index]

    @cached_property
    def _tables(self) -> dict[int, np.ndarray]:
        return {i: eval_grid(self.algebra, self.term(i)) for i in self.indices}

    def table(self, i: int) -> np.ndarray:
        return self._tables[i]

    def equations(self) -> list[Equation]:
        return flavor_equations(self.flavor, self.terms)

    def to_json(self) -> dict:
        return {
            "flavor": self.flavor.kind,
            "n": self.flavor.n,
            "algebra": self.algebra.name,
            "terms": [str(t) for t in self.terms],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def from_json(cls, data: dict, alg: FiniteAlgebra) -> "JonssonSystem":
        try:
            flavor = Flavor(data["flavor"], int(data["n"]))
            terms = [parse_term(t) for t in data["terms"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise AlgebraFormatError(f"bad system file: {exc}") from None
        return cls(flavor, tuple(terms), alg)


def verify_system(alg: FiniteAlgebra, system: JonssonSystem) -> ValidationReport:
    """Check every defining equation over all ``s**3`` assignments."""
    report = ValidationReport()
    for eq in flavor_equations(system.flavor, system.terms):
        cex = first_counterexample(alg, eq.lhs, eq.rhs)
        report.results.append(EquationResult(eq.name, cex is None, cex))
    return report


def indicator_index(alg: FiniteAlgebra) -> list[tuple[int, int, int]]:
    """Sorted triples of the shapes (a,b,a), (a,a,b), (a,b,b)."""
    out = set()
    for a in alg.universe:
        for b in alg.universe:
            out.update({(a, b, a), (a, a, b), (a, b, b)})
    return sorted(out)


class TermSearch:
    """Closure of the projections in the indicator power, shared across flavors.

    The closure is extended round by round and the path search is retried
    after each round, so a system is usually found long before the fixpoint.
    NotFound is only raised once the closure is complete.
    """

    def __init__(self, alg: FiniteAlgebra, cap: int | None = None):
        self.alg = alg
        self.index = indicator_index(alg)
        self.pos = {t: i for i, t in enumerate(self.index)}
        seeds = [tuple(t[k] for t in self.index) for k in range(3)]
        self.closure = Closure(alg, seeds, track_terms=True, cap=cap)
        s = alg.size
        pairs = [(a, b) for a in range(s) for b in range(s)]
        self.cols = {
            XXZ: np.array([self.pos[(a, a, b)] for a, b in pairs]),
            XZZ: np.array([self.pos[(a, b, b)] for a, b in pairs]),
            XYX: np.array([self.pos[(a, b, a)] for a, b in pairs]),
        }
        self.x_vals = np.array([a for a, _ in pairs])
        self.z_vals = np.array([b for _, b in pairs])

    def find(self, flavor: Flavor) -> JonssonSystem:
        while True:
            hit = self._path(flavor)
            if hit is not None:
                return self._certify(flavor, hit)
            if self.closure.complete:
                raise NotFound(f"no {flavor} terms for {self.alg.name}")
            self.closure.step()

    def _path(self, flavor: Flavor):
        data = self.closure.data
        absorbing = np.all(data[:, self.cols[XYX]] == self.x_vals, axis=1)
        everything = np.ones(len(data), dtype=bool)

        def keys(shape, idx):
            sub = data[np.ix_(idx, self.cols[shape])]
            return [row.tobytes() for row in sub]

        x_key = self.x_vals.astype(np.int64).tobytes()
        z_key = self.z_vals.astype(np.int64).tobytes()
        layers = []  # per position: (indices, parent index per element)
        prev_keys: dict[bytes, int] | None = None
        for pos in range(1, flavor.n):
            ok = absorbing if flavor.absorbs(pos) else everything
            idx = np.flatnonzero(ok)
            in_shape = flavor.link_shape(pos - 1)
            if pos == 1:
                ks = keys(in_shape, idx)
                chosen = [(int(i), None) for i, k in zip(idx, ks) if k == x_key]
            else:
                ks = keys(in_shape, idx)
                chosen = [(int(i), prev_keys[k]) for i, k in zip(idx, ks) if k in prev_keys]
            if not chosen:
                return None
            layers.append(chosen)
            out_shape = flavor.link_shape(pos)
            out_keys = keys(out_shape, np.array([i for i, _ in chosen], dtype=np.int64))
            prev_keys = {}
            for (i, _), k in zip(chosen, out_keys):
                prev_keys.setdefault(k, i)
        if z_key not in prev_keys:
            return None
        # walk back through first-found parents
        path = [prev_keys[z_key]]
        for layer in reversed(layers[1:]):
            parent = dict(layer)[path[-1]]
            path.append(parent)
        return list(reversed(path))

    def _certify(self, flavor: Flavor, path) -> JonssonSystem:
        res = self.closure.result()
        terms = tuple(res.term(i) for i in path)
        system = JonssonSystem(flavor, terms, self.alg)
        report = verify_system(self.alg, system)
        if not report.ok:
            raise VerificationFailed(
                f"indicator-level solution failed re-verification: {report.failures[0].name}", report
            )
        return system


def find_terms(alg: FiniteAlgebra, flavor: Flavor, cap: int | None = None) -> JonssonSystem:
    """Search for a term system of ``flavor``; raises NotFound or ResourceLimit."""
    return TermSearch(alg, cap=cap).find(flavor)


def find_level(alg: FiniteAlgebra, n_max: int, cap: int | None = None) -> JonssonSystem | None:
    """Jonsson(n) system for the least ``n <= n_max``, or None."""
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    search = TermSearch(alg, cap=cap)
    for n in range(2, n_max + 1):
        try:
            return search.find(Flavor.jonsson(n))
        except NotFound:
            continue
    return None


def distributivity_level(alg: FiniteAlgebra, n_max: int, cap: int | None = None) -> int | None:
    """Least n with Jonsson(n) terms; None means none up to ``n_max``."""
    system = find_level(alg, n_max, cap=cap)
    return None if system is None else system.flavor.n


def pad(system: JonssonSystem, extra: int = 2) -> JonssonSystem:
    """Append trailing z-projections; Jonsson(n) becomes Jonsson(n + extra)."""
    if extra % 2:
        raise ValueError("padding must add an even number of terms")
    if system.flavor.kind == DEFECTIVE4:
        raise ValueError("defective systems cannot be padded")
    flavor = Flavor(system.flavor.kind, system.flavor.n + extra)
    padded = JonssonSystem(flavor, system.terms + (Z,) * extra, system.algebra)
    _require(padded)
    return padded


def pad_to_four(alg: FiniteAlgebra, majority_system: JonssonSystem) -> JonssonSystem:
    if majority_system.flavor != Flavor.jonsson(2):
        raise ValueError("pad_to_four expects a Jonsson(2) system")
    return pad(JonssonSystem(majority_system.flavor, majority_system.terms, alg), 2)


def jonsson_to_alvin(system: JonssonSystem) -> JonssonSystem:
    """Jonsson(n) t_1..t_{n-1} becomes Alvin(n+2) with t_0 = x and a trailing z."""
    if system.flavor.kind != JONSSON:
        raise ValueError("expected a Jonsson system")
    flavor = Flavor.alvin(system.flavor.n + 2)
    out = JonssonSystem(flavor, (X,) + system.terms + (Z,), system.algebra)
    _require(out)
    return out


def _require(system: JonssonSystem) -> None:
    report = verify_system(system.algebra, system)
    if not report.ok:
        raise VerificationFailed(f"{system.flavor} system fails {report.failures[0].name}", report)


def majority_from_lattice(meet: str = "meet", join: str = "join") -> Term:
    """(x ∧ y) ∨ ((y ∧ z) ∨ (x ∧ z))."""
    return App(join, (App(meet, (X, Y)), App(join, (App(meet, (Y, Z)), App(meet, (X, Z))))))
