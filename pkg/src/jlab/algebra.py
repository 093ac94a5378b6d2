"""Finite algebras, ternary terms, evaluation and subuniverse closure.

The universe of every algebra is ``range(size)``.  Operation tables are kept
row-major and flat, exactly as they appear in the JSON format::

    {"name": "L2", "size": 2,
     "operations": [{"symbol": "meet", "arity": 2, "table": [0, 0, 0, 1]}]}
"""

from __future__ import annotations

import itertools
import json
import os
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import AlgebraFormatError, ArityMismatch, ResourceLimit, UnknownSymbol

MAX_ARITY = 4
DEFAULT_CLOSURE_CAP = 1_000_000
VAR_NAMES = ("x", "y", "z")


def closure_cap() -> int:
    """Closure cap, overridable through the ``JLAB_CAP`` environment variable."""
    raw = os.environ.get("JLAB_CAP")
    if raw is None:
        return DEFAULT_CLOSURE_CAP
    return int(raw)


@dataclass(frozen=True)
class Operation:
    symbol: str
    arity: int
    table: tuple[int, ...]


@dataclass(frozen=True)
class FiniteAlgebra:
    name: str
    size: int
    ops: tuple[Operation, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        _validate(self)

    @cached_property
    def arrays(self) -> dict[str, np.ndarray]:
        """Each table reshaped to an ``arity``-dimensional numpy array."""
        out = {}
        for op in self.ops:
            arr = np.asarray(op.table, dtype=np.int64).reshape((self.size,) * op.arity)
            arr.setflags(write=False)
            out[op.symbol] = arr
        return out

    def op(self, symbol: str) -> Operation:
        for op in self.ops:
            if op.symbol == symbol:
                return op
        raise UnknownSymbol(symbol)

    @property
    def universe(self) -> range:
        return range(self.size)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "size": self.size,
            "operations": [
                {"symbol": op.symbol, "arity": op.arity, "table": list(op.table)} for op in self.ops
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "FiniteAlgebra":
        if not isinstance(data, dict):
            raise AlgebraFormatError("algebra must be a JSON object")
        for key in ("size", "operations"):
            if key not in data:
                raise AlgebraFormatError(f"missing key {key!r}")
        size = data["size"]
        if not isinstance(size, int) or isinstance(size, bool):
            raise AlgebraFormatError("size must be an integer", "size")
        ops = []
        for i, raw in enumerate(data["operations"]):
            where = f"operations[{i}]"
            try:
                symbol, arity, table = raw["symbol"], raw["arity"], raw["table"]
            except (KeyError, TypeError):
                raise AlgebraFormatError("operation needs symbol, arity and table", where) from None
            if not isinstance(arity, int) or not isinstance(table, list):
                raise AlgebraFormatError("arity must be an int and table a list", where)
            for j, v in enumerate(table):
                if not isinstance(v, int) or isinstance(v, bool):
                    raise AlgebraFormatError("table entries must be integers", f"{where}.table[{j}]")
            ops.append(Operation(str(symbol), arity, tuple(table)))
        return cls(str(data.get("name", "algebra")), size, tuple(ops))


def _validate(alg: FiniteAlgebra) -> None:
    if alg.size < 1:
        raise AlgebraFormatError("size must be positive", "size")
    seen = set()
    for i, op in enumerate(alg.ops):
        where = f"operations[{i}]"
        if op.symbol in seen:
            raise AlgebraFormatError(f"duplicate symbol {op.symbol!r}", where)
        seen.add(op.symbol)
        if not 0 <= op.arity <= MAX_ARITY:
            raise AlgebraFormatError(f"arity must be in 0..{MAX_ARITY}", where)
        expected = alg.size ** op.arity
        if len(op.table) != expected:
            raise AlgebraFormatError(
                f"table has length {len(op.table)}, expected {expected}", f"{where}.table"
            )
        for j, v in enumerate(op.table):
            if not 0 <= v < alg.size:
                raise AlgebraFormatError(f"entry {v} outside universe", f"{where}.table[{j}]")


def load_algebra(path) -> FiniteAlgebra:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise AlgebraFormatError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return FiniteAlgebra.from_json(data)


def make_algebra(name: str, size: int, ops: dict[str, tuple[int, callable]]) -> FiniteAlgebra:
    """Build an algebra from python functions, ``ops[symbol] = (arity, fn)``."""
    built = []
    for symbol, (arity, fn) in ops.items():
        table = tuple(fn(*args) for args in itertools.product(range(size), repeat=arity))
        built.append(Operation(symbol, arity, table))
    return FiniteAlgebra(name, size, tuple(built))


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    index: int

    def __str__(self):
        return VAR_NAMES[self.index] if self.index < 3 else f"v{self.index}"


@dataclass(frozen=True)
class App:
    symbol: str
    children: tuple = field(default=())

    def __str__(self):
        return f"{self.symbol}({','.join(str(c) for c in self.children)})"


Term = Var | App

X, Y, Z = Var(0), Var(1), Var(2)


def substitute(t: Term, args: Sequence[Term]) -> Term:
    """Replace variable ``i`` of ``t`` by ``args[i]``."""
    if isinstance(t, Var):
        return args[t.index]
    return App(t.symbol, tuple(substitute(c, args) for c in t.children))


def depth(t: Term) -> int:
    if isinstance(t, Var):
        return 0
    return 1 + max((depth(c) for c in t.children), default=0)


def node_count(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(node_count(c) for c in t.children)


_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|(\()|(\))|(,))")


def parse_term(text: str, var_names: Sequence[str] = VAR_NAMES) -> Term:
    """Parse prefix notation such as ``join(meet(x,y),z)``."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise AlgebraFormatError(f"unexpected character {text[pos]!r}", f"character {pos}")
        tokens.append((m.group(0).strip(), pos))
        pos = m.end()
    tokens = [t for t in tokens if t[0]]

    def parse(i):
        if i >= len(tokens):
            raise AlgebraFormatError("unexpected end of term", f"character {len(text)}")
        tok, where = tokens[i]
        if not re.match(r"[A-Za-z_]", tok):
            raise AlgebraFormatError(f"unexpected token {tok!r}", f"character {where}")
        nxt = tokens[i + 1][0] if i + 1 < len(tokens) else None
        if nxt != "(":
            if tok in var_names:
                return Var(list(var_names).index(tok)), i + 1
            # nullary operation written without parentheses
            return App(tok, ()), i + 1
        children = []
        i += 2
        if i < len(tokens) and tokens[i][0] == ")":
            return App(tok, ()), i + 1
        while True:
            child, i = parse(i)
            children.append(child)
            if i >= len(tokens):
                raise AlgebraFormatError("unclosed parenthesis", f"character {len(text)}")
            if tokens[i][0] == ",":
                i += 1
            elif tokens[i][0] == ")":
                return App(tok, tuple(children)), i + 1
            else:
                raise AlgebraFormatError(f"unexpected token {tokens[i][0]!r}", f"character {tokens[i][1]}")

    term, end = parse(0)
    if end != len(tokens):
        raise AlgebraFormatError("trailing input", f"character {tokens[end][1]}")
    return term


def check_signature(alg: FiniteAlgebra, t: Term) -> None:
    if isinstance(t, Var):
        return
    try:
        op = alg.op(t.symbol)
    except UnknownSymbol:
        raise UnknownSymbol(f"{t.symbol!r} is not an operation of {alg.name}") from None
    if op.arity != len(t.children):
        raise ArityMismatch(f"{t.symbol} has arity {op.arity}, got {len(t.children)} arguments")
    for c in t.children:
        check_signature(alg, c)


def eval_term(alg: FiniteAlgebra, t: Term, asg: Sequence[int]) -> int:
    """Value of ``t`` with variable ``i`` set to ``asg[i]``."""
    if isinstance(t, Var):
        return asg[t.index]
    if t.symbol not in alg.arrays:
        raise UnknownSymbol(f"{t.symbol!r} is not an operation of {alg.name}")
    op = alg.op(t.symbol)
    if op.arity != len(t.children):
        raise ArityMismatch(f"{t.symbol} has arity {op.arity}, got {len(t.children)} arguments")
    args = tuple(eval_term(alg, c, asg) for c in t.children)
    return int(alg.arrays[t.symbol][args])


def eval_grid(alg: FiniteAlgebra, t: Term, nvars: int = 3) -> np.ndarray:
    """Evaluate ``t`` at every assignment at once; result has shape ``(s,)*nvars``."""
    check_signature(alg, t)
    s = alg.size
    grids = np.indices((s,) * nvars)

    def go(u):
        if isinstance(u, Var):
            return grids[u.index]
        arr = alg.arrays[u.symbol]
        if not u.children:
            return np.full((s,) * nvars, arr[()])
        return arr[tuple(go(c) for c in u.children)]

    return go(t)


def first_counterexample(alg: FiniteAlgebra, lhs: Term, rhs: Term) -> tuple[int, ...] | None:
    diff = eval_grid(alg, lhs) != eval_grid(alg, rhs)
    if not diff.any():
        return None
    return tuple(int(v) for v in np.argwhere(diff)[0])


def check_equation(alg: FiniteAlgebra, lhs: Term, rhs: Term) -> bool:
    """True iff ``lhs = rhs`` holds under all ``s**3`` assignments of x, y, z."""
    return first_counterexample(alg, lhs, rhs) is None


def is_idempotent(alg: FiniteAlgebra) -> bool:
    for op in alg.ops:
        arr = alg.arrays[op.symbol]
        for a in alg.universe:
            if int(arr[(a,) * op.arity]) != a:
                return False
    return True


# ---------------------------------------------------------------------------
# Closure
# ---------------------------------------------------------------------------


@dataclass
class ClosureResult:
    """Elements in insertion order; ``origins[i]`` is ``None`` for seeds or ``(symbol, arg indices)``."""

    elements: list
    origins: list | None
    complete: bool

    def __len__(self):
        return len(self.elements)

    def __contains__(self, item):
        return item in set(self.elements)

    def term(self, i: int, seed_vars: Sequence[Term] | None = None) -> Term:
        if self.origins is None:
            raise ValueError("closure was computed without term tracking")
        memo: dict[int, Term] = {}
        seeds = [j for j, o in enumerate(self.origins) if o is None]
        if seed_vars is None:
            seed_vars = [Var(k) for k in range(len(seeds))]
        seed_pos = {j: k for k, j in enumerate(seeds)}

        def go(j):
            if j in memo:
                return memo[j]
            o = self.origins[j]
            if o is None:
                out = seed_vars[seed_pos[j]]
            else:
                out = App(o[0], tuple(go(c) for c in o[1]))
            memo[j] = out
            return out

        return go(i)


class Closure:
    """Incremental semi-naive closure of vectors in a direct power of ``alg``.

    Each call to :meth:`step` applies every operation to all argument tuples
    that involve at least one element added in the previous round.
    """

    CHUNK = 1 << 22  # int64 entries per evaluated block

    def __init__(self, alg: FiniteAlgebra, seeds: Iterable, track_terms: bool = False, cap: int | None = None):
        self.alg = alg
        self.cap = closure_cap() if cap is None else cap
        self.scalar = False
        rows = []
        for sd in seeds:
            if isinstance(sd, (int, np.integer)):
                self.scalar = True
                sd = (int(sd),)
            rows.append(tuple(int(v) for v in sd))
        if not rows:
            raise ValueError("closure needs a non-empty seed")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("all seeds must share one index set")
        self.width = width
        self.track = track_terms
        self.index: dict[bytes, int] = {}
        self.data = np.zeros((0, width), dtype=np.int64)
        self.origins: list | None = [] if track_terms else None
        uniq = []
        for r in rows:
            key = np.asarray(r, dtype=np.int64).tobytes()
            if key not in self.index:
                self.index[key] = len(uniq)
                uniq.append(r)
                if self.track:
                    self.origins.append(None)
        self.data = np.asarray(uniq, dtype=np.int64).reshape(len(uniq), width)
        self.frontier = 0
        self.complete = False
        self._nullary_done = False
        self._check_cap()

    def _check_cap(self):
        if len(self.data) > self.cap:
            raise ResourceLimit(f"closure exceeded cap of {self.cap} elements")

    def __len__(self):
        return len(self.data)

    def step(self) -> int:
        """Run one round; returns the number of new elements."""
        if self.complete:
            return 0
        lo, hi = self.frontier, len(self.data)
        new_rows: list[np.ndarray] = []
        new_orig: list = []
        fresh: dict[bytes, int] = {}

        def absorb(values: np.ndarray, symbol: str, arg_index):
            # values: (count, width); arg_index(k) -> tuple of element indices
            flat = np.ascontiguousarray(values)
            _, first = np.unique(flat.view(np.dtype((np.void, flat.dtype.itemsize * self.width))).ravel(),
                                 return_index=True)
            for k in sorted(first):
                key = flat[k].tobytes()
                if key in self.index or key in fresh:
                    continue
                fresh[key] = len(self.data) + len(new_rows)
                new_rows.append(flat[k])
                if self.track:
                    new_orig.append((symbol, arg_index(k)))
                if len(self.data) + len(new_rows) > self.cap:
                    raise ResourceLimit(f"closure exceeded cap of {self.cap} elements")

        for op in self.alg.ops:
            arr = self.alg.arrays[op.symbol]
            r = op.arity
            if r == 0:
                if not self._nullary_done:
                    absorb(np.full((1, self.width), arr[()]), op.symbol, lambda k: ())
                continue
            # tuples whose first "new" coordinate sits at position p
            for p in range(r):
                ranges = [(0, lo)] * p + [(lo, hi)] + [(0, hi)] * (r - p - 1)
                sizes = [b - a for a, b in ranges]
                if 0 in sizes:
                    continue
                self._apply_block(arr, ranges, sizes, op.symbol, absorb)
        self._nullary_done = True
        if new_rows:
            self.data = np.vstack([self.data, np.asarray(new_rows, dtype=np.int64)])
            for key, i in fresh.items():
                self.index[key] = i
            if self.track:
                self.origins.extend(new_orig)
        self.frontier = hi
        if not new_rows:
            self.complete = True
        return len(new_rows)

    def _apply_block(self, arr, ranges, sizes, symbol, absorb):
        r = len(ranges)
        # split on the first axis so every chunk stays below CHUNK rows
        inner = int(np.prod(sizes[1:])) if r > 1 else 1
        step0 = max(1, self.CHUNK // max(1, inner * self.width))
        a0, b0 = ranges[0]
        for start in range(a0, b0, step0):
            stop = min(b0, start + step0)
            sub = [(start, stop)] + ranges[1:]
            shape = [b - a for a, b in sub]
            cols = []
            for axis, (a, b) in enumerate(sub):
                block = self.data[a:b]
                view_shape = [1] * r + [self.width]
                view_shape[axis] = b - a
                cols.append(block.reshape(view_shape))
            vals = arr[tuple(cols)].reshape(-1, self.width)

            def arg_index(k, sub=sub, shape=shape):
                coords = np.unravel_index(k, shape)
                return tuple(int(c) + a for c, (a, _) in zip(coords, sub))

            absorb(vals, symbol, arg_index)

    def run(self) -> "ClosureResult":
        while not self.complete:
            self.step()
        return self.result()

    def result(self) -> ClosureResult:
        if self.scalar:
            elements = [int(r[0]) for r in self.data]
        else:
            elements = [tuple(int(v) for v in r) for r in self.data]
        origins = list(self.origins) if self.track else None
        return ClosureResult(elements, origins, self.complete)


def closure(alg: FiniteAlgebra, seed: Iterable, track_terms: bool = False, cap: int | None = None) -> ClosureResult:
    """Least subset containing ``seed`` closed under all operations (pointwise on vectors).

    Seeds are universe elements or equal-length tuples (elements of a direct
    power).  With ``track_terms`` every element carries a generating term over
    variables identified with the seed order.
    """
    return Closure(alg, seed, track_terms=track_terms, cap=cap).run()
