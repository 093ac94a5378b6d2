"""Symbolic chain elements such as ``t_1(t_1(a,b,e), t_2(a,b,b), t_2(a,c,e))``.

Leaves are named elements (a, b, c, d, e, X, ...); inner nodes apply the
term of a system with a given index.  ``Link(i, j, ...)`` stands for the
the t_{i=j} notation: it evaluates t_i and insists that t_j agrees.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


@dataclass(frozen=True)
class Sym:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class T:
    index: int
    args: tuple

    def __str__(self):
        return f"t_{self.index}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Link:
    index: int
    other: int
    args: tuple

    def __str__(self):
        return f"t_{{{self.index}={self.other}}}({','.join(str(a) for a in self.args)})"


class LinkMismatch(Exception):
    def __init__(self, node, left, right):
        self.node = node
        super().__init__(f"{node}: t_{node.index} gives {left}, t_{node.other} gives {right}")


a, b, c, d, e = (Sym(n) for n in "abcde")
Xs, Xe = Sym("X"), Sym("X'")


def t(i, *args):
    return T(i, tuple(args))


def link(i, j, *args):
    return Link(i, j, tuple(args))


class Evaluator:
    """Evaluates expressions against a system's term tables; memoised per instance."""

    def __init__(self, system, env: dict):
        s = system.algebra.size
        self.s = s
        self.tabs = {i: system.table(i).reshape(-1).tolist() for i in system.indices}
        self.env = env
        self.memo: dict = {}

    def __call__(self, node) -> int:
        memo = self.memo
        if node in memo:
            return memo[node]
        if isinstance(node, Sym):
            val = self.env[node.name]
        else:
            x, y, z = (self(arg) for arg in node.args)
            s = self.s
            val = self.tabs[node.index][(x * s + y) * s + z]
            if isinstance(node, Link):
                other = self.tabs[node.other][(x * s + y) * s + z]
                if other != val:
                    raise LinkMismatch(node, val, other)
        memo[node] = val
        return val


_SYM_SWAP = {"a": "e", "e": "a", "b": "d", "d": "b", "c": "c", "X": "X'", "X'": "X"}


def mirror(node, top: int):
    """Reverse the roles of the chain ends.

    Terms t_i(u, v, w) become t_{top-i}(w', v', u') and the element names
    a<->e, b<->d, X<->X' are exchanged.  For a Jónsson(top) system (or an
    alvin system t_0..t_top) the mirrored terms again form a system of the
    same kind for the reversed chain e gamma d beta c gamma b beta a.
    """
    if isinstance(node, Sym):
        return Sym(_SYM_SWAP.get(node.name, node.name))
    args = tuple(mirror(x, top) for x in reversed(node.args))
    if isinstance(node, Link):
        return Link(top - node.index, top - node.other, args)
    return T(top - node.index, args)


_ARG = r"(X'|[a-exyzX])"
_TERM_TEXT = re.compile(rf"t_(\d+)\({_ARG},{_ARG},{_ARG}\)")
_WORD = re.compile(r"X'|\b(?:alpha-beta|alpha-gamma|beta|gamma|[a-exzX])\b")
_WORD_SWAP = dict(_SYM_SWAP, x="z", z="x", beta="gamma", gamma="beta",
                  **{"alpha-beta": "alpha-gamma", "alpha-gamma": "alpha-beta"})


def mirror_text(text: str, top: int) -> str:
    """Mirror a justification such as ``t_1(x,z,z) = t_2(x,z,z)`` or ``d gamma e``."""
    pieces = []

    def repl(m):
        i, u, v, w = m.groups()
        sw = dict(_WORD_SWAP, y="y")
        pieces.append(f"t_{top - int(i)}({sw[w]},{sw[v]},{sw[u]})")
        return f"\0{len(pieces) - 1}\0"

    masked = _TERM_TEXT.sub(repl, text)
    masked = _WORD.sub(lambda m: _WORD_SWAP[m.group(0)], masked)
    return re.sub(r"\0(\d+)\0", lambda m: pieces[int(m.group(1))], masked)
