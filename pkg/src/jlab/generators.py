"""Built-in algebras, addressed by short names such as ``lattice-prod:2x3``."""

from __future__ import annotations

from .algebra import FiniteAlgebra, make_algebra
from .errors import AlgebraFormatError
from .relations import Congruence


def lattice_chain(n: int) -> FiniteAlgebra:
    if n < 1:
        raise AlgebraFormatError("chain length must be positive", "lattice-chain")
    return make_algebra(f"lattice-chain:{n}", n, {"meet": (2, min), "join": (2, max)})


def lattice_prod(a: int, b: int) -> FiniteAlgebra:
    """Product of an a-chain and a b-chain; the pair (i, j) is element i*b + j."""
    if a < 1 or b < 1:
        raise AlgebraFormatError("factor sizes must be positive", "lattice-prod")

    def meet(x, y):
        return min(x // b, y // b) * b + min(x % b, y % b)

    def join(x, y):
        return max(x // b, y // b) * b + max(x % b, y % b)

    return make_algebra(f"lattice-prod:{a}x{b}", a * b, {"meet": (2, meet), "join": (2, join)})


def majority2() -> FiniteAlgebra:
    return make_algebra("majority2", 2, {"maj": (3, lambda x, y, z: 1 if x + y + z >= 2 else 0)})


def dualdisc3() -> FiniteAlgebra:
    return make_algebra("dualdisc3", 3, {"d": (3, lambda x, y, z: x if x == y else z)})


def zmod(n: int) -> FiniteAlgebra:
    return make_algebra("z2" if n == 2 else f"zmod:{n}", n, {"+": (2, lambda x, y: (x + y) % n)})


def klein() -> FiniteAlgebra:
    """Z2 x Z2 as a group; its congruence lattice is the non-distributive M3."""
    return make_algebra("klein", 4, {"+": (2, lambda x, y: x ^ y)})


def m3() -> FiniteAlgebra:
    """The five-element modular, non-distributive lattice: 0 < 1, 2, 3 < 4."""
    leq = {(x, y) for x in range(5) for y in range(5) if x == y or x == 0 or y == 4}

    def meet(x, y):
        return x if (x, y) in leq else y if (y, x) in leq else 0

    def join(x, y):
        return y if (x, y) in leq else x if (y, x) in leq else 4

    return make_algebra("m3", 5, {"meet": (2, meet), "join": (2, join)})


def trivial(n: int = 1) -> FiniteAlgebra:
    if n != 1:
        raise AlgebraFormatError("only trivial:1 exists", "trivial")
    return make_algebra("trivial:1", 1, {"f": (2, lambda x, y: 0)})


def _int(text: str, label: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise AlgebraFormatError(f"expected an integer, got {text!r}", label) from None


def generate(label: str) -> FiniteAlgebra:
    name, _, arg = label.strip().partition(":")
    if name == "lattice-chain":
        return lattice_chain(_int(arg, label))
    if name == "lattice-prod":
        parts = arg.lower().split("x")
        if len(parts) != 2:
            raise AlgebraFormatError("expected lattice-prod:AxB", label)
        return lattice_prod(_int(parts[0], label), _int(parts[1], label))
    if name == "zmod":
        return zmod(_int(arg, label))
    if name == "trivial":
        return trivial(_int(arg or "1", label))
    simple = {"majority2": majority2, "dualdisc3": dualdisc3, "z2": lambda: zmod(2),
              "klein": klein, "m3": m3}
    if name in simple and not arg:
        return simple[name]()
    raise AlgebraFormatError(f"unknown generator {label!r}", "--gen")


def named_congruences(alg: FiniteAlgebra) -> dict[str, Congruence]:
    """Names usable on the command line besides indices and block vectors."""
    s = alg.size
    out = {"top": Congruence.top(s), "bottom": Congruence.bottom(s)}
    if alg.name.startswith("lattice-prod:"):
        a, b = (int(v) for v in alg.name.split(":")[1].split("x"))
        out["proj1"] = Congruence(tuple(x // b for x in range(s)))  # same first coordinate
        out["proj2"] = Congruence(tuple(x % b for x in range(s)))  # same second coordinate
    return out


# small algebras used by the exhaustive checks, in scan order
CATALOG = ("trivial:1", "lattice-chain:2", "majority2", "z2", "lattice-chain:3", "dualdisc3",
           "zmod:3", "lattice-chain:4", "lattice-prod:2x2", "klein", "zmod:4")


def catalog(max_size: int | None = None) -> list[FiniteAlgebra]:
    algs = [generate(s) for s in CATALOG]
    return [a for a in algs if max_size is None or a.size <= max_size]
