"""Data types shared by the chain builders and the chain validator."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..algebra import FiniteAlgebra
from ..errors import StepValidationFailed
from ..maltsev import JonssonSystem
from ..relations import Congruence

BETA = "beta"
GAMMA = "gamma"
ALPHA_BETA = "alpha_beta"
ALPHA_GAMMA = "alpha_gamma"
ALPHA_GAMMA_BETA = "alpha_gamma_beta"  # one factor alpha(gamma o beta)
EQUAL = "equal"
LABELS = (BETA, GAMMA, ALPHA_BETA, ALPHA_GAMMA, ALPHA_GAMMA_BETA, EQUAL)

SWAP = {BETA: GAMMA, GAMMA: BETA, ALPHA_BETA: ALPHA_GAMMA, ALPHA_GAMMA: ALPHA_BETA, EQUAL: EQUAL}


@dataclass(frozen=True)
class LabeledStep:
    src: int
    dst: int
    label: str
    justification: str = ""
    display: str = ""  # symbolic form of dst
    via: tuple = ()  # (element, label) sub-steps of a composite factor, ending at dst


def collapse(labels) -> list[str]:
    """Drop ``equal`` and merge runs of identical labels (theta o theta = theta)."""
    out: list[str] = []
    for lab in labels:
        if lab == EQUAL:
            continue
        if out and out[-1] == lab:
            continue
        out.append(lab)
    return out


@dataclass
class WitnessChain:
    """Element sequence from ``a`` to ``e`` with one relation label per step."""

    a: int
    e: int
    steps: list
    start_display: str = "a"
    meta: dict = field(default_factory=dict)

    @property
    def elements(self) -> list[int]:
        return [self.a] + [s.dst for s in self.steps]

    @property
    def factors(self) -> list[str]:
        """Collapsed nominal labels: the relational product the chain certifies."""
        return collapse(s.label for s in self.steps)

    @property
    def factor_count(self) -> int:
        return len(self.factors)

    @property
    def effective_factor_count(self) -> int:
        """Factor count after also dropping steps whose endpoints coincide."""
        return len(collapse(s.label for s in self.steps if s.src != s.dst))

    @property
    def circ_count(self) -> int:
        """Occurrences of composition: one less than the factor count."""
        return max(0, self.factor_count - 1)

    def alternating_length(self, start: str) -> int:
        """Least k such that the chain fits alt_compose(., ., k) starting with ``start``."""
        f = self.factors
        if not f:
            return 1
        return len(f) + (0 if f[0] == start else 1)


@dataclass
class NLNChain:
    """An n-l-n chain A_0..A_{n-1}, B_0..B_l, C_1..C_n with its (C2) witnesses.

    ``from_a[j]`` runs a -> B_j and ``to_c[j]`` runs B_j -> c; each has n+1
    elements alternating beta/gamma starting with beta.
    """

    n: int
    ell: int
    A: list
    B: list
    C: list
    from_a: list
    to_c: list
    reading: str = ""

    @property
    def sequence(self) -> list[int]:
        return list(self.A) + list(self.B) + list(self.C)

    @property
    def a(self) -> int:
        return self.A[0]

    @property
    def c(self) -> int:
        return self.C[-1]

    def names(self) -> list[str]:
        return ([f"A_{i}" for i in range(self.n)] + [f"B_{j}" for j in range(self.ell + 1)]
                + [f"C_{k}" for k in range(1, self.n + 1)])


def alternating_label(k: int) -> str:
    """Label of step ``k`` in a beta-first alternating chain."""
    return BETA if k % 2 == 0 else GAMMA


@dataclass
class ChainContext:
    alg: FiniteAlgebra
    system: JonssonSystem
    alpha: Congruence
    beta: Congruence
    gamma: Congruence
    b: tuple

    def __post_init__(self):
        self.b = tuple(int(v) for v in self.b)
        for th in (self.alpha, self.beta, self.gamma):
            if th.size != self.alg.size:
                raise ValueError("congruence size does not match the algebra")
        if len(self.b) < 2:
            raise ValueError("need at least the two endpoints")

    @property
    def n(self) -> int:
        return len(self.b) - 1

    @property
    def a(self) -> int:
        return self.b[0]

    @property
    def c(self) -> int:
        return self.b[-1]

    def check(self) -> None:
        """The premise: a = b_0 beta b_1 gamma b_2 ... b_n = c and a alpha c."""
        for k in range(self.n):
            th = self.beta if k % 2 == 0 else self.gamma
            if not th.related(self.b[k], self.b[k + 1]):
                raise StepValidationFailed(k, alternating_label(k), f"premise b_{k} -> b_{k + 1}")
        if not self.alpha.related(self.a, self.c):
            raise StepValidationFailed(self.n, "alpha", "premise a alpha c")
