"""Re-checks witness chains from scratch.

Deliberately shares nothing with the builders except the data types: the
relations are rebuilt here as boolean matrices straight from the partitions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .types import (
    ALPHA_BETA,
    ALPHA_GAMMA,
    ALPHA_GAMMA_BETA,
    BETA,
    EQUAL,
    GAMMA,
    NLNChain,
    WitnessChain,
)


@dataclass
class StepCheck:
    index: int
    src: int
    dst: int
    label: str
    ok: bool
    note: str = ""


@dataclass
class ChainReport:
    steps: list = field(default_factory=list)
    invariants: dict = field(default_factory=dict)
    factor_count: int = 0

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.steps) and all(self.invariants.values())

    @property
    def first_failure(self):
        """Index of the first failing step, or the name of the first failing invariant."""
        for s in self.steps:
            if not s.ok:
                return s.index
        for name, ok in self.invariants.items():
            if not ok:
                return name
        return None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "first_failure": self.first_failure,
            "factor_count": self.factor_count,
            "invariants": dict(self.invariants),
        }


class _Rel:
    def __init__(self, alpha, beta, gamma):
        def mat(th):
            p = np.asarray(th.partition)
            return p[:, None] == p[None, :]

        al, be, ga = mat(alpha), mat(beta), mat(gamma)
        self.m = {
            BETA: be,
            GAMMA: ga,
            ALPHA_BETA: al & be,
            ALPHA_GAMMA: al & ga,
            ALPHA_GAMMA_BETA: al & ((ga.astype(int) @ be.astype(int)) > 0),
            "alpha": al,
        }

    def holds(self, label, x, y) -> bool:
        if label == EQUAL:
            return x == y
        return bool(self.m[label][x, y])


def _count(labels) -> int:
    n, prev = 0, None
    for lab in labels:
        if lab == EQUAL or lab == prev:
            continue
        n += 1
        prev = lab
    return n


def validate_chain(alg, chain: WitnessChain, alpha, beta, gamma) -> ChainReport:
    rel = _Rel(alpha, beta, gamma)
    report = ChainReport()
    size = alg.size
    prev = chain.a
    connected = True
    for i, st in enumerate(chain.steps):
        note = ""
        ok = 0 <= st.src < size and 0 <= st.dst < size
        if st.src != prev:
            connected = False
            ok = False
            note = "does not start where the previous step ended"
        if ok:
            ok = rel.holds(st.label, st.src, st.dst)
            if not ok:
                note = f"({st.src}, {st.dst}) not in {st.label}"
        if ok and st.via:
            # composite factor: re-walk the recorded path
            cur = st.src
            for elem, lab in st.via:
                if not rel.holds(lab, cur, elem):
                    ok, note = False, f"inner step ({cur}, {elem}) not in {lab}"
                    break
                cur = elem
            if ok and cur != st.dst:
                ok, note = False, "inner path does not end at the step's target"
        report.steps.append(StepCheck(i, st.src, st.dst, st.label, ok, note))
        prev = st.dst
    report.invariants["connected"] = connected
    report.invariants["endpoints"] = (prev == chain.e) and (
        not chain.steps or chain.steps[0].src == chain.a)
    report.factor_count = _count(s.label for s in chain.steps)
    return report


def validate_nln(alg, ch: NLNChain, alpha, beta, gamma, a=None, c=None) -> ChainReport:
    """Check the alternating pattern, (C1) and (C2) of an n-l-n chain."""
    rel = _Rel(alpha, beta, gamma)
    report = ChainReport()
    seq = list(ch.A) + list(ch.B) + list(ch.C)
    a = seq[0] if a is None else a
    c = seq[-1] if c is None else c
    report.invariants["shape"] = (len(ch.A) == ch.n and len(ch.C) == ch.n and len(ch.B) == ch.ell + 1
                                  and ch.ell >= 0 and ch.ell % 2 == ch.n % 2)
    report.invariants["endpoints"] = bool(seq) and seq[0] == a and seq[-1] == c
    for k in range(len(seq) - 1):
        lab = BETA if k % 2 == 0 else GAMMA
        report.steps.append(StepCheck(k, seq[k], seq[k + 1], lab, rel.holds(lab, seq[k], seq[k + 1])))
    al = rel.m["alpha"]
    report.invariants["C1"] = all(bool(al[u, v]) for u in seq for v in seq)
    c2 = len(ch.from_a) == len(ch.B) and len(ch.to_c) == len(ch.B)
    for j, bj in enumerate(ch.B):
        if not c2:
            break
        for w, start, end in ((ch.from_a[j], a, bj), (ch.to_c[j], bj, c)):
            if len(w) != ch.n + 1 or w[0] != start or w[-1] != end:
                c2 = False
                break
            for k in range(ch.n):
                lab = BETA if k % 2 == 0 else GAMMA
                if not rel.holds(lab, w[k], w[k + 1]):
                    c2 = False
                    break
    report.invariants["C2"] = c2
    report.factor_count = _count("alpha_" + s.label for s in report.steps)
    return report
