"""Constructive witness chains for 4-distributive and related varieties.

Every builder computes concrete elements of the algebra from the terms of a
system, checks each step against the relation it is supposed to lie in and
raises :class:`StepValidationFailed` on the first step that does not.  The
independent re-check lives in :mod:`jlab.chains.validate`.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import AmbiguousFormula, NoSuchX, StepValidationFailed
from ..maltsev import ALVIN, DEFECTIVE4, JONSSON
from .expr import Evaluator, LinkMismatch, Xe, Xs, a, b, c, d, e, link, mirror, mirror_text, t
from .types import (
    ALPHA_BETA,
    ALPHA_GAMMA,
    ALPHA_GAMMA_BETA,
    BETA,
    EQUAL,
    GAMMA,
    SWAP,
    ChainContext,
    LabeledStep,
    NLNChain,
    WitnessChain,
    alternating_label,
)

AB, AG = ALPHA_BETA, ALPHA_GAMMA

STRICT = "strict"
TRY_ALL = "try-all"


@dataclass(frozen=True)
class Entry:
    expr: object
    label: str | None
    why: str = ""


def _lines(*rows):
    return [Entry(*row) for row in rows]


# a -> F, first half of the F-chain.
L3 = t(1, t(1, a, c, e), t(2, a, c, c), t(2, a, c, e))
F2 = t(2, t(2, a, d, e), t(2, a, c, e), t(2, a, b, e))

FIRST_HALF = _lines(
    (a, None),
    (t(1, a, a, t(2, a, c, e)), EQUAL, "x = t_1(x,x,z)"),
    (t(1, t(1, a, a, e), t(2, a, a, a), t(2, a, c, e)), EQUAL, "x = t_1(x,x,z); t_2(x,x,x) = x"),
    (t(1, t(1, a, b, e), t(2, a, b, b), t(2, a, c, e)), AB, "a beta b"),
    (L3, AG, "b gamma c"),
    (t(1, t(1, a, d, e), t(2, a, c, d), t(2, a, c, e)), AB, "c beta d"),
    (t(1, t(1, a, e, e), t(2, a, c, e), t(2, a, c, e)), AG, "d gamma e"),
    (t(2, t(2, a, e, e), t(2, a, c, e), t(2, a, c, e)), EQUAL, "t_1(x,z,z) = t_2(x,z,z)"),
    (F2, AG, "e gamma d, c gamma b"),
)
L3_POS = 4
L4_POS = 5


def _block(i):
    """F_i -> F_{i+2}, the extension step through t_i, t_{i+1}, t_{i+2} (i even)."""
    j, k = i + 1, i + 2
    return _lines(
        (t(i, t(i, a, d, e), t(i, a, c, e), t(i, a, b, e)), None),
        (t(i, t(i, a, c, e), t(i, a, c, e), t(i, a, a, e)), AB, "d beta c, b beta a"),
        (t(j, t(i, a, c, e), t(i, a, c, e), t(j, a, a, e)), EQUAL, f"t_{i}(x,x,z) = t_{j}(x,x,z)"),
        (t(j, t(i, a, c, e), t(i, b, c, e), t(j, a, b, e)), AB, "a beta b"),
        (t(j, t(i, a, b, e), link(i, j, c, c, e), t(j, a, c, e)), AG, "c gamma b, b gamma c"),
        (t(j, link(i, j, a, a, e), t(j, c, d, e), t(j, a, d, e)), AB, "b beta a, c beta d"),
        (t(j, t(j, a, b, e), t(j, c, d, e), t(j, a, d, e)), AB, "a beta b"),
        (t(j, t(j, a, c, e), link(j, k, b, e, e), link(j, k, a, e, e)), AG, "b gamma c, c gamma b, d gamma e"),
        (t(j, t(j, a, c, e), t(k, b, d, e), t(k, a, d, e)), AG, "e gamma d"),
        (link(j, k, t(j, a, d, e), t(k, a, c, e), t(k, a, c, e)), AB, "c beta d, b beta a, d beta c"),
        (t(k, link(j, k, a, e, e), t(k, a, c, e), t(k, a, c, e)), AG, "d gamma e"),
        (t(k, t(k, a, d, e), t(k, a, c, e), t(k, a, b, e)), AG, "e gamma d, c gamma b"),
    )


# a -> t_1(t_1(a,c,e), t_2(a,c,c), t_2(a,c,e)) for an alvin system (head t_0).
ALVIN_PREFIX = _lines(
    (a, None),
    (t(0, a, t(1, a, b, e), t(1, a, b, e)), EQUAL, "x = t_0(x,y,y)"),
    (t(0, Xs, t(1, a, b, e), t(1, a, c, e)), AG, "a alpha-gamma X, b gamma c"),
    (t(0, t(0, a, a, e), t(1, a, a, e), t(1, a, c, e)), AB, "X alpha-beta t_0(a,a,e), b beta a"),
    (t(0, t(1, a, a, e), t(1, a, a, e), t(1, a, c, e)), EQUAL, "t_0(x,x,z) = t_1(x,x,z)"),
    (t(1, t(1, a, a, e), t(1, a, a, e), t(1, a, c, e)), EQUAL, "t_0(x,x,z) = t_1(x,x,z)"),
    (t(1, t(1, a, b, e), t(1, a, b, e), t(1, a, d, e)), AB, "a beta b, c beta d"),
    (t(1, t(1, a, b, e), t(1, a, b, e), t(1, a, e, e)), AG, "d gamma e"),
    (t(1, t(1, a, b, e), t(1, a, b, e), t(2, a, e, e)), EQUAL, "t_1(x,z,z) = t_2(x,z,z)"),
    (t(1, t(1, a, c, e), t(1, a, c, d), t(2, a, d, e)), AG, "b gamma c, e gamma d"),
    (t(1, t(1, a, c, e), t(1, a, c, c), t(2, a, c, e)), AB, "d beta c"),
    (L3, EQUAL, "t_1(x,z,z) = t_2(x,z,z)"),
)


def _concat(*parts):
    out = list(parts[0])
    for part in parts[1:]:
        if part[0].expr != out[-1].expr:
            raise AssertionError(f"template joint mismatch: {out[-1].expr} vs {part[0].expr}")
        out.extend(part[1:])
    return out


def _mirrored(half, top):
    """The symmetric half: reverse ``half``, mirror its terms and swap beta/gamma."""
    out = [Entry(mirror(half[-1].expr, top), None)]
    for k in range(len(half) - 1, 0, -1):
        out.append(Entry(mirror(half[k - 1].expr, top), SWAP[half[k].label],
                         mirror_text(half[k].why, top)))
    return out


def thm43_template(n_dist):
    parts = [FIRST_HALF]
    for i in range(2, n_dist - 3, 2):
        parts.append(_block(i))
    parts.append(_mirrored(FIRST_HALF, n_dist))
    return _concat(*parts)


def thm44_template(n):
    """Alvin(n+2) chain with terms t_0..t_n."""
    head = _concat(ALVIN_PREFIX, FIRST_HALF[L3_POS:])
    parts = [head]
    for i in range(2, n - 3, 2):
        parts.append(_block(i))
    parts.append(_mirrored(head, n))
    return _concat(*parts)


# ---------------------------------------------------------------------------
# evaluation and step checks
# ---------------------------------------------------------------------------


def _in(ctx: ChainContext, x, y, label) -> bool:
    if label == EQUAL:
        return x == y
    if label == BETA:
        return ctx.beta.related(x, y)
    if label == GAMMA:
        return ctx.gamma.related(x, y)
    if label == ALPHA_BETA:
        return ctx.alpha.related(x, y) and ctx.beta.related(x, y)
    if label == ALPHA_GAMMA:
        return ctx.alpha.related(x, y) and ctx.gamma.related(x, y)
    raise ValueError(label)


def _evaluate(ctx, template, env):
    ev = Evaluator(ctx.system, env)
    values = []
    for k, entry in enumerate(template):
        try:
            values.append(ev(entry.expr))
        except LinkMismatch as exc:
            raise StepValidationFailed(max(k - 1, 0), EQUAL, str(exc)) from None
    return values


def _steps(ctx, template, values):
    steps = []
    for k in range(1, len(template)):
        entry = template[k]
        x, y = values[k - 1], values[k]
        if not _in(ctx, x, y, entry.label):
            raise StepValidationFailed(k - 1, entry.label, f"{template[k - 1].expr} -> {entry.expr}: {x} -> {y}")
        steps.append(LabeledStep(x, y, entry.label, entry.why, str(entry.expr)))
    return steps


def _env(ctx):
    if ctx.n != 4:
        raise ValueError("this construction needs a = b_0 beta b_1 gamma b_2 beta b_3 gamma b_4 = e")
    return dict(zip("abcde", ctx.b))


def _require_flavor(ctx, kind, n=None):
    fl = ctx.system.flavor
    if fl.kind != kind or (n is not None and fl.n != n):
        raise ValueError(f"construction needs a {kind}{'' if n is None else f'({n})'} system, got {fl}")


def thm22_chain(ctx: ChainContext, defective: bool = False) -> WitnessChain:
    """The F-chain: (a, e) in alpha-beta o alpha-gamma o ... with 8 factors.

    With ``defective`` the system only needs the defective 4-Jónsson
    equations; the premise then also asks a alpha c, and the four middle
    steps through F form one alpha(gamma o beta) factor (7 factors in all).
    """
    fl = ctx.system.flavor
    if defective:
        if fl.kind not in (JONSSON, DEFECTIVE4) or fl.n != 4:
            raise ValueError(f"defective construction needs a 4-term system, got {fl}")
    else:
        _require_flavor(ctx, JONSSON, 4)
    env = _env(ctx)
    ctx.check()
    if not defective:
        chain = _build(ctx, thm43_template(4), env, "thm22")
        return chain
    if not ctx.alpha.related(env["a"], env["c"]):
        raise StepValidationFailed(2, "alpha", "premise a alpha c")
    return _build_defective(ctx, env)


def _build(ctx, template, env, name):
    values = _evaluate(ctx, template, env)
    steps = _steps(ctx, template, values)
    return WitnessChain(values[0], values[-1], steps, str(template[0].expr), meta={"construction": name})


def _build_defective(ctx, env):
    template = thm43_template(4)
    values = _evaluate(ctx, template, env)
    last = len(template) - 1
    lo, hi = L4_POS, last - L4_POS  # L4 and its mirror image
    steps = _steps(ctx, template[: lo + 1], values[: lo + 1])
    via = []
    for k in range(lo + 1, hi + 1):
        plain = {AB: BETA, AG: GAMMA}.get(template[k].label, template[k].label)
        if not _in(ctx, values[k - 1], values[k], plain):
            raise StepValidationFailed(lo, ALPHA_GAMMA_BETA, f"inner step {template[k].expr} not {plain}")
        via.append((values[k], plain))
    if not ctx.alpha.related(values[lo], values[hi]):
        raise StepValidationFailed(lo, ALPHA_GAMMA_BETA, "ends of the middle factor not alpha-related")
    steps.append(LabeledStep(values[lo], values[hi], ALPHA_GAMMA_BETA,
                             f"via F = {template[(lo + hi) // 2].expr}", str(template[hi].expr), tuple(via)))
    tail = _steps(ctx, template[hi:], values[hi:])
    steps.extend(tail)
    return WitnessChain(values[0], values[-1], steps, "a", meta={"construction": "thm23"})


def thm43_chain(ctx: ChainContext) -> WitnessChain:
    """Extended F-chain for Jonsson(n) with n even >= 4: at most 3n - 4 factors."""
    fl = ctx.system.flavor
    if fl.kind != JONSSON or fl.n < 4 or fl.n % 2:
        raise ValueError(f"construction needs a Jonsson(n) system with n even >= 4, got {fl}")
    env = _env(ctx)
    ctx.check()
    chain = _build(ctx, thm43_template(fl.n), env, "thm43")
    chain.meta["n_dist"] = fl.n
    return chain


def _search_x(ctx, start, first, second, target):
    for x in ctx.alg.universe:
        if _in(ctx, start, x, first) and _in(ctx, x, target, second):
            return x
    return None


def thm44_chain(ctx: ChainContext, x: int | None = None, x_end: int | None = None) -> WitnessChain:
    """Chain for an alvin system t_0..t_n (n even >= 4): 3n - 2 factors, first alpha-gamma.

    ``x`` must satisfy a (alpha gamma) x (alpha beta) t_0(a,a,e); ``x_end`` is
    its mirror image, e (alpha beta) x_end (alpha gamma) t_n(a,e,e).  Either is
    searched for by brute force when omitted.
    """
    fl = ctx.system.flavor
    n = fl.n - 2
    if fl.kind != ALVIN or n < 4 or n % 2:
        raise ValueError(f"construction needs an Alvin(n+2) system with n even >= 4, got {fl}")
    env = _env(ctx)
    ctx.check()
    s = ctx.alg.size
    t0 = ctx.system.table(0).reshape(-1).tolist()
    tn = ctx.system.table(n).reshape(-1).tolist()
    av, ev = env["a"], env["e"]
    head = t0[(av * s + av) * s + ev]
    tail = tn[(av * s + ev) * s + ev]
    if x is None:
        x = _search_x(ctx, av, ALPHA_GAMMA, ALPHA_BETA, head)
        if x is None:
            raise NoSuchX(f"no X with a alpha-gamma X alpha-beta t_0(a,a,e) = {head}")
    if x_end is None:
        x_end = _search_x(ctx, ev, ALPHA_BETA, ALPHA_GAMMA, tail)
        if x_end is None:
            raise NoSuchX(f"no X' with e alpha-beta X' alpha-gamma t_n(a,e,e) = {tail}")
    env["X"], env["X'"] = x, x_end
    template = thm44_template(n)
    values = _evaluate(ctx, template, env)
    # the prefix must land exactly on the third line of the F-chain
    third = Evaluator(ctx.system, env)(L3)
    pos = len(ALVIN_PREFIX) - 1
    if values[pos] != third:
        raise StepValidationFailed(pos - 1, EQUAL, f"prefix ends at {values[pos]}, third line is {third}")
    steps = _steps(ctx, template, values)
    chain = WitnessChain(values[0], values[-1], steps, "a",
                         meta={"construction": "thm44", "n": n, "X": x, "X'": x_end,
                               "prefix_end": pos, "third_line": third})
    return chain


# ---------------------------------------------------------------------------
# n-l-n chains
# ---------------------------------------------------------------------------


class _Terms:
    def __init__(self, system):
        s = system.algebra.size
        self.s = s
        self.tabs = {i: system.table(i).reshape(-1).tolist() for i in system.indices}

    def __call__(self, i, x, y, z):
        s = self.s
        return self.tabs[i][(x * s + y) * s + z]


def _nln_problems(ctx, ch: NLNChain):
    """First violated invariant of ``ch`` as ``(where, expected)``, or None."""
    seq = ch.sequence
    names = ch.names()
    if len(seq) != 2 * ch.n + ch.ell + 1:
        return ("shape", "2n + l + 1 elements")
    if seq[0] != ctx.a or seq[-1] != ctx.c:
        return ("endpoints", "A_0 = a, C_n = c")
    for k in range(len(seq) - 1):
        lab = alternating_label(k)
        if not _in(ctx, seq[k], seq[k + 1], lab):
            return (f"{names[k]} -> {names[k + 1]}", lab)
    for k, v in enumerate(seq):
        if not ctx.alpha.related(ctx.a, v):
            return (f"(C1) {names[k]}", "alpha")
    for j in range(ch.ell + 1):
        for tag, w, start, end in (("a", ch.from_a[j], ctx.a, ch.B[j]), ("c", ch.to_c[j], ch.B[j], ctx.c)):
            if len(w) != ch.n + 1 or w[0] != start or w[-1] != end:
                return (f"(C2) witness {tag} for B_{j}", "endpoints")
            for k in range(ch.n):
                if not _in(ctx, w[k], w[k + 1], alternating_label(k)):
                    return (f"(C2) witness {tag} for B_{j} step {k}", alternating_label(k))
    return None


def _require_nln(ctx, ch):
    bad = _nln_problems(ctx, ch)
    if bad is not None:
        raise StepValidationFailed(bad[0], bad[1])


def initial_chain(ctx: ChainContext) -> NLNChain:
    """The n-(n-2)-n chain A_i = t_1(a,b_i,c), B_j = t_2(a,b_{n-1-j},c), C_i = t_3(a,b_i,c)."""
    _require_flavor(ctx, JONSSON, 4)
    n = ctx.n
    if n < 2 or (n % 2 and n < 3):
        raise ValueError("n must be at least 2 (at least 3 when odd)")
    ctx.check()
    tt = _Terms(ctx.system)
    bs, av, cv = ctx.b, ctx.a, ctx.c
    A = [tt(1, av, bs[i], cv) for i in range(n)]
    B = [tt(2, av, bs[n - 1 - j], cv) for j in range(n - 1)]
    C = [tt(3, av, bs[i], cv) for i in range(1, n + 1)]
    from_a, to_c = [], []
    for j in range(n - 1):
        p = n - 1 - j
        from_a.append([tt(2, av, bs[min(i, p)], bs[i]) for i in range(n + 1)])
        to_c.append([tt(2, bs[i], bs[max(i, p)], cv) for i in range(n + 1)])
    ch = NLNChain(n, n - 2, A, B, C, from_a, to_c, reading="initial")
    _require_nln(ctx, ch)
    return ch


def _even_candidates(ell):
    primary = ("B'_0 = t_2(B_0, B_{l-1}, B_l)", (0, ell - 1, ell))
    listed = ("B'_0 = t_2(B_0, B_{l-1}, B_{l-1})", (0, ell - 1, ell - 1))
    out = []
    for head_name, head in (("C'_i = t_3(B_1, Y_i, C_i)", 1), ("C'_i = t_3(B_0, Y_i, C_i)", 0)):
        for b0_name, b0 in (primary, listed):
            out.append((f"{b0_name}; {head_name}", b0, head))
    return out


def _reduce_with(ctx, ch, tt, b0_triple, head, odd):
    n, ell = ch.n, ch.ell
    B = ch.B
    X = ch.from_a[ell - 1]
    Y = ch.to_c[head]
    A2 = [tt(1, ch.A[i], X[i], B[ell - 1]) for i in range(n)]
    triples = [b0_triple]
    for j in range(1, ell - 1):
        triples.append((0, ell - 2 - j, ell) if odd else (0, ell - 1 - j, ell))
    B2 = [tt(2, B[p], B[q], B[r]) for p, q, r in triples]
    C2 = [tt(3, B[head], Y[i], ch.C[i - 1]) for i in range(1, n + 1)]
    from_a = [[tt(2, ch.from_a[p][i], ch.from_a[q][i], ch.from_a[r][i]) for i in range(n + 1)]
              for p, q, r in triples]
    to_c = [[tt(2, ch.to_c[p][i], ch.to_c[q][i], ch.to_c[r][i]) for i in range(n + 1)]
            for p, q, r in triples]
    return NLNChain(n, ell - 2, A2, B2, C2, from_a, to_c)


def reduce_chain(ctx: ChainContext, ch: NLNChain, policy: str = TRY_ALL) -> NLNChain:
    """One reduction step: an n-l-n chain becomes an n-(l-2)-n chain.

    For even n the formulas admit several readings (the definition of B'_0
    and the first argument of C'_i); they are tried in a fixed order and the
    reading that validated is recorded on the result.
    """
    odd = ch.n % 2 == 1
    if odd and ch.ell < 3:
        raise ValueError("odd chains stop at l = 1: B_{l-2} is undefined")
    if not odd and ch.ell < 2:
        raise ValueError("nothing to reduce at l = 0")
    tt = _Terms(ctx.system)
    if odd:
        ell = ch.ell
        candidates = [("B'_0 = t_2(B_0, B_{l-2}, B_{l-1}); C'_i = t_3(B_0, Y_i, C_i)", (0, ell - 2, ell - 1), 0)]
    else:
        candidates = _even_candidates(ch.ell)
    if policy == STRICT:
        candidates = candidates[:1]
    failures = []
    for name, triple, head in candidates:
        new = _reduce_with(ctx, ch, tt, triple, head, odd)
        bad = _nln_problems(ctx, new)
        if bad is None:
            new.reading = name
            return new
        failures.append((name, bad))
    if len(candidates) == 1:
        name, (where, expected) = failures[0]
        raise StepValidationFailed(where, expected, f"reading {name}")
    raise AmbiguousFormula([(name, f"{where} not {expected}") for name, (where, expected) in failures])


def reduction_steps(ctx: ChainContext, policy: str = TRY_ALL):
    """Yield the initial chain and every reduced chain down to l = 0 (even) or l = 1 (odd)."""
    ch = initial_chain(ctx)
    yield ch
    stop = 1 if ch.n % 2 else 0
    while ch.ell > stop:
        nxt = reduce_chain(ctx, ch, policy)
        if nxt.ell != ch.ell - 2:
            raise AssertionError("reduction must lower l by exactly 2")
        ch = nxt
        yield ch


def flatten(ch: NLNChain) -> WitnessChain:
    """(C1) upgrades every beta/gamma step to alpha-beta/alpha-gamma."""
    seq, names = ch.sequence, ch.names()
    steps = []
    for k in range(len(seq) - 1):
        lab = AB if k % 2 == 0 else AG
        steps.append(LabeledStep(seq[k], seq[k + 1], lab, f"{names[k]} -> {names[k + 1]}", names[k + 1]))
    return WitnessChain(seq[0], seq[-1], steps, "A_0")


def full_reduction(ctx: ChainContext, policy: str = TRY_ALL) -> WitnessChain:
    history = list(reduction_steps(ctx, policy))
    final = history[-1]
    chain = flatten(final)
    chain.meta.update({
        "construction": "full-reduction",
        "n": final.n,
        "ell": [h.ell for h in history],
        "readings": [h.reading for h in history],
        "final_ell": final.ell,
    })
    return chain
