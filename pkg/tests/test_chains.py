import dataclasses
import itertools

import pytest

from jlab.algebra import parse_term
from jlab.chains import (
    STRICT,
    TRY_ALL,
    ChainContext,
    LabeledStep,
    NLNChain,
    WitnessChain,
    flatten,
    full_reduction,
    initial_chain,
    reduce_chain,
    reduction_steps,
    thm22_chain,
    thm43_chain,
    thm44_chain,
    validate_chain,
    validate_nln,
)
from jlab.chains.expr import mirror_text
from jlab.chains.report import chain_dumps, chain_to_json, render_text
from jlab.chains.types import ALPHA_BETA, ALPHA_GAMMA, ALPHA_GAMMA_BETA, EQUAL, collapse
from jlab.errors import AmbiguousFormula, NoSuchX, StepValidationFailed
from jlab.maltsev import Flavor, JonssonSystem, jonsson_to_alvin, pad
from jlab.relations import Congruence, alt_compose, intersect

from oracles import alternating_chains


def chains_of(alg, n, al, be, ga):
    return list(alternating_chains(alg.size, n, al.partition, be.partition, ga.partition))


@pytest.fixture(scope="module")
def triple(sq_names):
    return sq_names["top"], sq_names["proj1"], sq_names["proj2"]


def test_degenerate_chain_has_only_trivial_steps(sq, sq_j4, triple):
    ctx = ChainContext(sq, sq_j4, *triple, (2, 2, 2, 2, 2))
    ch = thm22_chain(ctx)
    assert set(ch.elements) == {2}
    assert ch.effective_factor_count == 0
    assert validate_chain(sq, ch, *triple).ok


@pytest.mark.parametrize("system", ["sq_j4", "sq_j4_search"])
def test_f_chain_on_square(sq, triple, system, request):
    sysm = request.getfixturevalue(system)
    al, be, ga = triple
    rhs8 = alt_compose(intersect(al.rel, be.rel), intersect(al.rel, ga.rel), 8)
    seen = 0
    for b in chains_of(sq, 4, al, be, ga):
        ch = thm22_chain(ChainContext(sq, sysm, al, be, ga, b))
        report = validate_chain(sq, ch, al, be, ga)
        assert report.ok, report.first_failure
        assert ch.factor_count <= 8
        assert (ch.a, ch.e) == (b[0], b[4])
        assert (ch.a, ch.e) in rhs8
        seen += 1
    assert seen == 64


def test_f_chain_with_trivial_gamma(sq, sq_j4_search, sq_names):
    al, be, ga = sq_names["top"], sq_names["proj1"], sq_names["bottom"]
    for b in chains_of(sq, 4, al, be, ga):
        ch = thm22_chain(ChainContext(sq, sq_j4_search, al, be, ga, b))
        assert validate_chain(sq, ch, al, be, ga).ok
        assert all(st.src == st.dst for st in ch.steps if st.label == ALPHA_GAMMA)
        assert collapse(st.label for st in ch.steps if st.src != st.dst) in ([], [ALPHA_BETA])
        assert be.related(ch.a, ch.e)


def test_mirrored_justifications():
    assert mirror_text("d gamma e", 4) == "b beta a"
    assert mirror_text("x = t_1(x,x,z)", 4) == "z = t_3(x,z,z)"
    assert mirror_text("t_1(x,z,z) = t_2(x,z,z)", 4) == "t_3(x,x,z) = t_2(x,x,z)"


def test_corrupted_system_is_rejected(sq, triple):
    # t_2 = x violates the link t_1(x,z,z) = t_2(x,z,z) for the majority-based t_1
    bad = JonssonSystem(Flavor.jonsson(4), (parse_term("meet(meet(join(x,y),join(x,z)),join(y,z))"),
                                            parse_term("x"), parse_term("z")), sq)
    b = (0, 1, 3, 3, 3)
    with pytest.raises(StepValidationFailed) as info:
        thm22_chain(ChainContext(sq, bad, *triple, b))
    assert info.value.step is not None


def test_premise_is_checked(sq, sq_j4, triple):
    with pytest.raises(StepValidationFailed):
        thm22_chain(ChainContext(sq, sq_j4, *triple, (0, 3, 3, 3, 3)))  # 0, 3 not beta-related


# -- defective variant --------------------------------------------------------

def _defective(sq):
    terms = tuple(parse_term(t) for t in ("join(x,meet(y,z))", "join(join(x,y),z)", "join(z,meet(x,y))"))
    return JonssonSystem(Flavor.defective4(), terms, sq)


def test_defective_chain(sq, triple):
    system = _defective(sq)
    al, be, ga = triple
    for b in chains_of(sq, 4, al, be, ga):
        ch = thm22_chain(ChainContext(sq, system, al, be, ga, b), defective=True)
        report = validate_chain(sq, ch, al, be, ga)
        assert report.ok
        assert ch.factors == [ALPHA_BETA, ALPHA_GAMMA, ALPHA_BETA, ALPHA_GAMMA_BETA,
                              ALPHA_GAMMA, ALPHA_BETA, ALPHA_GAMMA]
        composite = [s for s in ch.steps if s.label == ALPHA_GAMMA_BETA]
        assert len(composite) == 1 and composite[0].via


def test_defective_needs_a_alpha_c(sq, sq_names):
    al, be, ga = sq_names["proj1"], sq_names["top"], sq_names["top"]
    with pytest.raises(StepValidationFailed):
        thm22_chain(ChainContext(sq, _defective(sq), al, be, ga, (0, 0, 2, 2, 1)), defective=True)


# -- n-l-n chains ----------------------------------------------------------------

def test_initial_chain_two(sq, sq_j4_search, triple):
    for b in chains_of(sq, 2, *triple):
        ctx = ChainContext(sq, sq_j4_search, *triple, b)
        ch = initial_chain(ctx)
        assert ch.ell == 0 and len(ch.B) == 1
        assert validate_nln(sq, ch, *triple).ok
        assert flatten(ch).factor_count == 4


def test_initial_chain_four(sq, sq_j4_search, triple):
    for b in chains_of(sq, 4, *triple):
        ch = initial_chain(ChainContext(sq, sq_j4_search, *triple, b))
        assert (ch.n, ch.ell) == (4, 2)
        assert validate_nln(sq, ch, *triple).ok


def test_initial_chain_constant(sq, sq_j4_search, triple):
    ch = initial_chain(ChainContext(sq, sq_j4_search, *triple, (1,) * 5))
    assert set(ch.sequence) == {1}
    assert validate_nln(sq, ch, *triple).ok


def test_even_reduction_from_two(sq, sq_j4_search, triple):
    tt = lambda i, x, y, z: int(sq_j4_search.table(i)[x, y, z])
    for b in chains_of(sq, 4, *triple):
        ctx = ChainContext(sq, sq_j4_search, *triple, b)
        ch = initial_chain(ctx)
        new = reduce_chain(ctx, ch)
        assert new.ell == 0
        assert new.B[0] == tt(2, ch.B[0], ch.B[1], ch.B[2])
        assert validate_nln(sq, new, *triple).ok  # covers A'_{n-1} gamma B'_0 beta C'_1
        assert new.reading


def test_odd_reduction_stops_at_one(sq, sq_j4_search, triple):
    for b in chains_of(sq, 5, *triple)[:40]:
        ctx = ChainContext(sq, sq_j4_search, *triple, b)
        ch = initial_chain(ctx)
        assert ch.ell == 3
        new = reduce_chain(ctx, ch)
        assert new.ell == 1
        assert validate_nln(sq, new, *triple).ok
        with pytest.raises(ValueError):
            reduce_chain(ctx, new)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_full_reduction_counts(sq, sq_j4_search, triple, n):
    al, be, ga = triple
    for b in chains_of(sq, n, al, be, ga)[::7]:
        ctx = ChainContext(sq, sq_j4_search, al, be, ga, b)
        history = list(reduction_steps(ctx))
        ells = [h.ell for h in history]
        assert ells == list(range(n - 2, -1 if n % 2 == 0 else 0, -2))
        for h in history:
            assert validate_nln(sq, h, al, be, ga).ok
        ch = full_reduction(ctx)
        assert validate_chain(sq, ch, al, be, ga).ok
        assert ch.factor_count == (2 * n if n % 2 == 0 else 2 * n + 1)
        assert ch.meta["final_ell"] == n % 2


def test_strict_policy_records_primary_reading(sq, sq_j4_search, triple):
    b = chains_of(sq, 6, *triple)[-1]
    ch = full_reduction(ChainContext(sq, sq_j4_search, *triple, b), policy=STRICT)
    assert all("B_{l-1}, B_l)" in r for r in ch.meta["readings"][1:])


def test_all_readings_failing_is_loud(sq, sq_j4_search, triple):
    for b in chains_of(sq, 4, *triple):
        ctx = ChainContext(sq, sq_j4_search, *triple, b)
        ch = initial_chain(ctx)
        if any(v != ch.a for v in ch.B):
            break
    # witnesses for (a, B_j) that stand still never reach B_j: no reading can repair that
    broken = dataclasses.replace(ch, from_a=[[w[0]] * len(w) for w in ch.from_a])
    assert not validate_nln(sq, broken, *triple).ok
    with pytest.raises((AmbiguousFormula, StepValidationFailed)):
        reduce_chain(ctx, broken, TRY_ALL)
    with pytest.raises(StepValidationFailed):
        reduce_chain(ctx, broken, STRICT)


# -- extensions ------------------------------------------------------------------

def test_extension_at_four_is_f_chain(sq, sq_j4_search, triple):
    for b in chains_of(sq, 4, *triple):
        ctx = ChainContext(sq, sq_j4_search, *triple, b)
        c22, c43 = thm22_chain(ctx), thm43_chain(ctx)
        assert c22.elements == c43.elements
        assert c22.factors == c43.factors


def test_extension_at_six(sq, sq_j4_search, triple):
    j6 = pad(sq_j4_search)
    for b in chains_of(sq, 4, *triple):
        ch = thm43_chain(ChainContext(sq, j6, *triple, b))
        assert validate_chain(sq, ch, *triple).ok
        assert ch.factor_count <= 14


def test_extension_degenerate(sq, sq_j4_search, triple):
    ch = thm43_chain(ChainContext(sq, pad(sq_j4_search), *triple, (3,) * 5))
    assert ch.effective_factor_count == 0


def test_alvin_chain(sq, sq_j4_search, triple):
    alvin = jonsson_to_alvin(sq_j4_search)
    for b in chains_of(sq, 4, *triple):
        ch = thm44_chain(ChainContext(sq, alvin, *triple, b))
        assert validate_chain(sq, ch, *triple).ok
        assert ch.factor_count <= 3 * 4 - 2
        assert ch.factors[0] == ALPHA_GAMMA and ch.factors[-1] == ALPHA_BETA
        assert ch.elements[ch.meta["prefix_end"]] == ch.meta["third_line"]


def test_alvin_with_projection_head(sq, sq_j4, triple):
    alvin = jonsson_to_alvin(sq_j4)  # t_0 = x, so t_0(a,a,e) = a and X = a works
    for b in chains_of(sq, 4, *triple):
        ch = thm44_chain(ChainContext(sq, alvin, *triple, b), x=b[0])
        assert validate_chain(sq, ch, *triple).ok


def test_alvin_degenerate_and_missing_x(sq, sq_j4, sq_names):
    alvin = jonsson_to_alvin(sq_j4)
    top = sq_names["top"]
    ch = thm44_chain(ChainContext(sq, alvin, top, top, top, (0,) * 5))
    assert ch.effective_factor_count == 0



def test_alvin_bad_or_missing_x(sq, sq_j4, triple, monkeypatch):
    alvin = jonsson_to_alvin(sq_j4)
    b = (0, 1, 3, 2, 0)
    with pytest.raises(StepValidationFailed):
        thm44_chain(ChainContext(sq, alvin, *triple, b), x=3)  # 0 and 3 are not gamma-related
    original = JonssonSystem.table

    def skewed(self, i):
        tab = original(self, i)
        if i == 0:
            tab = tab.copy()
            tab[0, 0, 0] = 3  # t_0(a,a,e) moved out of reach
        return tab

    monkeypatch.setattr(JonssonSystem, "table", skewed)
    with pytest.raises(NoSuchX):
        thm44_chain(ChainContext(sq, alvin, triple[0], Congruence.bottom(4), Congruence.bottom(4),
                                 (0,) * 5))


# -- validator -------------------------------------------------------------------

def test_mutations_are_located(sq, sq_j4_search, triple):
    b = (0, 1, 3, 2, 2)
    ch = thm22_chain(ChainContext(sq, sq_j4_search, *triple, b))
    for k, st in enumerate(ch.steps):
        for v in range(4):
            if v == st.dst:
                continue
            steps = list(ch.steps)
            steps[k] = dataclasses.replace(st, dst=v)
            if k + 1 < len(steps):
                steps[k + 1] = dataclasses.replace(steps[k + 1], src=v)
            mutated = WitnessChain(ch.a, ch.e if k + 1 < len(steps) else v, steps)
            report = validate_chain(sq, mutated, *triple)
            ok_k = report.steps[k].ok
            ok_next = report.steps[k + 1].ok if k + 1 < len(steps) else True
            assert not (ok_k and ok_next) or report.ok  # some mutations happen to stay valid
            if not report.ok:
                assert report.first_failure in (k, k + 1)


def test_collapse_matches_relation_products(sq, triple):
    al, be, ga = triple
    steps = [LabeledStep(0, 1, ALPHA_BETA), LabeledStep(1, 1, ALPHA_BETA), LabeledStep(1, 0, ALPHA_BETA),
             LabeledStep(0, 2, ALPHA_GAMMA), LabeledStep(2, 2, EQUAL)]
    ch = WitnessChain(0, 2, steps)
    report = validate_chain(sq, ch, al, be, ga)
    assert report.ok and report.factor_count == ch.factor_count == 2
    ab, ag = intersect(al.rel, be.rel), intersect(al.rel, ga.rel)
    assert (0, 2) in alt_compose(ab, ag, 2)


def test_reports(sq, sq_j4_search, triple):
    ch = thm22_chain(ChainContext(sq, sq_j4_search, *triple, (0, 1, 3, 2, 2)))
    report = validate_chain(sq, ch, *triple)
    data = chain_to_json(ch, report)
    assert data["factor_count"] == 8 and data["validation"]["ok"]
    assert all(set(s) >= {"from", "to", "label", "justification", "ok"} for s in data["steps"])
    text = render_text(ch, report)
    assert "factor_count: 8" in text and "validation: ok" in text
    assert chain_dumps(ch, report) == chain_dumps(ch, report)
