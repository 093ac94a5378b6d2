import itertools
import json

import pytest

from jlab.algebra import X, Y, Z, check_equation, closure, eval_term, parse_term, substitute
from jlab.errors import NotFound
from jlab.generators import catalog, generate
from jlab.maltsev import (
    Flavor,
    JonssonSystem,
    distributivity_level,
    find_terms,
    flavor_equations,
    indicator_index,
    jonsson_to_alvin,
    pad,
    pad_to_four,
    verify_system,
)

CD_CATALOG = ["trivial:1", "lattice-chain:2", "majority2", "lattice-chain:3", "dualdisc3",
              "lattice-chain:4", "lattice-prod:2x2", "m3"]


def test_indicator_index_sizes():
    assert indicator_index(generate("trivial:1")) == [(0, 0, 0)]
    two = indicator_index(generate("z2"))
    by_hand = {(a, b, a) for a in range(2) for b in range(2)} | {(a, a, b) for a in range(2) for b in range(2)} \
        | {(a, b, b) for a in range(2) for b in range(2)}
    assert set(two) == by_hand
    # on two elements every triple has one of the shapes: 8 = 3*2^2 - 2*2
    assert len(two) == len(by_hand) == 8
    three = indicator_index(generate("dualdisc3"))
    assert all((a, a, a) in three for a in range(3))
    assert len(three) <= 27


def _is_majority(alg, t):
    return all(eval_term(alg, t, asg) == x
               for x, y in itertools.product(range(alg.size), repeat=2)
               for asg in ((x, x, y), (x, y, x), (y, x, x)))


def test_majority_found_on_two_element_lattice(l2):
    system = find_terms(l2, Flavor.jonsson(2))
    assert verify_system(l2, system).ok
    assert _is_majority(l2, system.term(1))


def test_dual_discriminator_is_its_own_majority_term():
    alg = generate("dualdisc3")
    d = parse_term("d(x,y,z)")
    assert verify_system(alg, JonssonSystem(Flavor.jonsson(2), (d,), alg)).ok
    found = find_terms(alg, Flavor.jonsson(2))
    assert verify_system(alg, found).ok
    assert _is_majority(alg, found.term(1))


@pytest.mark.parametrize("n", range(2, 7))
def test_z2_has_no_jonsson_terms(n):
    with pytest.raises(NotFound):
        find_terms(generate("z2"), Flavor.jonsson(n))


def test_z2_absorbing_term_operations_are_projections():
    # analytic cross-check: ternary term operations of Z2 are the linear forms, and the only ones
    # with x = t(x,y,x) are the projections x and z, which cannot be linked from x to z
    z2 = generate("z2")
    triples = list(itertools.product(range(2), repeat=3))
    seeds = [tuple(t[k] for t in triples) for k in range(3)]
    ops = closure(z2, seeds).elements
    linear = {tuple((a * x + b * y + c * z) % 2 for x, y, z in triples): (a, b, c)
              for a, b, c in itertools.product(range(2), repeat=3)}
    assert set(ops) == set(linear)
    absorbing = {linear[v] for v in ops
                 if all(v[triples.index((x, y, x))] == x for x in range(2) for y in range(2))}
    assert absorbing == {(1, 0, 0), (0, 0, 1)}


@pytest.mark.parametrize("name", ["lattice-chain:2", "dualdisc3"])
def test_pad_to_four(name):
    alg = generate(name)
    j2 = find_terms(alg, Flavor.jonsson(2))
    j4 = pad_to_four(alg, j2)
    assert j4.flavor == Flavor.jonsson(4)
    assert j4.terms[1:] == (Z, Z)
    assert verify_system(alg, j4).ok


def test_trivial_algebra_accepts_anything():
    alg = generate("trivial:1")
    system = JonssonSystem(Flavor.jonsson(4), (X, X, X), alg)
    assert verify_system(alg, system).ok
    assert verify_system(alg, pad_to_four(alg, find_terms(alg, Flavor.jonsson(2)))).ok


def test_projection_candidate_fails_last_link(l2):
    report = verify_system(l2, JonssonSystem(Flavor.jonsson(4), (X, X, X), l2))
    assert not report.ok
    bad = {r.name: r.counterexample for r in report.failures}
    assert "t_3(x,z,z) = z" in bad
    x, _, z = bad["t_3(x,z,z) = z"]
    assert (x, z) == (0, 1)


def _hand_defective(sq):
    t1 = parse_term("join(x,meet(y,z))")
    t2 = parse_term("join(join(x,y),z)")
    t3 = parse_term("join(z,meet(x,y))")
    return (t1, t2, t3)


def test_defective_exemption(sq):
    terms = _hand_defective(sq)
    assert not check_equation(sq, substitute(terms[1], (X, Y, X)), X)
    assert verify_system(sq, JonssonSystem(Flavor.defective4(), terms, sq)).ok
    report = verify_system(sq, JonssonSystem(Flavor.jonsson(4), terms, sq))
    assert [r.name for r in report.failures] == ["x = t_2(x,y,x)"]


def test_defective_search_on_z2():
    z2 = generate("z2")
    system = find_terms(z2, Flavor.defective4())
    assert verify_system(z2, system).ok
    assert not check_equation(z2, substitute(system.term(2), (X, Y, X)), X)


def test_distributivity_levels(l2):
    assert distributivity_level(l2, 6) == 2
    assert distributivity_level(generate("z2"), 6) is None
    assert distributivity_level(generate("trivial:1"), 6) == 2


@pytest.mark.parametrize("name", CD_CATALOG)
def test_every_found_system_verifies(name):
    alg = generate(name)
    for flavor in (Flavor.jonsson(2), Flavor.jonsson(3), Flavor.jonsson(4), Flavor.alvin(4),
                   Flavor.defective4()):
        try:
            system = find_terms(alg, flavor)
        except NotFound:
            continue
        assert verify_system(alg, system).ok
        if flavor.kind == "jonsson":
            assert verify_system(alg, pad(system)).ok


def test_alvin_from_jonsson(sq, sq_j4_search):
    alvin = jonsson_to_alvin(sq_j4_search)
    assert alvin.flavor == Flavor.alvin(6)
    assert list(alvin.indices) == [0, 1, 2, 3, 4]
    assert alvin.term(0) == X and alvin.term(4) == Z
    names = [e.name for e in alvin.equations()]
    assert "x = t_0(x,y,y)" in names and "x = t_0(x,y,x)" in names
    assert "t_0(x,x,z) = t_1(x,x,z)" in names
    assert verify_system(sq, alvin).ok


def test_jonsson_equation_schedule():
    names = [e.name for e in flavor_equations(Flavor.jonsson(4), (X, Y, Z))]
    assert names == ["x = t_1(x,y,x)", "x = t_2(x,y,x)", "x = t_3(x,y,x)", "x = t_1(x,x,z)",
                     "t_1(x,z,z) = t_2(x,z,z)", "t_2(x,x,z) = t_3(x,x,z)", "t_3(x,z,z) = z"]


def test_system_json_round_trip(sq, sq_j4_search):
    data = json.loads(sq_j4_search.dumps())
    assert data["flavor"] == "jonsson" and data["n"] == 4
    assert JonssonSystem.from_json(data, sq) == sq_j4_search
