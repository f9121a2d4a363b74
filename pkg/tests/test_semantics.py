from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from strategies import formulas
from ucml.deduction import random_coalgebra
from ucml.functors import ID, Const, Coprod, Plaus, Poss, Prob, Prod, Upper, ingredients
from ucml.logic import BOT, TOP, cmp, conj, neg, parse_formula, print_formula
from ucml.models import load_model
from ucml.semantics import (attained_values, candidate_formulas, default_probes, description_set, interpret,
                            sample_elements, satisfies, valid_in_model)

PHI = "[next][(1/2,2/5)][pr2]!{b,c}"


def pts(I):
    return set(I.points)


def test_constant_and_projection_steps(worked):
    assert pts(interpret(parse_formula("!{b,c}", worked.T), worked)) == {"a"}
    got = pts(interpret(parse_formula("[pr2]!{b,c}", worked.T), worked))
    assert got == {(s, "a") for s in "xyzt"}


def test_top_is_everything(worked):
    for S in ingredients(worked.T):
        if S != worked.T:
            I = interpret(parse_formula("top", worked.T, S), worked)
            assert len(I.points) == len(I.space.carrier)


def test_next_index_formulas(worked):
    assert pts(interpret(parse_formula(PHI, worked.T), worked)) == set()
    assert pts(interpret(parse_formula("[next][(1/2,1/2)][pr2]{b,c}", worked.T), worked)) == {"z", "t"}
    assert pts(interpret(parse_formula("[next] U>=3/5 [pr2]!{b,c}", worked.T), worked)) == {"x", "y"}


def test_measure_satisfaction(worked):
    P1, P2 = worked.element("P1"), worked.element("P2")
    assert satisfies(P1, parse_formula("U>=3/5 [pr2]!{b,c}", worked.T), worked)
    assert not satisfies(P1, parse_formula("U>3/5 [pr2]!{b,c}", worked.T), worked)
    assert not satisfies(P2, parse_formula("U>=1/2 [pr2]!{b,c}", worked.T), worked)
    assert satisfies(P1, parse_formula("[(0,0)]bot", worked.T), worked)
    for x in "xyzt":
        f = parse_formula("[next]U>=1/2[pr2]{a}", worked.T)
        g = parse_formula("U>=1/2[pr2]{a}", worked.T)
        assert satisfies(x, f, worked) == satisfies(worked.alpha[x], g, worked)


def test_validity_examples(worked):
    assert valid_in_model(parse_formula("top", worked.T, ID), worked)
    r = valid_in_model(parse_formula(PHI, worked.T), worked)
    assert not r.valid and r.regime == "exhaustive"
    r = valid_in_model(parse_formula("U<=1/4 [pr2]{a} -> U<1/2 [pr2]{a}", worked.T), worked)
    assert r.valid and r.regime == "reachable+probes" and r.checked > 2
    r = valid_in_model(parse_formula("U>=1/2 [pr2]{a}", worked.T), worked)
    assert not r.valid


def test_attained_values(worked):
    want = {F(0), F(1, 10), F(1, 5), F(1, 4), F(3, 10), F(2, 5), F(1, 2), F(3, 5), F(7, 10), F(3, 4),
            F(4, 5), F(9, 10), F(1)}
    assert set(attained_values(worked)) == want


def test_description_sets_of_running_model(worked):
    d = description_set("a", 0, None, worked, sort="M")
    texts = {print_formula(f) for f in d.formulas}
    assert {"{a}", "!{b,c}", "top"} <= texts
    assert "{b,c}" not in texts
    for depth in range(3):
        assert description_set("x", depth, None, worked).formulas == description_set("y", depth, None, worked).formulas
        assert description_set("x", depth, None, worked).formulas == description_set("z", depth, None, worked).formulas
    dx = description_set("x", 3, None, worked)
    dz = description_set("z", 3, None, worked)
    sep = parse_formula("[next]U>=1/2[pr2]!{b,c}", worked.T).formula
    assert sep in dx and sep not in dz


def test_measures_separated_at_two_modalities_with_half_grid(worked):
    P1, P2 = worked.element("P1"), worked.element("P2")
    d1 = description_set(P1, 2, [F(1, 2)], worked, sort=worked.T)
    d2 = description_set(P2, 2, [F(1, 2)], worked, sort=worked.T)
    f = parse_formula("U>=1/2 [pr2]!{b,c}", worked.T).formula
    assert f in d1 and f not in d2


def test_description_set_is_exactly_the_satisfied_candidates(worked):
    d = description_set("z", 2, [F(1, 2)], worked)
    cands = candidate_formulas(ID, 2, [F(1, 2)], worked.T)
    assert set(d.formulas) == {f for f in cands if satisfies("z", f, worked, ID)}


def test_coproduct_box_includes_other_summand():
    text = """
    space M { points a b c; gen {a}; }
    space X { points x y; gen {x}; }
    functor T = Id + Const(M);
    alpha { x: in1(y); y: in2(a); }
    """
    m = load_model(text)
    S = Coprod(ID, m.T.right)
    I = interpret(parse_formula("[in1]bot", m.T, S), m)
    assert pts(I) == {p for p in I.space.carrier if p.side == 2}
    I = interpret(parse_formula("[next][in2]{a}", m.T), m)
    assert pts(I) == {"x", "y"}
    I = interpret(parse_formula("[next][in1]bot", m.T), m)
    assert pts(I) == {"y"}


# properties over the running model

@settings(max_examples=120, deadline=None)
@given(st.data())
def test_boolean_clauses_and_route_agreement(worked, data):
    S = data.draw(st.sampled_from([ID, worked.T.arg, worked.T.arg.right]))
    f = data.draw(formulas(worked.T, S, 4))
    g = data.draw(formulas(worked.T, S, 3))
    I = interpret(parse_formula(print_formula(f), worked.T, S), worked)
    J = interpret(parse_formula(print_formula(g), worked.T, S), worked)
    carrier = set(I.space.carrier)
    assert pts(interpret(parse_formula(print_formula(neg(f)), worked.T, S), worked)) == carrier - pts(I)
    assert pts(interpret(parse_formula(print_formula(conj(f, g)), worked.T, S), worked)) == pts(I) & pts(J)
    for p in carrier:
        assert satisfies(p, f, worked, S) == (p in I)


FUNCTORS = [
    Upper(Prod(ID, Const("M"))), Prob(ID), Plaus(Coprod(ID, Const("M"))), Poss(Prod(ID, ID)),
]


@pytest.mark.parametrize("T", FUNCTORS, ids=lambda T: str(T))
@pytest.mark.parametrize("seed", range(4))
def test_derived_battery_on_random_models(T, seed):
    m = random_coalgebra(T, size=3, seed=seed)
    D = m.T
    up, lo = {"upper": ("U", "L"), "prob": ("Pr", "Pr"), "plaus": ("Pl", "Bl"), "poss": ("Ps", "Nc")}[D.kind]
    subs = [BOT, TOP] + candidate_formulas(D.arg, 1, [F(1, 2)], D)[:12]
    elems = sample_elements(D, m, default_probes(m))
    assert elems
    for e in elems:
        for phi in subs:
            assert satisfies(e, cmp(up + ">=", 0, phi), m, D)
            assert satisfies(e, cmp(lo + ">=", 0, phi), m, D)
            assert not satisfies(e, cmp(up + ">=", F(1, 2), BOT), m, D)
            for p in (F(1, 4), F(1, 2), F(1)):
                hi = satisfies(e, cmp(up + ">=", p, phi), m, D)
                if satisfies(e, cmp(lo + ">=", p, phi), m, D):
                    assert hi
                if hi:
                    assert satisfies(e, cmp(up + ">=", p / 2, phi), m, D)
                assert satisfies(e, cmp(up + "<=", p, phi), m, D) == satisfies(e, cmp(lo + ">=", 1 - p, neg(phi)), m, D)
