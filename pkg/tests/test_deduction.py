from fractions import Fraction as F
from pathlib import Path

import pytest

from ucml.deduction import (AXIOM_IDS, MUTANT_IDS, RULE_IDS, applicable, cover_bound,
                            gen_cover_rule_instance, inclusion_exclusion_bound, instantiate_axiom,
                            is_tautology, random_coalgebra, soundness_harness)
from ucml.errors import DomainError, SchemaError, SideConditionError
from ucml.functors import ID, Const, Plaus, Prob, Prod, Upper, parse_functor
from ucml.logic import Atom, parse_formula, parse_raw, print_formula
from ucml.models import save_model
from ucml.semantics import satisfies, valid_in_model
from ucml.spaces import make_space

GOLDEN = Path(__file__).parent / "golden"
M = make_space("M", "abc", [{"a"}])
CM = Const("M", M)
T = Upper(Prod(ID, CM))
PHI = parse_raw("[pr2]{a}")


def test_split_schema_instance():
    sf = instantiate_axiom("6d", {"p": "1/2", "q": "2/5", "phi": PHI}, T, T)
    want = parse_formula("[(1/2,2/5)][pr2]{a} <-> (U>=1/2 [pr2]{a} & L>=2/5 [pr2]{a})", T, T)
    assert sf.formula == want.formula


def test_constant_schema_instance():
    sf = instantiate_axiom("2a", {"c": "a", "A": {"a"}}, CM, T)
    assert print_formula(sf.formula) == "{a} -> {a}"
    with pytest.raises(DomainError):
        instantiate_axiom("2a", {"c": "b", "A": {"a"}}, CM, T)
    sf = instantiate_axiom("2b", {"c": "b", "A": {"a"}}, CM, T)
    assert print_formula(sf.formula) == "{b} -> !{a}"


def test_inclusion_exclusion_instance():
    TP = Plaus(CM)
    phis = [Atom(frozenset("a")), Atom(frozenset("bc"))]
    assert inclusion_exclusion_bound({frozenset({1}): F(1, 2), frozenset({2}): F(1, 2),
                                      frozenset({1, 2}): F(1, 2)}, 2) == F(1, 2)
    sf = instantiate_axiom("9f", {"phis": phis, "pI": ["1/2", "1/2", "1/2"]}, TP, TP)
    want = parse_formula("Pl<=1/2 {a} & Pl<=1/2 {b,c} & Pl>=1/2 ({a} | {b,c}) -> Pl<=1/2 ({a} & {b,c})", TP)
    assert sf.formula == want.formula
    with pytest.raises(DomainError):
        instantiate_axiom("9f", {"phis": phis, "pI": ["0", "0", "1"]}, TP, TP)
    sf = instantiate_axiom("9g", {"phis": phis, "pI": ["0", "0", "1"]}, TP, TP)
    assert print_formula(sf.formula).startswith("!(")


def test_schema_side_conditions():
    with pytest.raises(DomainError):
        instantiate_axiom("6a", {"p": "1/2", "q": "1/2", "phi": PHI}, T, T)
    with pytest.raises(SchemaError):
        instantiate_axiom("6a", {"p": "1/2", "q": "3/4", "phi": PHI}, ID, T)
    with pytest.raises(SchemaError):
        instantiate_axiom("6a", {"p": "1/2", "phi": PHI}, T, T)
    with pytest.raises(SchemaError):
        instantiate_axiom("7z", {}, T, T)
    with pytest.raises(DomainError):
        instantiate_axiom("1", {"formula": parse_raw("{a} -> {b,c}")}, CM, T)


def test_applicability():
    assert applicable("6a", T) and not applicable("8a", T)
    assert applicable("3a", Prod(ID, CM)) and applicable("5b", ID)
    assert applicable("2a", CM) and not applicable("2a", ID)
    assert set(AXIOM_IDS) >= {"1", "2a", "2b", "3a", "3b", "4a", "4b", "5a", "5b", "6a", "6b", "6c", "6d",
                              "8a", "8b", "8c", "9a", "9b", "9c", "9d", "9e", "9f", "9g",
                              "10a", "10b", "10c", "10d", "10e", "10f", "10g"}
    assert set(MUTANT_IDS) == {"6a!", "8a!", "9a!", "10a!"}


def test_tautology_checker():
    assert is_tautology(parse_raw("{a} | !{a}"))
    assert is_tautology(parse_raw("[pr1]bot -> [pr1]bot"))
    assert not is_tautology(parse_raw("{a} -> {b,c}"))
    assert not is_tautology(parse_raw("[pr1]bot"))


# cover rules


def test_cover_bound():
    assert cover_bound(["1/3", "1/2"], 1, 0) == F(5, 6)
    assert cover_bound(["1/2", "1/2", "1/2"], 1, 1) == F(1, 2)
    assert cover_bound(["1/4"], 1, 1) == 0
    assert cover_bound(["1", "1"], 1, 0) == 1


def test_subadditivity_from_a_disjoint_cover(worked):
    a, bc = parse_raw("[pr2]{a}"), parse_raw("[pr2]{b,c}")
    phi = parse_raw("[pr2]{a} | [pr2]{b,c}")
    inst = gen_cover_rule_instance(phi, [a, bc], 1, 0, ["1/3", "1/2"], worked)
    want = parse_formula("U<=1/3 [pr2]{a} & U<=1/2 [pr2]{b,c} -> U<=5/6 ([pr2]{a} | [pr2]{b,c})", worked.T)
    assert inst.rule == "cover1" and inst.conclusion == want.formula
    assert inst.side["p"] == F(5, 6)
    assert valid_in_model(want, worked)


def test_complementary_cover_of_the_carrier(worked):
    psi = parse_raw("[pr2]{a}")
    inst = gen_cover_rule_instance(None, [psi, parse_raw("![pr2]{a}")], 0, 1, ["1/4", "1/2"], worked)
    want = parse_formula("!(U<=1/4 [pr2]{a} & U<=1/2 ![pr2]{a})", worked.T)
    assert inst.rule == "cover2" and inst.conclusion == want.formula
    assert valid_in_model(want, worked)
    with pytest.raises(DomainError):
        gen_cover_rule_instance(None, [psi, parse_raw("![pr2]{a}")], 0, 1, ["1/2", "1/2"], worked)


def test_self_cover(worked):
    psi = parse_raw("[pr2]{a}")
    inst = gen_cover_rule_instance(psi, [psi], 1, 0, ["2/5"], worked)
    assert inst.conclusion == parse_formula("U<=2/5 [pr2]{a} -> U<=2/5 [pr2]{a}", worked.T).formula


def test_uncovered_point_is_reported(worked):
    with pytest.raises(SideConditionError) as info:
        gen_cover_rule_instance(parse_raw("top"), [parse_raw("[pr2]{a}")], 1, 0, ["1/2"], worked)
    assert info.value.point[1] in ("b", "c")
    with pytest.raises(SideConditionError):
        gen_cover_rule_instance(None, [parse_raw("[pr2]{a}")], 0, 1, ["0"], worked)


def test_cover_rules_only_for_additive_kinds(worked):
    with pytest.raises(SchemaError):
        gen_cover_rule_instance(None, [parse_raw("[pr2]{a}")], 0, 1, ["0"], worked, kind="plaus")


# random models


@pytest.mark.parametrize("name,ftext,size,seed", [
    ("upper_id_seed11", "Upper(Id)", 2, 11),
    ("poss_const_seed5", "Poss(Const(M))", 3, 5),
])
def test_random_coalgebra_golden(name, ftext, size, seed):
    m = random_coalgebra(parse_functor(ftext), size=size, seed=seed)
    assert save_model(m) == (GOLDEN / f"{name}.ucml").read_text()


def test_random_coalgebra_is_deterministic_and_bounded():
    for ftext in ("Upper(Id * Const(M))", "Plaus(Id + Const(M))", "Poss(Id * Id)", "Upper(Upper(Id))"):
        Tf = parse_functor(ftext)
        for seed in range(5):
            a, b = random_coalgebra(Tf, size=4, seed=seed), random_coalgebra(Tf, size=4, seed=seed)
            assert save_model(a) == save_model(b)
            assert len(a.X.carrier) == 4 and a.X.algebra.n_atoms <= 4


def test_single_state_model():
    m = random_coalgebra(Upper(ID), size=1, seed=3)
    assert m.X.carrier == ("x0",)
    assert satisfies("x0", parse_formula("[next][(1,1)]top", m.T), m)


# the harness


def test_harness_is_deterministic():
    a = soundness_harness(Prob(ID), trials=5, seed=9)
    b = soundness_harness(Prob(ID), trials=5, seed=9)
    assert a.to_text() == b.to_text() and a.ok


def test_harness_covers_every_applicable_schema_and_rule():
    rep = soundness_harness(parse_functor("Upper(Id * Const(M))"), trials=20, seed=1)
    assert rep.ok
    for sid in ("1", "2a", "2b", "3a", "3b", "5a", "5b", "6a", "6b", "6c", "6d") + RULE_IDS[:-1]:
        assert rep.checked[sid] > 0, sid


@pytest.mark.parametrize("ftext,mutant", [("Prob(Id)", "8a!"), ("Poss(Id)", "10a!"), ("Plaus(Id)", "9a!")])
def test_mutants_are_caught(ftext, mutant):
    rep = soundness_harness(parse_functor(ftext), trials=40, seed=0, schemas=[mutant])
    assert not rep.ok
    v = rep.violations[0]
    assert v.schema == mutant and v.witness is not None


def test_unknown_schema_id():
    with pytest.raises(SchemaError):
        soundness_harness(Prob(ID), trials=1, schemas=["nope"])
