from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from strategies import formulas
from ucml.errors import FormulaSortError, ParseError
from ucml.functors import ID, Const, Coprod, Plaus, Poss, Prob, Prod, Upper, parse_functor
from ucml.logic import (BOT, Atom, Idx, Implies, Modal, cmp, expand_abbreviation, index, modal_depth, neg,
                        parse_formula, parse_raw, print_formula, sort_check, subformulas)
from ucml.spaces import make_space

M = make_space("M", "abc", [{"a"}])
CM = Const("M", M)
T = Upper(Prod(ID, CM))
PHI = "[next][(1/2,2/5)][pr2] !{b,c}"


def test_running_formula_parses_at_id():
    sf = parse_formula(PHI, T)
    assert sf.sort == ID and sf.measurable
    assert sf.formula == Modal("next", Modal(Idx("upper", F(1, 2), F(2, 5)),
                                             Modal("pr2", neg(Atom(frozenset("bc"))))))
    assert modal_depth(sf) == 3


def test_decimal_indices_are_exact():
    assert parse_formula("[next][(0.5,0.4)][pr2] !{b,c}", T) == parse_formula(PHI, T)


def test_bot_implies_bot_is_top():
    sf = parse_formula("bot -> bot", T, ID)
    assert sf.formula == Implies(BOT, BOT)
    assert print_formula(sf.formula) == "top"


def test_non_measurable_operand_rejected():
    T1 = Upper(CM)
    with pytest.raises(FormulaSortError, match="non-measurable"):
        parse_formula("[(1,0)]{b}", T1)
    assert parse_formula("[(1,0)]{b,c}", T1).measurable


def test_singleton_literal_parses_but_is_flagged():
    sf = parse_formula("{b}", T)
    assert sf.sort == CM and not sf.measurable


def test_projection_sort():
    sf = parse_formula("[pr1]" + PHI, T)
    assert sf.sort == Prod(ID, CM)
    assert modal_depth(sf) == 4


@pytest.mark.parametrize("S", [ID, CM, Prod(ID, CM), T])
def test_bot_at_every_sort(S):
    assert sort_check(BOT, T, S).sort == S


@pytest.mark.parametrize("text,err", [
    ("[(3/2,0)][pr2]{a}", ParseError),
    ("[pr3]bot", ParseError),
    ("{a} ->", ParseError),
    ("{a} & ", ParseError),
    ("U=1/2 top", ParseError),
    ("[next]{a}", FormulaSortError),
    ("{q}", FormulaSortError),
    ("[(1/2,1/2)]top", FormulaSortError),
])
def test_errors_carry_positions(text, err):
    with pytest.raises(err) as info:
        parse_formula(text, T, ID if text == "[(1/2,1/2)]top" else None)
    assert info.value.pos is not None


def test_comparator_expansions():
    phi = Atom(frozenset("a"))
    assert expand_abbreviation("U>=", F(1, 2), phi) == index("upper", F(1, 2), F(0), phi)
    assert cmp("U<=", F(1, 3), phi) == cmp("L>=", F(2, 3), neg(phi))
    assert cmp("U<", F(1, 3), phi) == neg(cmp("U>=", F(1, 3), phi))
    assert cmp("L<=", F(1, 3), phi) == index("upper", F(2, 3), F(0), neg(phi))
    assert cmp("L>=", 0, phi) == index("upper", F(0), F(0), phi)
    assert cmp("Pr>=", F(1, 2), phi) == index("prob", F(1, 2), None, phi)
    assert cmp("Pl<=", F(1, 4), phi) == cmp("Bl>=", F(3, 4), neg(phi))
    assert cmp("Ps<=", F(1, 4), phi) == cmp("Nc>=", F(3, 4), neg(phi))
    with pytest.raises(ParseError):
        expand_abbreviation("Q>=", F(1, 2), phi)


def test_surface_comparators_match_expansions():
    assert parse_formula("U<=1/4 [pr2]{a}", T) == parse_formula("L>=3/4 ![pr2]{a}", T)
    assert parse_formula("U>1/4 [pr2]{a}", T) == parse_formula("!U<=1/4 [pr2]{a}", T)


def test_precedence_and_associativity():
    a, b, c = (parse_raw(x) for x in ("{a}", "{b,c}", "bot"))
    assert parse_raw("{a} -> {b,c} -> bot") == Implies(a, Implies(b, c))
    f = parse_raw("{a} & {b,c} | {a}")
    assert print_formula(f) == "{a} & {b,c} | {a}"
    # disjunction with bot is the same core tree as double negation
    assert parse_raw("{a} | bot") == parse_raw("!!{a}")
    assert print_formula(parse_raw("({a} | {b,c}) & bot")) == "({a} | {b,c}) & bot"


def test_subformulas_in_preorder():
    f = parse_raw(PHI)
    assert [type(g).__name__ for g in subformulas(f)] == ["Modal", "Modal", "Modal", "Implies", "Atom", "Bot"]


FUNCTORS = [T, Prob(ID), Plaus(Coprod(ID, CM)), Poss(Prod(ID, ID)), Upper(Upper(ID)), Coprod(Prob(CM), Poss(ID))]


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(FUNCTORS).flatmap(
    lambda F_: st.sampled_from(list(__import__("ucml.functors").functors.ingredients(F_))).flatmap(
        lambda S: formulas(F_, S, 5).map(lambda f: (F_, S, f)))))
def test_print_then_parse_is_identity(case):
    F_, S, f = case
    text = print_formula(f)
    sf = parse_formula(text, F_, S)
    assert sf.formula == f
    assert print_formula(sf.formula) == text
    assert sf.measurable


def test_parse_with_string_sort():
    T2 = parse_functor("Upper(Id * Const(M))", {"M": M})
    assert parse_formula("{a}", T2, "M").sort == CM
