# tests/test_terms.py
import pytest
from hypothesis import given

from provcalc.calculus.terms import (
    UNIT, Exists, Literal, Name, Par, Valuation, Variable, apply_valuation, classify, consume,
    free_vars, ground_names, is_quiescent, is_system, simplify_units, stored, substitute,
)
from provcalc.exceptions import UnboundVariable
from provcalc.schemas import Grammar
from tests.conftest import p
from tests.strategies import names, processes, variables

x, y = Variable("x"), Variable("y")


def test_free_vars_examples():
    assert free_vars(UNIT) == frozenset()
    assert free_vars(Exists(x, Literal(consume(x, y)))) == {y}
    term = Par(Literal(stored(Name("a"), x)), Exists(x, Literal(consume(x))))
    assert free_vars(term) == {x}


def test_substitute_skips_bound_occurrences():
    term = Exists(x, Literal(consume(x)))
    assert substitute(term, x, Name("a")) == term


def test_substitute_descends():
    result = substitute(p("[?x y] ; *[?x]"), x, Name("tate"))
    assert result == p("[tate y] ; *[tate]")


def test_substitute_baltic_body():
    body = p("[mill depiction ?x] ; *[baltic depiction ?x]")
    assert substitute(body, x, Name("photo")) == p("[mill depiction photo] ; *[baltic depiction photo]")


@given(processes, variables, names)
def test_substitute_removes_only_x(term, var, name):
    result = substitute(term, var, name)
    assert free_vars(result) == free_vars(term) - {var}


@pytest.mark.parametrize(
    "text, grammar",
    [
        ("*[sage type hall] | *[baltic type gallery]", Grammar.DATA),
        ("ex ?x.([?x type hall] | ([?x loc newcastle] + [?x loc gateshead]))", Grammar.QUERY),
        ("ex ?x.([mill depiction ?x] ; *[baltic depiction ?x])", Grammar.UPDATE),
        ("#[d] ; *[e]", Grammar.SYSTEM),
        ("#[a] + *[b]", Grammar.GENERAL),
        ("ex ?x.*[?x]", Grammar.GENERAL),
        ("1", Grammar.DATA),
    ],
)
def test_classify(text, grammar):
    assert classify(p(text)) == grammar


def test_classify_stable_under_par_reassociation():
    assert classify(p("(*[a] | *[b]) | *[c]")) == classify(p("*[a] | (*[b] | *[c])")) == Grammar.DATA


def test_fixture_systems_are_systems(turner_init, baltic, sage_baltic):
    for term in (turner_init, baltic) + sage_baltic:
        assert is_system(term)


def test_ground_names(turner_init):
    assert ground_names(UNIT) == frozenset()
    assert ground_names(p("*[a b] | [c]")) == {Name("a"), Name("b"), Name("c")}
    expected = {"turner", "location", "tate", "london", "baltic", "uk"}
    assert {n.text for n in ground_names(turner_init)} == expected


def test_valuation_override_and_default():
    v = Valuation(default=Name("z")).extend(x, Name("a"))
    assert v(x) == Name("a")
    assert v(y) == Name("z")
    assert v.extend(y, Name("b"))(x) == Name("a")


def test_valuation_without_default_raises():
    with pytest.raises(UnboundVariable):
        Valuation()(x)


@given(processes)
def test_total_valuation_closes_the_term(term):
    assert free_vars(apply_valuation(term, Valuation(default=Name("a")))) == frozenset()


def test_simplify_units():
    assert simplify_units(p("1 ; [a] | 1")) == p("[a]")
    assert simplify_units(p("ex ?x.1")) == UNIT
    assert simplify_units(p("[a] + 1")) == p("[a] + 1")


def test_is_quiescent():
    assert is_quiescent(p("#[a] ; *[b] | 1"))
    assert not is_quiescent(p("#[a] ; [b]"))
    assert not is_quiescent(p("*[a] + *[b]"))
