# tests/test_congruence.py
import pytest
from hypothesis import given, settings

from provcalc.calculus.congruence import canonical_key, congruent, normalize, single_rewrites
from provcalc.calculus.syntax import print_process
from provcalc.calculus.terms import UNIT, Choice, Seq, Variable, is_sp_term
from tests.conftest import p
from tests.strategies import processes


def test_normalize_units():
    nf = normalize(p("1 | 1"))
    assert nf.prefix == ()
    assert nf.summands == (UNIT,)


def test_normalize_distributes_seq_over_choice():
    nf = normalize(p("([a] + [b]) ; [c]"))
    assert nf.prefix == ()
    assert {print_process(s) for s in nf.summands} == {"[a] ; [c]", "[b] ; [c]"}


def test_normalize_collapses_idempotent_sum():
    nf = normalize(p("(ex ?x.(*[d] | [?x])) + (ex ?x.(*[d] | [?x]))"))
    assert nf.prefix == (Variable("x1"),)
    assert len(nf.summands) == 1
    assert congruent(nf.summands[0], p("*[d] | [?x1]"))


def test_normal_form_string():
    assert str(normalize(p("ex ?y.([?y] ; *[a])"))) == "ex ?x1 . [?x1] ; *[a]"


def test_canonical_names_avoid_free_variables():
    nf = normalize(p("ex ?y.[?y ?x1]"))
    assert nf.prefix and nf.prefix[0] != Variable("x1")


@pytest.mark.parametrize(
    "left, right, expected",
    [
        ("[a] | [b]", "[b] | [a]", True),
        ("[a] ; [b]", "[b] ; [a]", False),
        ("[a] ; *[b] + [a] ; *[b]", "[a] ; *[b]", True),
        ("1 | 1", "1", True),
        ("([a] ; [b]) ; [c]", "[a] ; ([b] ; [c])", True),
        ("ex ?x.([?x] | *[a])", "ex ?y.(*[a] | [?y])", True),
        ("[a] ; (ex ?x.[?x])", "ex ?x.([a] ; [?x])", True),
        ("(ex ?x.[?x]) | (ex ?y.[?y])", "ex ?y.ex ?x.([?x] | [?y])", True),
        ("ex ?x.ex ?y.[?x ?y]", "ex ?y.ex ?x.[?x ?y]", False),
        ("ex ?x.1", "1", True),
        ("[a] | ([b] + [c])", "[a] | [b] + [a] | [c]", True),
    ],
)
def test_congruent(left, right, expected):
    assert congruent(p(left), p(right)) is expected
    assert (canonical_key(p(left)) == canonical_key(p(right))) is expected


def test_summands_are_sp_terms(turner_init):
    for term in (turner_init, p("ex ?x.([?x] + [a] ; (ex ?y.*[?y]))")):
        assert all(is_sp_term(s) for s in normalize(term).summands)


@given(processes)
def test_normal_form_is_congruent(term):
    assert congruent(normalize(term).to_process(), term)


@given(processes)
def test_normalize_is_idempotent(term):
    once = normalize(term)
    assert normalize(once.to_process()) == once


@settings(max_examples=60, deadline=None)
@given(processes)
def test_single_axiom_preserves_key(term):
    key = canonical_key(term)
    for axiom, rewritten in single_rewrites(term):
        assert canonical_key(rewritten) == key, axiom


def test_single_rewrites_cover_every_axiom():
    term = p("ex ?x.(([a] + [b]) ; ([?x] | 1))")
    axioms = {axiom for axiom, _ in single_rewrites(term)}
    for expected in (
        "unit-par", "unit-seq-left", "choice-idempotent", "commutativity",
        "distribute-seq-left", "alpha", "extrude-seq-right",
    ):
        assert expected in axioms


def test_choice_terms_rewrite_back():
    term = Choice(Seq(p("[a]"), p("[c]")), Seq(p("[b]"), p("[c]")))
    rewritten = dict(single_rewrites(term))
    assert congruent(rewritten["distribute-seq-left"], term)
