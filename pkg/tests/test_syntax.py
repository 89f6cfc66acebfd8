# tests/test_syntax.py
import pytest
from hypothesis import given

from provcalc.calculus.syntax import parse_process, parse_triples, print_process, tokenize
from provcalc.calculus.terms import UNIT, Exists, Literal, Name, Par, Seq, Variable, consume, stored
from provcalc.exceptions import ParseError
from tests.strategies import processes

a, b, c = (Literal(consume(Name(t))) for t in "abc")


def test_parse_par_of_literals():
    assert parse_process("*[d] | [d]") == Par(Literal(stored(Name("d"))), Literal(consume(Name("d"))))


def test_parse_baltic_update():
    term = parse_process("ex ?x.([mill depiction ?x] ; *[baltic depiction ?x])")
    assert isinstance(term, Exists) and term.var == Variable("x")
    assert isinstance(term.body, Seq)


def test_precedence():
    assert parse_process("[a] ; [b] | [c]") == Par(Seq(a, b), c)
    assert print_process(Par(Seq(a, b), c)) == "[a] ; [b] | [c]"
    assert print_process(Seq(a, Par(b, c))) == "[a] ; ([b] | [c])"


def test_exists_scopes_to_the_right():
    term = parse_process("ex ?x.[?x] | [a]")
    assert isinstance(term, Exists)
    assert isinstance(term.body, Par)


def test_chains_nest_to_the_right():
    assert parse_process("[a] ; [b] ; [c]") == Seq(a, Seq(b, c))
    assert print_process(Seq(Seq(a, b), c)) == "([a] ; [b]) ; [c]"


def test_print_unit_and_iri():
    assert print_process(UNIT) == "1"
    assert print_process(Literal(stored(Name("http://dbpedia.org/resource/Tate")))) == "*[<http://dbpedia.org/resource/Tate>]"


def test_keyword_is_a_name_inside_tuples():
    term = parse_process("[ex a]")
    assert term == Literal(consume(Name("ex"), Name("a")))
    assert parse_process(print_process(term)) == term


def test_empty_tuple_is_rejected():
    with pytest.raises(ParseError) as error:
        parse_process("[]")
    assert error.value.found == "]"


def test_parse_error_span():
    with pytest.raises(ParseError) as error:
        parse_process("[a] | ")
    span = error.value.span
    assert (span.line, span.column) == (1, 7)
    assert error.value.found == "end of input"
    assert str(error.value).startswith("1:7: expected ")


def test_parse_error_reports_bytes_and_lines():
    with pytest.raises(ParseError) as error:
        parse_process("[a]\n | [é]")
    span = error.value.span
    assert span.line == 2
    assert span.byte_end - span.byte_start == 2


def test_tokenize_ends_with_eof():
    assert [t.kind for t in tokenize("*[a]")] == ["*", "[", "name", "]", "eof"]


@given(processes)
def test_parse_print_round_trip(term):
    assert parse_process(print_process(term)) == term


@given(processes)
def test_print_is_idempotent_on_strings(term):
    text = print_process(term)
    assert print_process(parse_process(text)) == text


def test_round_trip_turner(turner_init):
    assert parse_process(print_process(turner_init)) == turner_init


# Triplets
def test_triples_empty():
    assert parse_triples("") == UNIT
    assert parse_triples("# only a comment\n\n") == UNIT


def test_triples_data_example():
    term = parse_triples("sage type hall .\nbaltic type gallery .")
    assert term == parse_process("*[sage type hall] | *[baltic type gallery]")


def test_triples_iris_and_crlf():
    term = parse_triples("<http://x/s> <http://x/p> <http://x/o> . # trailing\r\n")
    assert term == Literal(stored(Name("http://x/s"), Name("http://x/p"), Name("http://x/o")))


def test_triples_arity_violation():
    with pytest.raises(ParseError) as error:
        parse_triples("a b .\n")
    assert error.value.span.line == 1


def test_triples_final_dot_may_touch_the_object():
    assert parse_triples("a b c.\n") == Literal(stored(Name("a"), Name("b"), Name("c")))
    assert parse_triples("a b c . # note\n") == parse_process("*[a b c]")


@pytest.mark.parametrize("line", ["a#b c d .\n", "a b c.d .\n", "a b c .d\n"])
def test_triples_reject_glued_tokens(line):
    with pytest.raises(ParseError):
        parse_triples(line)


def test_triples_fixture():
    from tests.conftest import load

    assert load("sage_baltic.nt") == parse_process("*[sage type hall] | *[baltic type gallery]")
