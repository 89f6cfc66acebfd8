# provcalc/calculus/syntax.py
"""Syntaxe concrète : analyseur et afficheur de processus, lecture des fichiers de triplets"""
import logging
import re
from dataclasses import dataclass
from typing import List, Optional, Tuple

from provcalc.calculus.terms import (
    UNIT, Atom, Choice, Exists, Label, Literal, Name, Par, Process, Seq, TupleTerm, Unit, Variable,
)
from provcalc.exceptions import ParseError
from provcalc.schemas import Polarity

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SourceSpan:
    byte_start: int
    byte_end: int
    line: int
    column: int


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<var>\?[A-Za-z_][A-Za-z0-9_\-]*)
  | (?P<iri><[^<>\s]+>)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_\-]*)
  | (?P<one>1)
  | (?P<punct>[\[\]()*#+|;.])
    """,
    re.VERBOSE,
)

_DESCRIBE = {
    "name": "name",
    "var": "variable",
    "one": "'1'",
    "eof": "end of input",
}


def _span(text: str, start: int, end: int) -> SourceSpan:
    line = text.count("\n", 0, start) + 1
    column = start - (text.rfind("\n", 0, start) + 1) + 1
    return SourceSpan(
        byte_start=len(text[:start].encode("utf-8")),
        byte_end=len(text[:end].encode("utf-8")),
        line=line,
        column=column,
    )


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(_span(text, pos, pos + 1), ["token"], text[pos])
        kind = match.lastgroup
        if kind != "ws":
            value = match.group()
            if kind == "punct":
                kind = value
            elif kind == "iri":
                kind, value = "name", value[1:-1]
            elif kind == "ident":
                kind = "ex" if value == "ex" else "name"
            elif kind == "var":
                value = value[1:]
            tokens.append(Token(kind, value, _span(text, match.start(), match.end())))
        pos = match.end()
    tokens.append(Token("eof", "", _span(text, len(text), len(text))))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def fail(self, *expected: str):
        found = self.current.text if self.current.kind != "eof" else "end of input"
        raise ParseError(self.current.span, [_DESCRIBE.get(e, f"'{e}'") for e in expected], found)

    def expect(self, kind: str) -> Token:
        if self.current.kind != kind:
            self.fail(kind)
        return self.advance()

    def process(self) -> Process:
        if self.current.kind == "ex":
            self.advance()
            var = Variable(self.expect("var").text)
            self.expect(".")
            return Exists(var, self.process())
        return self.choice()

    def _chain(self, operator: str, operand, node) -> Process:
        items = [operand()]
        while self.current.kind == operator:
            self.advance()
            items.append(operand())
        result = items[-1]
        for item in reversed(items[:-1]):
            result = node(item, result)
        return result

    def choice(self) -> Process:
        return self._chain("+", self.par, Choice)

    def par(self) -> Process:
        return self._chain("|", self.seq, Par)

    def seq(self) -> Process:
        return self._chain(";", self.atom, Seq)

    def atom(self) -> Process:
        kind = self.current.kind
        if kind == "one":
            self.advance()
            return UNIT
        if kind == "(":
            self.advance()
            inner = self.process()
            self.expect(")")
            return inner
        if kind in ("[", "*", "#"):
            return self.literal()
        self.fail("one", "(", "[", "*", "#")

    def literal(self) -> Literal:
        polarity = Polarity.CONSUME
        if self.current.kind == "*":
            polarity = Polarity.STORED
            self.advance()
        elif self.current.kind == "#":
            polarity = Polarity.ARTEFACT
            self.advance()
        self.expect("[")
        atoms: List[Atom] = []
        while self.current.kind in ("name", "var", "ex"):
            token = self.advance()
            atoms.append(Variable(token.text) if token.kind == "var" else Name(token.text))
        if not atoms:
            self.fail("name", "var")
        if self.current.kind != "]":
            self.fail("name", "var", "]")
        self.advance()
        return Literal(Label(polarity, TupleTerm(tuple(atoms))))


def parse_process(text: str) -> Process:
    """Analyse un terme ; lève ParseError avec sa position dans la source"""
    parser = _Parser(text)
    result = parser.process()
    if parser.current.kind != "eof":
        parser.fail("+", "|", ";", "eof")
    return result


# Impression
_PRECEDENCE = {Choice: 1, Par: 2, Seq: 3}
_OPERATORS = {Choice: " + ", Par: " | ", Seq: " ; "}


def _precedence(p: Process) -> int:
    if isinstance(p, Exists):
        return 0
    return _PRECEDENCE.get(type(p), 4)


def _render(p: Process, minimum: int) -> str:
    text = _render_bare(p)
    return f"({text})" if _precedence(p) < minimum else text


def _render_bare(p: Process) -> str:
    if isinstance(p, Unit):
        return "1"
    if isinstance(p, Literal):
        return str(p.label)
    if isinstance(p, Exists):
        body = _render_bare(p.body)
        if isinstance(p.body, (Seq, Par, Choice)):
            body = f"({body})"
        return f"ex {p.var}.{body}"
    level = _PRECEDENCE[type(p)]
    # les chaînes s'imbriquent à droite : un fils gauche du même opérateur garde ses parenthèses
    return _render(p.left, level + 1) + _OPERATORS[type(p)] + _render(p.right, level)


def print_process(p: Process) -> str:
    return _render_bare(p)


# Triplets
# un commentaire ne commence qu'en début de jeton
_TRIPLE_TOKEN_RE = re.compile(r"<[^<>\s]*>|(?:^|(?<=\s))#.*|\.(?=\s|$)|[A-Za-z0-9_\-]+|\S")


def parse_triples(text: str) -> Process:
    """Composition parallèle des triplets stockés, un `jeton jeton jeton .` par ligne"""
    triples: List[Process] = []
    offset = 0
    for line in text.splitlines(keepends=True):
        line_start = offset
        offset += len(line)
        tokens: List[Tuple[str, int, int]] = []
        for match in _TRIPLE_TOKEN_RE.finditer(line.rstrip("\r\n")):
            if match.group().startswith("#"):
                break
            tokens.append((match.group(), line_start + match.start(), line_start + match.end()))
        if not tokens:
            continue
        if len(tokens) != 4 or tokens[3][0] != ".":
            last = tokens[min(len(tokens), 4) - 1]
            found = last[0] if len(tokens) < 4 else tokens[3][0]
            expected = ["'.'"] if len(tokens) >= 4 else ["three tokens before '.'"]
            raise ParseError(_span(text, tokens[0][1], last[2]), expected, found)
        atoms = []
        for token, start, end in tokens[:3]:
            if token == "<>":
                raise ParseError(_span(text, start, end), ["name"], token)
            atoms.append(Name(token[1:-1] if token.startswith("<") else token))
        triples.append(Literal(Label(Polarity.STORED, TupleTerm(tuple(atoms)))))
    if not triples:
        return UNIT
    logger.debug(f"parsed {len(triples)} triples")
    result: Optional[Process] = None
    for triple in reversed(triples):
        result = triple if result is None else Par(triple, result)
    return result
