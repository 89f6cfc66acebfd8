# provcalc/calculus/congruence.py
"""Congruence structurelle : formes normales prénexes en somme de termes série-parallèles et clés canoniques

Les termes de la somme sont comparés après avoir poussé chaque quantificateur
vers sa portée minimale : des quantificateurs séparables par extrusion sont égaux
dans les deux ordres, des portées qui se chevauchent gardent leur imbrication.
"""
import json
import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import count
from typing import Dict, FrozenSet, Iterator, List, Tuple, Union

from provcalc.calculus.terms import (
    UNIT, Choice, Exists, Label, Literal, Name, Par, Process, Seq, TupleTerm, Unit, Variable,
    free_vars, positions, replace_at, substitute, variable_names,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NormalForm:
    """ex préfixe . terme_1 + ... + terme_n"""
    prefix: Tuple[Variable, ...]
    summands: Tuple[Process, ...]

    def to_process(self) -> Process:
        body = self.summands[-1]
        for summand in reversed(self.summands[:-1]):
            body = Choice(summand, body)
        for var in reversed(self.prefix):
            body = Exists(var, body)
        return body

    def __str__(self) -> str:
        from provcalc.calculus.syntax import print_process

        sums = " + ".join(print_process(summand) for summand in self.summands)
        if not self.prefix:
            return sums
        return "ex " + " ".join(str(var) for var in self.prefix) + " . " + sums


# Arbres n-aires internes
@dataclass(frozen=True)
class _Chain:
    kind: str  # "seq" keeps order, "par" is sorted when canonicalised
    items: Tuple["_Node", ...]


@dataclass(frozen=True)
class _Bind:
    var: Variable
    body: "_Node"


_Node = Union[Unit, Literal, _Chain, _Bind]


@lru_cache(maxsize=65536)
def _fv(node: _Node) -> FrozenSet[Variable]:
    if isinstance(node, Literal):
        return free_vars(node)
    if isinstance(node, _Bind):
        return _fv(node.body) - {node.var}
    if isinstance(node, _Chain):
        return frozenset().union(*(_fv(item) for item in node.items))
    return frozenset()


def _rename_apart(p: Process, fresh: Iterator[Variable]) -> Process:
    if isinstance(p, Exists):
        var = next(fresh)
        return Exists(var, _rename_apart(substitute(p.body, p.var, var), fresh))
    if isinstance(p, (Seq, Par, Choice)):
        return type(p)(_rename_apart(p.left, fresh), _rename_apart(p.right, fresh))
    return p


def _prenex(p: Process) -> Tuple[List[Variable], List[Process]]:
    """Extrait les quantificateurs, le plus à gauche et le plus externe d'abord, et distribue sur les sommes"""
    if isinstance(p, (Unit, Literal)):
        return [], [p]
    if isinstance(p, Exists):
        prefix, summands = _prenex(p.body)
        return [p.var] + prefix, summands
    left_prefix, left = _prenex(p.left)
    right_prefix, right = _prenex(p.right)
    if isinstance(p, Choice):
        return left_prefix + right_prefix, left + right
    node = type(p)
    return left_prefix + right_prefix, [node(a, b) for a in left for b in right]


def _flatten(p: Process) -> _Node:
    if isinstance(p, (Seq, Par)):
        kind = "seq" if isinstance(p, Seq) else "par"
        items: List[_Node] = []
        for side in (p.left, p.right):
            child = _flatten(side)
            if isinstance(child, Unit):
                continue
            if isinstance(child, _Chain) and child.kind == kind:
                items.extend(child.items)
            else:
                items.append(child)
        if not items:
            return UNIT
        if len(items) == 1:
            return items[0]
        return _Chain(kind, tuple(items))
    return p


def _push(var: Variable, node: _Node) -> _Node:
    """Place `ex var` autour du plus petit sous-terme contenant ses occurrences"""
    if var not in _fv(node):
        return node
    if not isinstance(node, _Chain):
        return _Bind(var, node)
    items = node.items
    hits = [i for i, item in enumerate(items) if var in _fv(item)]
    if len(hits) == 1:
        i = hits[0]
        return _Chain(node.kind, items[:i] + (_push(var, items[i]),) + items[i + 1:])
    if len(hits) == len(items):
        return _Bind(var, node)
    if node.kind == "par":
        group = _Chain("par", tuple(items[i] for i in hits))
        rest = tuple(item for i, item in enumerate(items) if i not in hits)
        return _Chain("par", rest + (_Bind(var, group),))
    first, last = hits[0], hits[-1]
    if first == 0 and last == len(items) - 1:
        return _Bind(var, node)
    inner = _Chain("seq", items[first:last + 1])
    return _Chain("seq", items[:first] + (_Bind(var, inner),) + items[last + 1:])


def _atom_key(atom, env: Tuple[Variable, ...]) -> list:
    if isinstance(atom, Name):
        return ["n", atom.text]
    if atom in env:
        return ["b", env.index(atom)]
    return ["f", atom.text]


def _canon(node: _Node, env: Tuple[Variable, ...]) -> Tuple[list, _Node]:
    """Clé avec variables liées à la de Bruijn, et le nœud aux éléments parallèles triés"""
    if isinstance(node, Unit):
        return ["1"], node
    if isinstance(node, Literal):
        label = node.label
        return ["L", label.polarity.value, [_atom_key(a, env) for a in label.data.atoms]], node
    if isinstance(node, _Bind):
        key, body = _canon(node.body, (node.var,) + env)
        return ["E", key], _Bind(node.var, body)
    parts = [_canon(item, env) for item in node.items]
    if node.kind == "par":
        parts.sort(key=lambda part: _dumps(part[0]))
        return ["P", [k for k, _ in parts]], _Chain("par", tuple(n for _, n in parts))
    return ["S", [k for k, _ in parts]], _Chain("seq", tuple(n for _, n in parts))


def _dumps(key) -> str:
    return json.dumps(key, ensure_ascii=False, separators=(",", ":"))


def _binders(node: _Node) -> Iterator[Variable]:
    if isinstance(node, _Bind):
        yield node.var
        yield from _binders(node.body)
    elif isinstance(node, _Chain):
        for item in node.items:
            yield from _binders(item)


def _strip(node: _Node, names: Dict[Variable, Variable]) -> Process:
    if isinstance(node, Literal):
        atoms = tuple(names.get(a, a) if isinstance(a, Variable) else a for a in node.label.data.atoms)
        return Literal(Label(node.label.polarity, TupleTerm(atoms)))
    if isinstance(node, _Bind):
        return _strip(node.body, names)
    if isinstance(node, _Chain):
        kind = Seq if node.kind == "seq" else Par
        parts = [_strip(item, names) for item in node.items]
        result = parts[-1]
        for part in reversed(parts[:-1]):
            result = kind(part, result)
        return result
    return node


def _canonical_base(p: Process) -> str:
    base = "x"
    taken = {v.text for v in free_vars(p)}
    while any(re.fullmatch(re.escape(base) + r"\d+", text) for text in taken):
        base += "_"
    return base


@lru_cache(maxsize=16384)
def _summands(p: Process) -> Tuple[Tuple[str, _Node], ...]:
    """(clé, arbre à portée minimale) canonique par terme distinct, trié par clé"""
    taken = variable_names(p)
    fresh = (Variable(f"%{i}") for i in count(1) if f"%{i}" not in taken)
    prefix, summands = _prenex(_rename_apart(p, fresh))
    result: Dict[str, _Node] = {}
    for summand in summands:
        local = [var for var in prefix if var in free_vars(summand)]
        tree = _flatten(summand)
        for var in reversed(local):
            tree = _push(var, tree)
        key, tree = _canon(tree, ())
        result.setdefault(_dumps(key), tree)
    return tuple(sorted(result.items()))


def normalize(p: Process) -> NormalForm:
    """Forme normale prénexe, lieurs nommés canoniquement et partagés par position"""
    base = _canonical_base(p)
    width = 0
    summands: List[Process] = []
    for _, tree in _summands(p):
        binders = list(_binders(tree))
        width = max(width, len(binders))
        names = {var: Variable(f"{base}{i}") for i, var in enumerate(binders, start=1)}
        summands.append(_strip(tree, names))
    prefix = tuple(Variable(f"{base}{i}") for i in range(1, width + 1))
    return NormalForm(prefix, tuple(summands))


@lru_cache(maxsize=65536)
def canonical_key(p: Process) -> bytes:
    return _dumps([key for key, _ in _summands(p)]).encode("utf-8")


def congruent(p: Process, q: Process) -> bool:
    return canonical_key(p) == canonical_key(q)


# Réécriture par un seul axiome
def _fresh_variable(p: Process) -> Variable:
    taken = variable_names(p)
    return next(Variable(f"z{i}") for i in count(1) if f"z{i}" not in taken)


def _local_rewrites(s: Process, context: Process) -> Iterator[Tuple[str, Process]]:
    yield "unit-seq-left", Seq(UNIT, s)
    yield "unit-seq-right", Seq(s, UNIT)
    yield "unit-par", Par(s, UNIT)
    yield "choice-idempotent", Choice(s, s)
    if isinstance(s, Unit):
        yield "exists-unit", Exists(_fresh_variable(context), UNIT)

    if isinstance(s, (Seq, Par, Choice)):
        node = type(s)
        left, right = s.left, s.right
        if isinstance(s, Seq) and isinstance(left, Unit):
            yield "unit-seq-left", right
        if isinstance(s, Seq) and isinstance(right, Unit):
            yield "unit-seq-right", left
        if isinstance(s, Par) and isinstance(right, Unit):
            yield "unit-par", left
        if isinstance(left, node):
            yield "associativity", node(left.left, node(left.right, right))
        if isinstance(right, node):
            yield "associativity", node(node(left, right.left), right.right)
        if isinstance(s, (Par, Choice)):
            yield "commutativity", node(right, left)

    if isinstance(s, Choice):
        if s.left == s.right:
            yield "choice-idempotent", s.left
        a, b = s.left, s.right
        if isinstance(a, Seq) and isinstance(b, Seq) and a.right == b.right:
            yield "distribute-seq-left", Seq(Choice(a.left, b.left), a.right)
        if isinstance(a, Seq) and isinstance(b, Seq) and a.left == b.left:
            yield "distribute-seq-right", Seq(a.left, Choice(a.right, b.right))
        if isinstance(a, Par) and isinstance(b, Par) and a.right == b.right:
            yield "distribute-par", Par(Choice(a.left, b.left), a.right)
        if isinstance(a, Exists) and isinstance(b, Exists) and a.var == b.var:
            yield "exists-choice", Exists(a.var, Choice(a.body, b.body))

    if isinstance(s, Seq):
        if isinstance(s.left, Choice):
            yield "distribute-seq-left", Choice(Seq(s.left.left, s.right), Seq(s.left.right, s.right))
        if isinstance(s.right, Choice):
            yield "distribute-seq-right", Choice(Seq(s.left, s.right.left), Seq(s.left, s.right.right))
        if isinstance(s.right, Exists) and s.right.var not in free_vars(s.left):
            yield "extrude-seq-right", Exists(s.right.var, Seq(s.left, s.right.body))
        if isinstance(s.left, Exists) and s.left.var not in free_vars(s.right):
            yield "extrude-seq-left", Exists(s.left.var, Seq(s.left.body, s.right))

    if isinstance(s, Par):
        if isinstance(s.left, Choice):
            yield "distribute-par", Choice(Par(s.left.left, s.right), Par(s.left.right, s.right))
        if isinstance(s.left, Exists) and s.left.var not in free_vars(s.right):
            yield "extrude-par", Exists(s.left.var, Par(s.left.body, s.right))

    if isinstance(s, Exists):
        x, body = s.var, s.body
        if isinstance(body, Unit):
            yield "exists-unit", UNIT
        if isinstance(body, Choice):
            yield "exists-choice", Choice(Exists(x, body.left), Exists(x, body.right))
        if isinstance(body, Par) and x not in free_vars(body.right):
            yield "extrude-par", Par(Exists(x, body.left), body.right)
        if isinstance(body, Seq) and x not in free_vars(body.left):
            yield "extrude-seq-right", Seq(body.left, Exists(x, body.right))
        if isinstance(body, Seq) and x not in free_vars(body.right):
            yield "extrude-seq-left", Seq(Exists(x, body.left), body.right)
        renamed = _fresh_variable(context)
        yield "alpha", Exists(renamed, substitute(body, x, renamed))


def single_rewrites(p: Process) -> Iterator[Tuple[str, Process]]:
    """Chaque application d'un axiome de congruence, dans les deux sens, à chaque position"""
    for position, subterm in positions(p):
        for axiom, rewritten in _local_rewrites(subterm, p):
            yield axiom, replace_at(p, position, rewritten)
