# provcalc/calculus/terms.py
"""Syntaxe abstraite des processus, substitution et classement par sous-grammaire"""
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, Iterator, Mapping, Optional, Tuple, Union

from provcalc.exceptions import UnboundVariable
from provcalc.schemas import Grammar, Polarity

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*")


@dataclass(frozen=True, order=True)
class Name:
    text: str

    def __post_init__(self):
        if not self.text:
            raise ValueError("a name cannot be empty")

    def __str__(self) -> str:
        if IDENT_RE.fullmatch(self.text) and self.text != "ex":
            return self.text
        return f"<{self.text}>"


@dataclass(frozen=True, order=True)
class Variable:
    text: str

    def __post_init__(self):
        if not self.text:
            raise ValueError("a variable cannot be empty")

    def __str__(self) -> str:
        return f"?{self.text}"


Atom = Union[Name, Variable]


@dataclass(frozen=True)
class TupleTerm:
    atoms: Tuple[Atom, ...]

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("a tuple needs at least one atom")

    @property
    def is_ground(self) -> bool:
        return all(isinstance(atom, Name) for atom in self.atoms)

    def texts(self) -> Tuple[str, ...]:
        return tuple(atom.text for atom in self.atoms)

    def __str__(self) -> str:
        return "[" + " ".join(str(atom) for atom in self.atoms) + "]"


_MARKERS = {Polarity.CONSUME: "", Polarity.STORED: "*", Polarity.ARTEFACT: "#"}


@dataclass(frozen=True)
class Label:
    polarity: Polarity
    data: TupleTerm

    def complement(self) -> Optional["Label"]:
        """consume(d) <-> stored(d) ; les artefacts n'ont pas de complément"""
        if self.polarity == Polarity.CONSUME:
            return Label(Polarity.STORED, self.data)
        if self.polarity == Polarity.STORED:
            return Label(Polarity.CONSUME, self.data)
        return None

    def is_complement_of(self, other: "Label") -> bool:
        return self.data.is_ground and self.complement() == other

    def __str__(self) -> str:
        return _MARKERS[self.polarity] + str(self.data)


def consume(*atoms: Atom) -> Label:
    return Label(Polarity.CONSUME, TupleTerm(tuple(atoms)))


def stored(*atoms: Atom) -> Label:
    return Label(Polarity.STORED, TupleTerm(tuple(atoms)))


def artefact(*atoms: Atom) -> Label:
    return Label(Polarity.ARTEFACT, TupleTerm(tuple(atoms)))


# Processus
@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class Literal:
    label: Label


@dataclass(frozen=True)
class Seq:
    left: "Process"
    right: "Process"


@dataclass(frozen=True)
class Par:
    left: "Process"
    right: "Process"


@dataclass(frozen=True)
class Choice:
    left: "Process"
    right: "Process"


@dataclass(frozen=True)
class Exists:
    var: Variable
    body: "Process"


Process = Union[Unit, Literal, Seq, Par, Choice, Exists]
BINARY = (Seq, Par, Choice)
UNIT = Unit()


@dataclass(frozen=True)
class Valuation:
    """Application totale des variables vers les noms : surcharges finies sur un défaut optionnel"""
    overrides: Mapping[Variable, Name] = field(default_factory=dict)
    default: Optional[Name] = None

    def __call__(self, x: Variable) -> Name:
        value = self.overrides.get(x, self.default)
        if value is None:
            raise UnboundVariable(x)
        return value

    def covers(self, x: Variable) -> bool:
        return x in self.overrides or self.default is not None

    def extend(self, x: Variable, a: Name) -> "Valuation":
        updated: Dict[Variable, Name] = dict(self.overrides)
        updated[x] = a
        return Valuation(updated, self.default)

    def extend_many(self, pairs: Mapping[Variable, Name]) -> "Valuation":
        updated: Dict[Variable, Name] = dict(self.overrides)
        updated.update(pairs)
        return Valuation(updated, self.default)

    def __hash__(self):
        return hash((frozenset(self.overrides.items()), self.default))


def label_under(label: Label, v: Valuation) -> Label:
    atoms = tuple(v(atom) if isinstance(atom, Variable) else atom for atom in label.data.atoms)
    return Label(label.polarity, TupleTerm(atoms))


def children(p: Process) -> Tuple[Process, ...]:
    if isinstance(p, BINARY):
        return (p.left, p.right)
    if isinstance(p, Exists):
        return (p.body,)
    return ()


def rebuild(p: Process, new_children: Tuple[Process, ...]) -> Process:
    if isinstance(p, BINARY):
        return type(p)(new_children[0], new_children[1])
    if isinstance(p, Exists):
        return Exists(p.var, new_children[0])
    return p


@lru_cache(maxsize=65536)
def free_vars(p: Process) -> FrozenSet[Variable]:
    if isinstance(p, Literal):
        return frozenset(a for a in p.label.data.atoms if isinstance(a, Variable))
    if isinstance(p, Exists):
        return free_vars(p.body) - {p.var}
    result: FrozenSet[Variable] = frozenset()
    for child in children(p):
        result = result | free_vars(child)
    return result


def bound_vars(p: Process) -> FrozenSet[Variable]:
    result = frozenset([p.var]) if isinstance(p, Exists) else frozenset()
    for child in children(p):
        result = result | bound_vars(child)
    return result


def substitute(p: Process, x: Variable, a: Atom) -> Process:
    """Remplace les occurrences libres de x par a

    `a` peut être une Variable lors d'un renommage ; l'appelant garantit qu'elle n'est pas capturée.
    """
    if x not in free_vars(p):
        return p
    if isinstance(p, Literal):
        atoms = tuple(a if atom == x else atom for atom in p.label.data.atoms)
        return Literal(Label(p.label.polarity, TupleTerm(atoms)))
    if isinstance(p, Exists):
        # x est libre ici, le lieur n'est donc pas x
        return Exists(p.var, substitute(p.body, x, a))
    return rebuild(p, tuple(substitute(child, x, a) for child in children(p)))


def apply_valuation(p: Process, v: Valuation) -> Process:
    for x in sorted(free_vars(p)):
        p = substitute(p, x, v(x))
    return p


def literals(p: Process) -> Iterator[Label]:
    if isinstance(p, Literal):
        yield p.label
    for child in children(p):
        yield from literals(child)


def ground_names(p: Process) -> FrozenSet[Name]:
    return frozenset(a for label in literals(p) for a in label.data.atoms if isinstance(a, Name))


def variable_names(p: Process) -> FrozenSet[str]:
    names = {a.text for label in literals(p) for a in label.data.atoms if isinstance(a, Variable)}
    return frozenset(names | {x.text for x in bound_vars(p)})


def binder_count(p: Process) -> int:
    own = 1 if isinstance(p, Exists) else 0
    return own + sum(binder_count(child) for child in children(p))


def literal_count(p: Process) -> int:
    return sum(1 for _ in literals(p))


def subterm_at(p: Process, position: Tuple[int, ...]) -> Process:
    for index in position:
        p = children(p)[index]
    return p


def replace_at(p: Process, position: Tuple[int, ...], new: Process) -> Process:
    if not position:
        return new
    kids = list(children(p))
    kids[position[0]] = replace_at(kids[position[0]], position[1:], new)
    return rebuild(p, tuple(kids))


def positions(p: Process, prefix: Tuple[int, ...] = ()) -> Iterator[Tuple[Tuple[int, ...], Process]]:
    """Parcours préfixe produisant (position, sous-terme)"""
    yield prefix, p
    for index, child in enumerate(children(p)):
        yield from positions(child, prefix + (index,))


def simplify_units(p: Process) -> Process:
    """Retire les unités avec 1;Q = Q;1 = Q|1 = Q et ex x.1 = 1"""
    if isinstance(p, (Seq, Par)):
        left, right = simplify_units(p.left), simplify_units(p.right)
        if isinstance(left, Unit):
            return right
        if isinstance(right, Unit):
            return left
        return type(p)(left, right)
    if isinstance(p, Choice):
        return Choice(simplify_units(p.left), simplify_units(p.right))
    if isinstance(p, Exists):
        body = simplify_units(p.body)
        return UNIT if isinstance(body, Unit) else Exists(p.var, body)
    return p


def is_quiescent(p: Process) -> bool:
    """Il ne reste que des artefacts, des données stockées, des unités, Seq et Par"""
    if isinstance(p, Unit):
        return True
    if isinstance(p, Literal):
        return p.label.polarity != Polarity.CONSUME
    if isinstance(p, (Seq, Par)):
        return is_quiescent(p.left) and is_quiescent(p.right)
    return False


def is_sp_term(p: Process) -> bool:
    if isinstance(p, (Unit, Literal)):
        return True
    if isinstance(p, (Seq, Par)):
        return is_sp_term(p.left) and is_sp_term(p.right)
    return False


# Sous-grammaires
def is_data(p: Process) -> bool:
    if isinstance(p, Unit):
        return True
    if isinstance(p, Literal):
        return p.label.polarity == Polarity.STORED
    if isinstance(p, Par):
        return is_data(p.left) and is_data(p.right)
    return False


def is_query(p: Process) -> bool:
    if isinstance(p, Unit):
        return True
    if isinstance(p, Literal):
        return p.label.polarity == Polarity.CONSUME
    if isinstance(p, (Par, Choice)):
        return is_query(p.left) and is_query(p.right)
    if isinstance(p, Exists):
        return is_query(p.body)
    return False


def is_update(p: Process) -> bool:
    # une requête Q est aussi la mise à jour Q;1
    if is_query(p):
        return True
    if isinstance(p, Seq):
        return is_query(p.left) and is_data(p.right)
    if isinstance(p, Choice):
        return is_update(p.left) and is_update(p.right)
    if isinstance(p, Exists):
        return is_update(p.body)
    return False


def is_system(p: Process) -> bool:
    if isinstance(p, Unit):
        return True
    if isinstance(p, Literal) and p.label.polarity != Polarity.CONSUME:
        return True
    if is_update(p):
        return True
    if isinstance(p, (Seq, Par)):
        return is_system(p.left) and is_system(p.right)
    return False


def classify(p: Process) -> Grammar:
    """Sous-grammaire la plus spécifique contenant p"""
    if is_data(p):
        return Grammar.DATA
    if is_query(p):
        return Grammar.QUERY
    if is_update(p):
        return Grammar.UPDATE
    if is_system(p):
        return Grammar.SYSTEM
    return Grammar.GENERAL
