# provcalc/calculus/generators.py
"""Termes aléatoires à graine pour la commande `generate` et les grandes suites de tests"""
import logging
import random
from typing import List, Optional, Sequence

from provcalc.calculus.terms import (
    UNIT, Choice, Exists, Label, Literal, Name, Par, Process, Seq, TupleTerm, Variable, simplify_units,
)
from provcalc.schemas import Polarity

logger = logging.getLogger(__name__)

DEFAULT_NAMES = ("a", "b", "c")


class TermGenerator:
    """Petits alphabets, pour que les littéraux stockés et consommés se rencontrent souvent"""

    def __init__(self, seed: int = 0, names: Sequence[str] = DEFAULT_NAMES, max_arity: int = 2):
        self.random = random.Random(seed)
        self.names = [Name(text) for text in names]
        self.max_arity = max_arity
        self._fresh = 0
        self._binders_left = 0

    def tuple_term(self, variables: Sequence[Variable] = ()) -> TupleTerm:
        arity = self.random.randint(1, self.max_arity)
        pool: List = list(self.names) + list(variables)
        return TupleTerm(tuple(self.random.choice(pool) for _ in range(arity)))

    def literal(self, polarity: Polarity, variables: Sequence[Variable] = ()) -> Literal:
        return Literal(Label(polarity, self.tuple_term(variables)))

    def _split(self, n: int) -> int:
        return self.random.randint(1, n - 1)

    # Termes série-parallèles
    def sp_term(self, literals: int, polarities: Sequence[Polarity] = tuple(Polarity)) -> Process:
        if literals <= 0:
            return UNIT
        if literals == 1:
            return self.literal(self.random.choice(list(polarities)))
        k = self._split(literals)
        node = self.random.choice((Seq, Par))
        return node(self.sp_term(k, polarities), self.sp_term(literals - k, polarities))

    # Systèmes
    def system(self, max_literals: int = 6, max_binders: int = 2) -> Process:
        self._binders_left = max_binders
        return self._system(self.random.randint(1, max_literals))

    def _system(self, n: int) -> Process:
        shape = self.random.choice(("seq", "par", "update") if n > 1 else ("literal", "update"))
        if shape == "literal":
            return self.literal(self.random.choice((Polarity.STORED, Polarity.ARTEFACT)))
        if shape == "update":
            return self._update(n)
        k = self._split(n)
        node = Seq if shape == "seq" else Par
        return node(self._system(k), self._system(n - k))

    def _fresh_variable(self) -> Optional[Variable]:
        if self._binders_left <= 0 or self.random.random() < 0.5:
            return None
        self._binders_left -= 1
        self._fresh += 1
        return Variable(f"x{self._fresh}")

    def _update(self, n: int) -> Process:
        """ex x. Q ; D avec n littéraux au total"""
        x = self._fresh_variable()
        scope = [x] if x is not None else []
        queried = self.random.randint(1, n)
        body = self._query(queried, scope)
        if queried < n:
            body = Seq(body, self._data(n - queried, scope))
        return Exists(x, body) if x is not None else body

    def _query(self, n: int, scope: List[Variable]) -> Process:
        if n == 1:
            return self.literal(Polarity.CONSUME, scope)
        k = self._split(n)
        node = self.random.choice((Par, Choice))
        return node(self._query(k, scope), self._query(n - k, scope))

    def _data(self, n: int, scope: List[Variable]) -> Process:
        if n == 1:
            return self.literal(Polarity.STORED, scope)
        k = self._split(n)
        return Par(self._data(k, scope), self._data(n - k, scope))

    # Paires incluses par interaction mais pas par lissage
    def interaction_pair(self, max_literals: int = 4) -> tuple:
        """(p, q) où q tient *d | d à côté d'un contexte et p l'artefact #d à sa place"""
        context = self.sp_term(self.random.randint(0, max_literals), (Polarity.STORED, Polarity.ARTEFACT))
        data = TupleTerm((Name("d"),))
        made, kept, wanted = (Literal(Label(polarity, data)) for polarity in (
            Polarity.ARTEFACT, Polarity.STORED, Polarity.CONSUME,
        ))
        shape = self.random.choice(("beside", "after", "before"))
        if shape == "beside":
            p, q = Par(context, made), Par(context, Par(kept, wanted))
        elif shape == "after":
            p, q = Seq(context, made), Par(Seq(context, kept), wanted)
        else:
            p, q = Seq(made, context), Par(Seq(kept, context), wanted)
        return simplify_units(p), simplify_units(q)


def generate_systems(count: int, seed: int, max_literals: int = 6, max_binders: int = 2) -> List[Process]:
    generator = TermGenerator(seed)
    terms = [generator.system(max_literals, max_binders) for _ in range(count)]
    logger.debug(f"generated {count} system terms from seed {seed}")
    return terms


def generate_sp_pairs(count: int, seed: int, max_literals: int = 5) -> List[tuple]:
    generator = TermGenerator(seed, names=("a", "b"), max_arity=1)
    pairs = []
    for _ in range(count):
        p = generator.sp_term(generator.random.randint(1, max_literals))
        q = generator.sp_term(generator.random.randint(1, max_literals))
        pairs.append((p, q))
    return pairs


def generate_interaction_pairs(count: int, seed: int, max_literals: int = 4) -> List[tuple]:
    generator = TermGenerator(seed, names=("a", "b"), max_arity=1)
    return [generator.interaction_pair(max_literals) for _ in range(count)]
