# provcalc/calculus/denotation.py
"""Dénotations comme idéaux de DAG série-parallèles étiquetés, et leur inclusion"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import count, product
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple

from provcalc.calculus.congruence import normalize
from provcalc.calculus.spdag import (
    LabelledDag, canonical_dag, coherent_pairs, empty, find_hom, is_n_free, merge_pair,
    par_compose, seq_compose, singleton,
)
from provcalc.calculus.terms import (
    Literal, Name, Par, Process, Seq, Unit, Valuation, Variable, binder_count, free_vars,
    ground_names, label_under,
)
from provcalc.config import Settings, settings as default_settings
from provcalc.exceptions import EmptyUniverse
from provcalc.schemas import HomKind, Membership

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Universe:
    """Substitut fini de l'ensemble infini des noms"""
    names: FrozenSet[Name] = frozenset()

    @classmethod
    def for_terms(cls, *terms: Process, extras: Iterable[str] = (), padding: Optional[int] = None) -> "Universe":
        """Noms des termes, plus extras, plus `padding` noms frais

        Par défaut, `padding` vaut le plus grand nombre de lieurs plus le nombre de variables libres.
        """
        names = set(Name(text) for text in extras)
        for term in terms:
            names |= ground_names(term)
        if padding is None:
            loose = set()
            for term in terms:
                loose |= free_vars(term)
            padding = max((binder_count(term) for term in terms), default=0) + len(loose)
        taken = {name.text for name in names}
        fresh = (f"_fresh{i}" for i in count(1) if f"_fresh{i}" not in taken)
        names |= {Name(next(fresh)) for _ in range(padding)}
        return cls(frozenset(names))

    def sorted(self) -> List[Name]:
        return sorted(self.names)

    def with_names(self, extra: Iterable[Name]) -> "Universe":
        return Universe(self.names | frozenset(extra))

    def __len__(self) -> int:
        return len(self.names)


@dataclass(frozen=True)
class IdealRep:
    """ι_kind(generators) ; keys sont les formes canoniques des générateurs"""
    kind: HomKind
    generators: Tuple[LabelledDag, ...]
    keys: Tuple[bytes, ...]


def term_to_dag(t: Process, v: Valuation = Valuation()) -> LabelledDag:
    if isinstance(t, Unit):
        return empty()
    if isinstance(t, Literal):
        return singleton(label_under(t.label, v))
    if isinstance(t, Seq):
        return seq_compose(term_to_dag(t.left, v), term_to_dag(t.right, v))
    if isinstance(t, Par):
        return par_compose(term_to_dag(t.left, v), term_to_dag(t.right, v))
    raise ValueError(f"not a series-parallel term: {type(t).__name__}")


def _valuations(variables: List[Variable], universe: Universe, base: Valuation) -> Iterator[Valuation]:
    names = universe.sorted()
    if variables and not names:
        raise EmptyUniverse()
    for values in product(names, repeat=len(variables)):
        yield base.extend_many(dict(zip(variables, values)))


class DenotationService:
    def __init__(self, config: Optional[Settings] = None):
        self.settings = config or default_settings

    def denote(
        self,
        p: Process,
        v: Valuation = Valuation(),
        kind: HomKind = HomKind.INTERACTION,
        universe: Optional[Universe] = None,
    ) -> IdealRep:
        """Générateurs de ⟦p⟧ sous v : un DAG par terme de la somme et par instanciation"""
        universe = universe if universe is not None else Universe.for_terms(p, extras=self.settings.universe_extras)
        nf = normalize(p)
        found: Dict[bytes, LabelledDag] = {}
        for summand in nf.summands:
            used = [x for x in nf.prefix if x in free_vars(summand)]
            for valuation in _valuations(used, universe, v):
                dag = term_to_dag(summand, valuation)
                found.setdefault(canonical_dag(dag, self.settings.MAX_DAG_VERTICES), dag)
        keys = tuple(sorted(found))
        return IdealRep(kind, tuple(found[key] for key in keys), keys)

    def member(self, d: LabelledDag, ideal: IdealRep) -> bool:
        # les idéaux ne contiennent que des DAG série-parallèles
        if not is_n_free(d):
            return False
        if self.settings.MEMBERSHIP == Membership.STEPWISE:
            return any(self._member_stepwise(g, d, ideal.kind) for g in ideal.generators)
        return any(find_hom(g, d, ideal.kind) is not None for g in ideal.generators)

    def _member_stepwise(self, g: LabelledDag, d: LabelledDag, kind: HomKind) -> bool:
        """Chaînes de fusions cohérentes une à une, suivies d'un lissage"""
        if kind != HomKind.INTERACTION:
            return find_hom(g, d, kind) is not None
        target = {label: d.labels.count(label) for label in set(d.labels)}
        frontier = [g]
        seen = {canonical_dag(g, self.settings.MAX_DAG_VERTICES)}
        while frontier:
            state = frontier.pop(0)
            if len(state) == len(d):
                if find_hom(state, d, HomKind.SMOOTHING) is not None:
                    return True
                continue
            for u, v in coherent_pairs(state):
                stored_label = state.label(v)
                if state.labels.count(stored_label) <= target.get(stored_label, 0):
                    continue
                merged = merge_pair(state, u, v)
                key = canonical_dag(merged, self.settings.MAX_DAG_VERTICES)
                if key not in seen:
                    seen.add(key)
                    frontier.append(merged)
        return False

    def included(
        self,
        p: Process,
        q: Process,
        kind: HomKind = HomKind.INTERACTION,
        universe: Optional[Universe] = None,
        v: Optional[Valuation] = None,
    ) -> bool:
        """⟦p⟧ ⊆ ⟦q⟧ pour toute valuation des variables libres non fixées par v"""
        universe = universe if universe is not None else Universe.for_terms(
            p, q, extras=self.settings.universe_extras
        )
        base = v or Valuation()
        loose = sorted(x for x in free_vars(p) | free_vars(q) if not base.covers(x))
        for valuation in _valuations(loose, universe, base):
            lower = self.denote(p, valuation, kind, universe)
            upper = self.denote(q, valuation, kind, universe)
            if not self._all_members(lower.generators, upper):
                logger.debug(f"inclusion fails under {dict(valuation.overrides)}")
                return False
        return True

    def _all_members(self, generators: Tuple[LabelledDag, ...], ideal: IdealRep) -> bool:
        if self.settings.WORKERS > 1 and len(generators) > 1:
            with ThreadPoolExecutor(max_workers=self.settings.WORKERS) as pool:
                return all(pool.map(lambda g: self.member(g, ideal), generators))
        return all(self.member(g, ideal) for g in generators)


# Instance globale
_service = DenotationService()


def denote(
    p: Process,
    v: Valuation = Valuation(),
    kind: HomKind = HomKind.INTERACTION,
    universe: Optional[Universe] = None,
) -> IdealRep:
    return _service.denote(p, v, kind, universe)


def ideal_member(d: LabelledDag, ideal: IdealRep) -> bool:
    return _service.member(d, ideal)


def ideal_included(
    p: Process,
    q: Process,
    kind: HomKind = HomKind.INTERACTION,
    universe: Optional[Universe] = None,
    v: Optional[Valuation] = None,
) -> bool:
    return _service.included(p, q, kind, universe, v)
