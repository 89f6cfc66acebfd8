# provcalc/calculus/engine.py
"""Sémantique opérationnelle : évolution en un pas, exécution et recherche de dérivations

Un pas remplace une instance de la conclusion d'une règle par sa prémisse : le
nouvel état entraîne toujours l'ancien.
"""
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from provcalc.calculus.congruence import canonical_key
from provcalc.calculus.denotation import DenotationService, Universe
from provcalc.calculus.syntax import print_process
from provcalc.calculus.terms import (
    UNIT, Choice, Exists, Label, Literal, Name, Par, Process, Seq, TupleTerm, Unit, children,
    ground_names, is_quiescent, is_sp_term, is_system, literals, positions, rebuild, replace_at,
    simplify_units, subterm_at, substitute,
)
from provcalc.config import Settings, settings as default_settings
from provcalc.exceptions import BoundExceeded, InvariantViolation
from provcalc.schemas import Polarity, Rule, Strategy

logger = logging.getLogger(__name__)

Position = Tuple[int, ...]

_MARK_CONSUME = Literal(Label(Polarity.CONSUME, TupleTerm((Name("\x00consume"),))))
_MARK_STORED = Literal(Label(Polarity.STORED, TupleTerm((Name("\x00stored"),))))


@dataclass(frozen=True)
class Step:
    rule: Rule
    position: Position
    detail: Tuple[Tuple[str, str], ...]
    result: Process

    def detail_dict(self) -> Dict[str, str]:
        return dict(self.detail)


@dataclass(frozen=True)
class Trace:
    initial: Process
    steps: Tuple[Step, ...] = ()

    @property
    def final(self) -> Process:
        return self.steps[-1].result if self.steps else self.initial

    def extend(self, steps: Sequence[Step]) -> "Trace":
        return Trace(self.initial, self.steps + tuple(steps))

    def rules(self) -> List[Rule]:
        return [step.rule for step in self.steps]

    def replay(self) -> Process:
        """Rejoue chaque pas depuis son prédécesseur ; lève InvariantViolation en cas d'écart"""
        state = self.initial
        for index, step in enumerate(self.steps):
            names = ground_names(state) | ground_names(step.result)
            if "name" in step.detail_dict():
                names |= {Name(step.detail_dict()["name"])}
            target = canonical_key(step.result)
            candidates = _RULES[step.rule](state, Universe(frozenset(names)))
            if not any(c.position == step.position and canonical_key(c.result) == target for c in candidates):
                raise InvariantViolation(f"step {index} ({step.rule.value}) does not follow from its source")
            state = step.result
        return state


@dataclass(frozen=True)
class Terminal:
    state: Process
    trace: Trace
    quiescent: bool


@dataclass
class RunResult:
    terminals: List[Terminal] = field(default_factory=list)
    visited: int = 0


# Grappes parallèles
def _par_operands(p: Process, prefix: Position = ()) -> Iterator[Tuple[Position, Process]]:
    if isinstance(p, Par):
        yield from _par_operands(p.left, prefix + (0,))
        yield from _par_operands(p.right, prefix + (1,))
    else:
        yield prefix, p


def _clusters(s: Process) -> Iterator[Tuple[Position, List[Tuple[Position, Process]]]]:
    """Compositions parallèles maximales et leurs opérandes, à toute profondeur"""
    for position, sub in positions(s):
        if not isinstance(sub, Par):
            continue
        if position and isinstance(subterm_at(s, position[:-1]), Par):
            continue
        yield position, list(_par_operands(sub))


def _compose(node, parts: Sequence[Process]) -> Process:
    parts = [part for part in parts if not isinstance(part, Unit)]
    if not parts:
        return UNIT
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = node(part, result)
    return result


def _segments(p: Process) -> List[Process]:
    if isinstance(p, Seq):
        return _segments(p.left) + _segments(p.right)
    return [] if isinstance(p, Unit) else [p]


def _splits(p: Process) -> Iterator[Tuple[Process, Process]]:
    """Lectures de p comme P;P' avec au plus une unité de remplissage"""
    segments = _segments(p) or [UNIT]
    for cut in range(len(segments) + 1):
        yield _compose(Seq, segments[:cut]), _compose(Seq, segments[cut:])


def _sequence_result(operands: List[Process], i: int, j: int, left: Tuple[Process, Process], right: Tuple[Process, Process]) -> Process:
    (p, p_after), (q, q_after) = left, right
    merged = Seq(_compose(Par, [p, q]), _compose(Par, [p_after, q_after]))
    rest = [o for k, o in enumerate(operands) if k not in (i, j)]
    rest.insert(min(i, j), merged)
    return _compose(Par, rest)


def _sequence_detail(left: Tuple[Process, Process], right: Tuple[Process, Process]) -> Tuple[Tuple[str, str], ...]:
    return (
        ("P", print_process(left[0])),
        ("P'", print_process(left[1])),
        ("Q", print_process(right[0])),
        ("Q'", print_process(right[1])),
    )


# Règles
def step_interact(s: Process, universe: Optional[Universe] = None) -> List[Step]:
    """*d | d -> #d pour chaque paire parallèle stockée/consommée sur le même tuple clos"""
    steps: List[Step] = []
    for position, operands in _clusters(s):
        items = [o for _, o in operands]
        for i, a in enumerate(items):
            if not (isinstance(a, Literal) and a.label.polarity == Polarity.STORED and a.label.data.is_ground):
                continue
            for j, b in enumerate(items):
                if j == i or not (isinstance(b, Literal) and a.label.is_complement_of(b.label)):
                    continue
                rest = [o for k, o in enumerate(items) if k not in (i, j)]
                rest.insert(min(i, j), Literal(Label(Polarity.ARTEFACT, a.label.data)))
                result = simplify_units(replace_at(s, position, _compose(Par, rest)))
                detail = (("tuple", str(a.label.data)), ("stored", str(i)), ("consume", str(j)))
                steps.append(Step(Rule.INTERACT, position, detail, result))
    return steps


def step_sequence(s: Process, universe: Optional[Universe] = None) -> List[Step]:
    """(P;P') | (Q;Q') -> (P|Q);(P'|Q') pour chaque paire d'opérandes parallèles"""
    steps: List[Step] = []
    source = canonical_key(s)
    for position, operands in _clusters(s):
        items = [o for _, o in operands]
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                for left in _splits(items[i]):
                    for right in _splits(items[j]):
                        cluster = _sequence_result(items, i, j, left, right)
                        result = simplify_units(replace_at(s, position, cluster))
                        if canonical_key(result) == source:
                            continue
                        steps.append(Step(Rule.SEQUENCE, position, _sequence_detail(left, right), result))
    return steps


def step_choice(s: Process, universe: Optional[Universe] = None) -> List[Step]:
    steps: List[Step] = []
    for position, sub in positions(s):
        if isinstance(sub, Choice):
            for branch, chosen in (("left", sub.left), ("right", sub.right)):
                result = simplify_units(replace_at(s, position, chosen))
                steps.append(Step(Rule.CHOICE, position, (("branch", branch),), result))
    return steps


def step_exists(s: Process, universe: Optional[Universe] = None) -> List[Step]:
    """ex x.P -> P{x/a} pour chaque nom a de l'univers"""
    universe = universe if universe is not None else Universe(ground_names(s))
    steps: List[Step] = []
    for position, sub in positions(s):
        if isinstance(sub, Exists):
            for name in universe.sorted():
                result = simplify_units(replace_at(s, position, substitute(sub.body, sub.var, name)))
                detail = (("variable", sub.var.text), ("name", name.text))
                steps.append(Step(Rule.EXISTS, position, detail, result))
    return steps


_RULES: Dict[Rule, Callable[[Process, Optional[Universe]], List[Step]]] = {
    Rule.INTERACT: step_interact,
    Rule.SEQUENCE: step_sequence,
    Rule.CHOICE: step_choice,
    Rule.EXISTS: step_exists,
}


def step_all(s: Process, universe: Optional[Universe] = None) -> List[Step]:
    """Toutes les évolutions en un pas, dédoublonnées par (clé canonique, règle)"""
    seen = set()
    steps: List[Step] = []
    for rule in (Rule.INTERACT, Rule.SEQUENCE, Rule.CHOICE, Rule.EXISTS):
        for step in _RULES[rule](s, universe):
            key = (canonical_key(step.result), rule)
            if key not in seen:
                seen.add(key)
                steps.append(step)
    return steps


# Opportunités d'interaction
def _multiplicative_path(s: Process, top: Position, bottom: Position) -> bool:
    for depth in range(len(top), len(bottom)):
        if not isinstance(subterm_at(s, bottom[:depth]), (Seq, Par)):
            return False
    return True


def interaction_pairs(s: Process) -> List[Tuple[Position, Position]]:
    """Positions (consommé, stocké) que des pas de séquence peuvent rapprocher"""
    found = [(pos, sub) for pos, sub in positions(s) if isinstance(sub, Literal) and sub.label.data.is_ground]
    consumers = [(pos, sub) for pos, sub in found if sub.label.polarity == Polarity.CONSUME]
    stores = [(pos, sub) for pos, sub in found if sub.label.polarity == Polarity.STORED]
    pairs: List[Tuple[Position, Position]] = []
    for pc, c in consumers:
        for ps, d in stores:
            if not c.label.is_complement_of(d.label):
                continue
            common = 0
            while common < min(len(pc), len(ps)) and pc[common] == ps[common]:
                common += 1
            top = pc[:common]
            if not isinstance(subterm_at(s, top), Par):
                continue
            if _multiplicative_path(s, top, pc) and _multiplicative_path(s, top, ps):
                pairs.append((pc, ps))
    return pairs


def _find(p: Process, mark: Process) -> Position:
    for position, sub in positions(p):
        if sub == mark:
            return position
    raise InvariantViolation("marked literal lost during sequencing")


def _operand_index(operands: List[Tuple[Position, Process]], root: Position, target: Position) -> int:
    relative = target[len(root):]
    for index, (path, _) in enumerate(operands):
        if relative[:len(path)] == path:
            return index
    raise InvariantViolation("marked literal outside its parallel cluster")


def _segment_index(segments: List[Process], mark: Process) -> int:
    for index, segment in enumerate(segments):
        if any(Literal(label) == mark for label in literals(segment)):
            return index
    raise InvariantViolation("marked literal outside its operand")


def _unmark(p: Process, originals: Dict[Process, Process]) -> Process:
    if p in originals:
        return originals[p]
    kids = children(p)
    new = tuple(_unmark(kid, originals) for kid in kids)
    return p if new == kids else rebuild(p, new)


def bring_together(s: Process, consumer: Position, store: Position) -> List[Step]:
    """Pas de séquence après lesquels les deux littéraux sont opérandes d'un même bloc parallèle

    Chaque pas n'engage que les segments qui précèdent la paire.
    """
    originals = {_MARK_CONSUME: subterm_at(s, consumer), _MARK_STORED: subterm_at(s, store)}
    marked = replace_at(replace_at(s, consumer, _MARK_CONSUME), store, _MARK_STORED)
    steps: List[Step] = []
    for _ in range(4 * len(list(positions(s))) + 4):
        qc, qs = _find(marked, _MARK_CONSUME), _find(marked, _MARK_STORED)
        root = []
        for a, b in zip(qc, qs):
            if a != b:
                break
            root.append(a)
        root = tuple(root)
        while root and isinstance(subterm_at(marked, root[:-1]), Par):
            root = root[:-1]
        operands = list(_par_operands(subterm_at(marked, root)))
        items = [o for _, o in operands]
        ia, ib = _operand_index(operands, root, qc), _operand_index(operands, root, qs)
        if items[ia] == _MARK_CONSUME and items[ib] == _MARK_STORED:
            return steps
        first, second = _segments(items[ia]), _segments(items[ib])
        i, j = _segment_index(first, _MARK_CONSUME), _segment_index(second, _MARK_STORED)
        cut_first, cut_second = (i, j) if i or j else (1, 1)
        left = (_compose(Seq, first[:cut_first]), _compose(Seq, first[cut_first:]))
        right = (_compose(Seq, second[:cut_second]), _compose(Seq, second[cut_second:]))
        cluster = _sequence_result(items, ia, ib, left, right)
        marked = simplify_units(replace_at(marked, root, cluster))
        detail = _sequence_detail(
            tuple(_unmark(part, originals) for part in left),
            tuple(_unmark(part, originals) for part in right),
        )
        steps.append(Step(Rule.SEQUENCE, root, detail, _unmark(marked, originals)))
    raise InvariantViolation("sequencing did not converge")


def _siblings(s: Process, consumer: Position, store: Position) -> bool:
    for root, operands in _clusters(s):
        direct = {root + path for path, _ in operands}
        if consumer in direct and store in direct:
            return True
    return False


def execution_moves(s: Process, universe: Optional[Universe] = None) -> List[Tuple[Step, ...]]:
    """Coups explorés par run : interactions, instanciations et séquencements menant à une interaction"""
    moves: List[Tuple[Step, ...]] = [(step,) for step in step_interact(s)]
    for consumer, store in interaction_pairs(s):
        if not _siblings(s, consumer, store):
            chain = bring_together(s, consumer, store)
            if chain:
                moves.append(tuple(chain))
    moves += [(step,) for step in step_choice(s)]
    moves += [(step,) for step in step_exists(s, universe)]
    seen = set()
    unique: List[Tuple[Step, ...]] = []
    for move in moves:
        key = (canonical_key(move[-1].result), move[0].rule)
        if key not in seen:
            seen.add(key)
            unique.append(move)
    return unique


def _label_counts(p: Process) -> Counter:
    return Counter(literals(p))


def _counts_reachable(state: Process, target: Counter) -> bool:
    """Une interaction échange seulement un littéral stocké et un consommé contre un artefact"""
    have = _label_counts(state)
    for data in {label.data for label in have} | {label.data for label in target}:
        s, c, a = (Label(pol, data) for pol in (Polarity.STORED, Polarity.CONSUME, Polarity.ARTEFACT))
        k = target[a] - have[a]
        if k < 0 or have[s] - target[s] != k or have[c] - target[c] != k:
            return False
    return True


class Engine:
    def __init__(self, config: Optional[Settings] = None):
        self.settings = config or default_settings
        self.denotation = DenotationService(self.settings)

    def universe_for(self, *terms: Process) -> Universe:
        return Universe.for_terms(*terms, extras=self.settings.universe_extras, padding=0)

    def _expand(self, frontier: List, expand: Callable) -> List:
        if self.settings.WORKERS > 1 and len(frontier) > 1:
            with ThreadPoolExecutor(max_workers=self.settings.WORKERS) as pool:
                return list(pool.map(expand, frontier))
        return [expand(item) for item in frontier]

    def run(
        self,
        s: Process,
        universe: Optional[Universe] = None,
        strategy: Optional[Strategy] = None,
    ) -> RunResult:
        strategy = strategy or self.settings.STRATEGY
        if not is_system(s):
            logger.warning("running a term outside the System grammar")
        s = simplify_units(s)
        universe = universe if universe is not None else self.universe_for(s)
        if strategy == Strategy.EAGER:
            return self._run_eager(s, universe)
        return self._run_exhaustive(s, universe)

    def _run_exhaustive(self, s: Process, universe: Universe) -> RunResult:
        seen = {canonical_key(s)}
        frontier = [Trace(s)]
        terminals: List[Terminal] = []
        exceeded = False
        depth = 0
        while frontier:
            expansions = self._expand(frontier, lambda trace: execution_moves(trace.final, universe))
            next_frontier: List[Trace] = []
            for trace, moves in zip(frontier, expansions):
                if not moves:
                    terminals.append(Terminal(trace.final, trace, is_quiescent(trace.final)))
                    continue
                if depth >= self.settings.MAX_DEPTH:
                    exceeded = True
                    continue
                for move in moves:
                    key = canonical_key(move[-1].result)
                    if key in seen:
                        continue
                    if len(seen) >= self.settings.MAX_STATES:
                        exceeded = True
                        break
                    seen.add(key)
                    next_frontier.append(trace.extend(move))
            frontier = next_frontier
            depth += 1
        terminals.sort(key=lambda t: canonical_key(t.state))
        logger.info(f"exhaustive run visited {len(seen)} states, {len(terminals)} terminals")
        if exceeded:
            logger.warning(f"run stopped at a bound after {len(seen)} states")
            raise BoundExceeded(
                f"search bound reached after {len(seen)} states", partial=terminals, visited=len(seen)
            )
        return RunResult(terminals, len(seen))

    def _run_eager(self, s: Process, universe: Universe) -> RunResult:
        trace = Trace(s)
        visited = 1
        while True:
            moves = execution_moves(trace.final, universe)
            if not moves:
                terminal = Terminal(trace.final, trace, is_quiescent(trace.final))
                return RunResult([terminal], visited)
            if len(trace.steps) >= self.settings.MAX_DEPTH or visited >= self.settings.MAX_STATES:
                partial = [Terminal(trace.final, trace, is_quiescent(trace.final))]
                raise BoundExceeded("eager run reached a bound", partial=partial, visited=visited)
            trace = trace.extend(self._eager_choice(trace.final, moves))
            visited += 1

    @staticmethod
    def _eager_choice(s: Process, moves: List[Tuple[Step, ...]]) -> Tuple[Step, ...]:
        """Instanciations habilitantes, puis interactions, puis séquencements, puis le reste"""
        before = len(interaction_pairs(s))

        def rank(move: Tuple[Step, ...]) -> int:
            rule = move[0].rule
            if rule in (Rule.CHOICE, Rule.EXISTS):
                return 0 if len(interaction_pairs(move[-1].result)) > before else 3
            return 1 if rule == Rule.INTERACT else 2

        return min(moves, key=lambda move: (rank(move), canonical_key(move[-1].result)))

    def _viable(self, p: Process, state: Process, target: Optional[Counter], universe: Universe) -> bool:
        """p reste atteignable depuis state : les pas ne font que réduire les dénotations"""
        if target is not None and is_sp_term(state) and not _counts_reachable(state, target):
            return False
        return self.denotation.included(p, state, universe=universe)

    def yields(self, p: Process, q: Process, universe: Optional[Universe] = None) -> Optional[Trace]:
        """Trace de q vers un état congruent à p, None si l'espace est épuisé

        La trace part de q privé de ses unités. Sauf si YIELDS_PRUNING est
        désactivé, les états dont la dénotation ne contient plus celle de p sont élagués.
        """
        pruning = self.settings.YIELDS_PRUNING
        universe = universe if universe is not None else self.universe_for(p, q)
        goal = canonical_key(p)
        start = simplify_units(q)
        if canonical_key(start) == goal:
            return Trace(start)
        target = _label_counts(p) if is_sp_term(p) else None
        if pruning and not self._viable(p, start, target, universe):
            return None
        seen = {canonical_key(start)}
        dead: set = set()
        frontier = [Trace(start)]
        exceeded = False
        depth = 0
        while frontier:
            if depth >= self.settings.MAX_DEPTH:
                exceeded = True
                break
            expansions = self._expand(frontier, lambda trace: step_all(trace.final, universe))
            next_frontier: List[Trace] = []
            for trace, steps in zip(frontier, expansions):
                for step in steps:
                    key = canonical_key(step.result)
                    if key == goal:
                        logger.info(f"yields found a {len(trace.steps) + 1}-step trace after {len(seen)} states")
                        return Trace(start, trace.steps + (step,))
                    if key in seen or key in dead:
                        continue
                    if pruning and not self._viable(p, step.result, target, universe):
                        dead.add(key)
                        continue
                    if len(seen) >= self.settings.MAX_STATES:
                        exceeded = True
                        break
                    seen.add(key)
                    next_frontier.append(trace.extend([step]))
            frontier = next_frontier
            depth += 1
        if exceeded:
            logger.warning(f"yields stopped at a bound after {len(seen)} states")
            raise BoundExceeded(f"search bound reached after {len(seen)} states", visited=len(seen))
        return None


# Instance globale
_engine = Engine()


def run(s: Process, universe: Optional[Universe] = None, strategy: Optional[Strategy] = None) -> RunResult:
    return _engine.run(s, universe, strategy)


def yields(p: Process, q: Process, universe: Optional[Universe] = None) -> Optional[Trace]:
    return _engine.yields(p, q, universe)
