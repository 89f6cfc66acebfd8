# tests/test_acceptance.py
"""Contrôles de bout en bout sur les exemples et sur des corpus aléatoires à graine

Les corpus complets portent le marqueur `slow` : les lancer avec `pytest -m slow`.
"""
import logging
from collections import Counter

import pytest
from hypothesis import assume, given, settings

from provcalc.calculus.congruence import canonical_key, congruent, normalize, single_rewrites
from provcalc.calculus.denotation import Universe, denote, ideal_included, term_to_dag
from provcalc.calculus.engine import Engine, step_all
from provcalc.calculus.generators import generate_sp_pairs, generate_systems
from provcalc.calculus.provenance import extract_provenance
from provcalc.calculus.spdag import canonical_dag, empty, is_n_free, par_compose, seq_compose, singleton
from provcalc.calculus.terms import (
    Choice, Exists, Literal, Name, Seq, Unit, binder_count, literals, substitute,
)
from provcalc.config import Settings
from provcalc.exceptions import BoundExceeded
from provcalc.schemas import HomKind, Polarity, Rule, Strategy
from tests.strategies import closed_processes, interacting_pairs, mirror, systems

logger = logging.getLogger(__name__)


@pytest.fixture
def engine(config) -> Engine:
    return Engine(config)


def quiescent_diagrams(terminals):
    return [extract_provenance(t.state) for t in terminals if t.quiescent]


def test_turner_end_to_end(engine, turner_init, turner_final):
    result = engine.run(turner_init)
    (final,) = [t for t in result.terminals if t.quiescent and congruent(t.state, turner_final)]
    diagram = extract_provenance(final.state)
    assert canonical_dag(diagram.dag) == canonical_dag(term_to_dag(turner_final))
    assert len(diagram.direct_edges) == 5
    assert all(is_n_free(d.dag) for d in quiescent_diagrams(result.terminals))


def test_baltic_end_to_end(engine, baltic, baltic_final):
    result = engine.run(baltic)
    (diagram,) = quiescent_diagrams(result.terminals)
    assert canonical_dag(diagram.dag) == canonical_dag(term_to_dag(baltic_final))
    assert is_n_free(diagram.dag)


def test_sage_baltic_end_to_end(engine, sage_baltic):
    init, indep, joint = sage_baltic
    for p, q in ((indep, init), (joint, indep), (joint, init)):
        assert engine.yields(p, q) is not None
    assert ideal_included(joint, indep) and ideal_included(indep, init)
    assert not ideal_included(indep, joint) and not ideal_included(init, indep)
    for diagram in quiescent_diagrams(engine.run(init).terminals):
        assert is_n_free(diagram.dag)


def check_soundness(count: int, seed: int) -> None:
    violations = []
    for system in generate_systems(count, seed, max_literals=6, max_binders=2):
        universe = Universe.for_terms(system)
        for step in step_all(system, universe):
            if not ideal_included(step.result, system, universe=universe):
                violations.append((system, step.rule))
            elif step.rule == Rule.SEQUENCE and not ideal_included(
                step.result, system, kind=HomKind.SMOOTHING, universe=universe
            ):
                violations.append((system, step.rule))
    assert violations == []


def check_completeness(count: int, seed: int, max_literals: int = 5, pruning: bool = True) -> None:
    engine = Engine(Settings(_env_file=None, YIELDS_PRUNING=pruning))
    disagreements, exceeded = [], 0
    for p, q in generate_sp_pairs(count, seed, max_literals=max_literals):
        try:
            found = engine.yields(p, q) is not None
        except BoundExceeded:
            exceeded += 1
            continue
        if found != ideal_included(p, q):
            disagreements.append((p, q))
    logger.info(f"completeness: {exceeded} of {count} pairs hit a bound")
    assert disagreements == []
    assert exceeded <= count // 100


def check_provenance_closure(count: int, seed: int) -> None:
    engine = Engine()
    for system in generate_systems(count, seed, max_literals=6, max_binders=2):
        try:
            terminals = engine.run(system, strategy=Strategy.EAGER).terminals
        except BoundExceeded as e:
            terminals = e.partial
        for diagram in quiescent_diagrams(terminals):
            assert is_n_free(diagram.dag)


def test_soundness():
    check_soundness(60, seed=1)


def test_completeness():
    check_completeness(40, seed=2)


def test_completeness_without_pruning():
    check_completeness(30, seed=4, max_literals=3, pruning=False)


def test_provenance_closure():
    check_provenance_closure(60, seed=3)


@pytest.mark.slow
def test_soundness_full():
    check_soundness(1000, seed=11)


@pytest.mark.slow
def test_completeness_full():
    check_completeness(300, seed=12)


@pytest.mark.slow
def test_completeness_without_pruning_full():
    check_completeness(300, seed=14, max_literals=4, pruning=False)


@pytest.mark.slow
def test_provenance_closure_full():
    check_provenance_closure(1000, seed=13)


def check_axiom_coherence(term) -> None:
    assume(binder_count(term) <= 2)
    key = canonical_key(term)
    for axiom, rewritten in single_rewrites(term):
        assert canonical_key(rewritten) == key, axiom
        universe = Universe.for_terms(term, rewritten)
        assert ideal_included(term, rewritten, universe=universe), axiom
        assert ideal_included(rewritten, term, universe=universe), axiom


@settings(max_examples=50, deadline=None)
@given(closed_processes)
def test_axioms_preserve_denotations(term):
    check_axiom_coherence(term)


@pytest.mark.slow
@settings(max_examples=500, deadline=None)
@given(closed_processes)
def test_axioms_preserve_denotations_full(term):
    check_axiom_coherence(term)


# Interaction sans lissage
@settings(max_examples=30, deadline=None)
@given(interacting_pairs)
def test_interaction_pairs_need_an_interact_step(pair):
    p, q = pair
    assert ideal_included(p, q)
    assert not ideal_included(p, q, kind=HomKind.SMOOTHING)
    trace = Engine().yields(p, q)
    assert trace is not None
    (first, *_) = [rule for rule in trace.rules() if rule != Rule.SEQUENCE]
    assert first == Rule.INTERACT
    assert congruent(trace.replay(), p)


# Stabilité de l'univers
@settings(max_examples=30, deadline=None)
@given(closed_processes, closed_processes)
def test_inclusion_does_not_depend_on_extra_names(p, q):
    assume(binder_count(p) <= 2 and binder_count(q) <= 2)
    universe = Universe.for_terms(p, q)
    wider = universe.with_names([Name("z1"), Name("z2")])
    assert ideal_included(p, q, universe=universe) == ideal_included(p, q, universe=wider)


# Conservation des étiquettes
def polarity_counts(term) -> Counter:
    return Counter(label.polarity for label in literals(term))


@settings(max_examples=40, deadline=None)
@given(systems)
def test_steps_conserve_labels(system):
    before = polarity_counts(system)
    for step in step_all(system, Universe.for_terms(system, padding=0)):
        after = polarity_counts(step.result)
        if step.rule == Rule.INTERACT:
            assert before - after == Counter({Polarity.STORED: 1, Polarity.CONSUME: 1})
            assert after[Polarity.ARTEFACT] == before[Polarity.ARTEFACT] + 1
        elif step.rule == Rule.SEQUENCE:
            assert Counter(literals(step.result)) == Counter(literals(system))
        elif step.rule == Rule.EXISTS:
            assert after == before
        else:
            assert not after - before


# Indépendance de l'ordre d'exploration
def terminal_keys(system, config: Settings) -> set:
    try:
        result = Engine(config).run(system, strategy=Strategy.EXHAUSTIVE)
    except BoundExceeded:
        assume(False)
    return {(canonical_key(t.state), t.quiescent) for t in result.terminals}


@settings(max_examples=25, deadline=None)
@given(systems)
def test_exhaustive_run_ignores_operand_order(system):
    config = Settings(_env_file=None, MAX_STATES=2000)
    keys = terminal_keys(system, config)
    assert terminal_keys(mirror(system), config) == keys
    assert terminal_keys(system, Settings(_env_file=None, MAX_STATES=2000, WORKERS=3)) == keys


# Forme normale et dénotation
def direct_generators(t, universe: Universe) -> list:
    if isinstance(t, Unit):
        return [empty()]
    if isinstance(t, Literal):
        return [singleton(t.label)]
    if isinstance(t, Choice):
        return direct_generators(t.left, universe) + direct_generators(t.right, universe)
    if isinstance(t, Exists):
        return [
            g for name in universe.sorted()
            for g in direct_generators(substitute(t.body, t.var, name), universe)
        ]
    compose = seq_compose if isinstance(t, Seq) else par_compose
    return [
        compose(a, b)
        for a in direct_generators(t.left, universe)
        for b in direct_generators(t.right, universe)
    ]


@settings(max_examples=40, deadline=None)
@given(closed_processes)
def test_normal_form_keeps_the_denotation(term):
    assume(binder_count(term) <= 2)
    universe = Universe.for_terms(term)
    direct = {canonical_dag(g) for g in direct_generators(term, universe)}
    assert direct == set(denote(term, universe=universe).keys)
    prenex = normalize(term).to_process()
    assert ideal_included(term, prenex, universe=universe)
    assert ideal_included(prenex, term, universe=universe)
