# tests/test_provenance.py
import json

import pytest

from provcalc.calculus.provenance import (
    diagram_of, export_dot, export_json, extract_provenance, load_dag_json, multi_step_derived_from,
    to_document,
)
from provcalc.calculus.spdag import canonical_dag, is_n_free
from provcalc.exceptions import ConfigError, CycleError, NotQuiescent, SizeExceeded
from tests.conftest import fixture_path, p

BALTIC_DOT = """digraph provenance {
  rankdir=BT;
  n0 [shape=box, label="#[mill depiction photo]"];
  n1 [shape=ellipse, label="*[baltic depiction photo]"];
  n1 -> n0;
}
"""


def vertex(diagram, text: str) -> int:
    (v,) = [v for v in diagram.dag.vertices if str(diagram.dag.label(v)) == text]
    return v


def test_turner_diagram(turner_final):
    diagram = extract_provenance(turner_final)
    assert len(diagram.dag) == 5
    tate, london, baltic = (vertex(diagram, f"#[turner location {t}]") for t in ("tate", "london", "baltic"))
    tate2, uk = vertex(diagram, "*[turner location tate]"), vertex(diagram, "*[turner location uk]")
    assert diagram.direct_edges == {(baltic, tate), (baltic, london), (uk, tate), (uk, london), (tate2, baltic)}
    assert multi_step_derived_from(diagram, tate2, tate)
    assert (tate2, tate) not in diagram.direct_edges
    assert not multi_step_derived_from(diagram, tate, tate2)
    assert is_n_free(diagram.dag)


def test_extract_needs_a_quiescent_state(turner_init):
    with pytest.raises(NotQuiescent):
        extract_provenance(turner_init)
    with pytest.raises(NotQuiescent):
        extract_provenance(p("#[a] + *[b]"))


def test_empty_diagram():
    diagram = extract_provenance(p("1"))
    assert len(diagram.dag) == 0
    assert export_dot(diagram) == "digraph provenance {\n  rankdir=BT;\n}\n"


def test_export_dot(baltic_final):
    assert export_dot(extract_provenance(baltic_final)) == BALTIC_DOT


def test_export_dot_transitive(turner_final):
    diagram = extract_provenance(turner_final)
    direct = export_dot(diagram).count(" -> ")
    closed = export_dot(diagram, transitive=True).count(" -> ")
    assert (direct, closed) == (5, 7)


def test_export_dot_escapes_quotes():
    diagram = extract_provenance(p('*[<say"hi">]'))
    assert 'label="*[<say\\"hi\\">]"' in export_dot(diagram)


def test_export_dot_is_deterministic(sage_baltic):
    _, indep, _ = sage_baltic
    swapped = p(
        "(#[baltic location gateshead] ; *[baltic location newcastle])"
        " | (#[sage location gateshead] ; *[sage location newcastle])"
    )
    assert export_dot(extract_provenance(indep)) == export_dot(extract_provenance(swapped))


def test_export_json(baltic_final):
    text = export_json(extract_provenance(baltic_final))
    assert text.startswith("{\n  \"nodes\": [\n    {\n      \"id\": 0,")
    assert text.endswith("}\n")
    document = json.loads(text)
    assert document == {
        "nodes": [
            {"id": 0, "kind": "artefact", "tuple": ["mill", "depiction", "photo"]},
            {"id": 1, "kind": "stored", "tuple": ["baltic", "depiction", "photo"]},
        ],
        "edges": [{"src": 1, "dst": 0, "direct": True}],
    }


def test_to_document_marks_transitive_edges(turner_final):
    diagram = extract_provenance(turner_final)
    document = to_document(diagram.dag, diagram.direct_edges)
    assert sum(not edge.direct for edge in document.edges) == 2
    assert [node.id for node in document.nodes] == list(range(5))


def test_json_reload(turner_final):
    diagram = extract_provenance(turner_final)
    reloaded = load_dag_json(export_json(diagram))
    assert canonical_dag(reloaded) == canonical_dag(diagram.dag)
    assert len(diagram_of(reloaded).direct_edges) == 5


def test_load_n_graph():
    with open(fixture_path("n_graph.json"), encoding="utf-8") as handle:
        dag = load_dag_json(handle.read())
    assert len(dag) == 4
    assert not is_n_free(dag)


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        '{"nodes": [{"id": 1, "kind": "stored", "tuple": ["a"]}]}',
        '{"nodes": [{"id": 0, "kind": "stored", "tuple": []}]}',
        '{"nodes": [{"id": 0, "kind": "weird", "tuple": ["a"]}]}',
    ],
)
def test_load_rejects_bad_documents(text):
    with pytest.raises(ConfigError):
        load_dag_json(text)


def test_load_rejects_cycles():
    text = json.dumps({
        "nodes": [{"id": 0, "kind": "stored", "tuple": ["a"]}, {"id": 1, "kind": "stored", "tuple": ["b"]}],
        "edges": [{"src": 0, "dst": 1}, {"src": 1, "dst": 0}],
    })
    with pytest.raises(CycleError):
        load_dag_json(text)


def test_export_respects_the_vertex_bound(turner_final):
    with pytest.raises(SizeExceeded):
        export_json(extract_provenance(turner_final), max_vertices=3)
