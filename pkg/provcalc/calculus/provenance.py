# provcalc/calculus/provenance.py
"""Diagrammes de provenance extraits des états quiescents, export DOT et JSON"""
import logging
from dataclasses import dataclass
from typing import FrozenSet, List

from pydantic import ValidationError

from provcalc.calculus.denotation import term_to_dag
from provcalc.calculus.spdag import Edge, LabelledDag, canonical_form, from_edges, transitive_reduction
from provcalc.calculus.terms import Label, Name, Process, TupleTerm, Valuation, is_quiescent
from provcalc.exceptions import ConfigError, NotQuiescent
from provcalc.schemas import DagDocument, DagEdge, DagNode, Polarity

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProvenanceDiagram:
    dag: LabelledDag
    direct_edges: FrozenSet[Edge]


def diagram_of(dag: LabelledDag) -> ProvenanceDiagram:
    return ProvenanceDiagram(dag, transitive_reduction(dag))


def extract_provenance(terminal: Process, v: Valuation = Valuation()) -> ProvenanceDiagram:
    """Diagramme dénoté par un état qui ne contient qu'artefacts et données stockées"""
    if not is_quiescent(terminal):
        raise NotQuiescent("state still holds consume literals, choices or quantifiers")
    return diagram_of(term_to_dag(terminal, v))


def multi_step_derived_from(diagram: ProvenanceDiagram, u: int, w: int) -> bool:
    return diagram.dag.has_edge(u, w)


def _node_text(label: Label) -> str:
    return str(label).replace("\\", "\\\\").replace('"', '\\"')


def export_dot(diagram: ProvenanceDiagram, transitive: bool = False, max_vertices: int = 16) -> str:
    order = canonical_form(diagram.dag, max_vertices).order
    ids = {v: i for i, v in enumerate(order)}
    edges = diagram.dag.edges if transitive else diagram.direct_edges
    lines = ["digraph provenance {", "  rankdir=BT;"]
    for v in order:
        label = diagram.dag.label(v)
        shape = "box" if label.polarity == Polarity.ARTEFACT else "ellipse"
        lines.append(f'  n{ids[v]} [shape={shape}, label="{_node_text(label)}"];')
    for u, w in sorted((ids[u], ids[w]) for (u, w) in edges):
        lines.append(f"  n{u} -> n{w};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_document(dag: LabelledDag, direct: FrozenSet[Edge], max_vertices: int = 16) -> DagDocument:
    order = canonical_form(dag, max_vertices).order
    ids = {v: i for i, v in enumerate(order)}
    nodes = [
        DagNode(id=ids[v], kind=dag.label(v).polarity, tuple=dag.label(v).data.texts())
        for v in order
    ]
    edges = [
        DagEdge(src=ids[u], dst=ids[w], direct=(u, w) in direct)
        for (u, w) in dag.edges
    ]
    edges.sort(key=lambda edge: (edge.src, edge.dst))
    return DagDocument(nodes=nodes, edges=edges)


def export_json(diagram: ProvenanceDiagram, max_vertices: int = 16) -> str:
    document = to_document(diagram.dag, diagram.direct_edges, max_vertices)
    return document.model_dump_json(indent=2) + "\n"


def load_dag_json(text: str) -> LabelledDag:
    """Relit le format d'export ; les listes d'arêtes peuvent ne pas être closes"""
    try:
        document = DagDocument.model_validate_json(text)
    except ValidationError as e:
        problems = "; ".join(f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors())
        raise ConfigError(f"invalid DAG document: {problems}")
    ids = sorted(node.id for node in document.nodes)
    if ids != list(range(len(ids))):
        raise ConfigError("node ids must be 0..n-1")
    by_id = {node.id: node for node in document.nodes}
    labels: List[Label] = []
    for i in ids:
        node = by_id[i]
        if not node.tuple or any(not text for text in node.tuple):
            raise ConfigError(f"node {i} has an empty tuple")
        labels.append(Label(node.kind, TupleTerm(tuple(Name(text) for text in node.tuple))))
    dag = from_edges(labels, [(edge.src, edge.dst) for edge in document.edges])
    logger.debug(f"loaded DAG with {len(dag)} vertices and {len(dag.edges)} closed edges")
    return dag
