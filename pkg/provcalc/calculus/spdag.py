# provcalc/calculus/spdag.py
"""DAG transitifs étiquetés, reconnaissance série-parallèle, formes canoniques et homomorphismes

Une arête (u, w) se lit « u est dérivé de w » : elle va de la donnée tardive à la donnée antérieure.
"""
import json
import logging
from collections import Counter
from dataclasses import dataclass
from itertools import combinations, permutations, product
from math import factorial, prod
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from provcalc.calculus.terms import Label, Literal, Par, Process, Seq, UNIT
from provcalc.exceptions import CycleError, InvariantViolation, NotSeriesParallel, SizeExceeded
from provcalc.schemas import HomKind, Polarity

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
# au-delà, la recherche exhaustive de forme canonique est refusée
MAX_CANONICAL_PERMUTATIONS = 200_000


@dataclass(frozen=True)
class LabelledDag:
    """Sommets 0..n-1 ; arêtes toujours transitivement closes"""
    labels: Tuple[Label, ...]
    edges: FrozenSet[Edge] = frozenset()

    @property
    def vertices(self) -> range:
        return range(len(self.labels))

    def __len__(self) -> int:
        return len(self.labels)

    def label(self, v: int) -> Label:
        return self.labels[v]

    def has_edge(self, u: int, w: int) -> bool:
        return (u, w) in self.edges

    def comparable(self, u: int, w: int) -> bool:
        return (u, w) in self.edges or (w, u) in self.edges

    def successors(self, u: int) -> List[int]:
        """Sommets dont u est dérivé"""
        return sorted(w for (a, w) in self.edges if a == u)

    def predecessors(self, w: int) -> List[int]:
        return sorted(u for (u, b) in self.edges if b == w)

    def sources(self) -> List[int]:
        """Sommets les plus tardifs : rien n'en est dérivé"""
        targets = {w for (_, w) in self.edges}
        return [v for v in self.vertices if v not in targets]

    def sinks(self) -> List[int]:
        """Sommets les plus anciens : ils ne sont dérivés de rien"""
        origins = {u for (u, _) in self.edges}
        return [v for v in self.vertices if v not in origins]

    def induced(self, vertices: Sequence[int]) -> "LabelledDag":
        index = {v: i for i, v in enumerate(vertices)}
        edges = frozenset((index[u], index[w]) for (u, w) in self.edges if u in index and w in index)
        return LabelledDag(tuple(self.labels[v] for v in vertices), edges)

    def relabel(self, order: Sequence[int]) -> "LabelledDag":
        """Le sommet order[i] devient le sommet i"""
        return self.induced(order)

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        for v in self.vertices:
            graph.add_node(v, label=self.labels[v])
        graph.add_edges_from(self.edges)
        return graph

    def is_transitive(self) -> bool:
        return all((u, x) in self.edges for (u, w) in self.edges for (a, x) in self.edges if a == w)

    def check(self) -> None:
        if any(u == w for (u, w) in self.edges):
            raise InvariantViolation("self-loop in DAG")
        if not nx.is_directed_acyclic_graph(self.to_networkx()):
            raise InvariantViolation("cycle in DAG")
        if not self.is_transitive():
            raise InvariantViolation("DAG is not transitively closed")


def empty() -> LabelledDag:
    return LabelledDag(())


def singleton(label: Label) -> LabelledDag:
    if not label.data.is_ground:
        raise ValueError(f"singleton needs a ground label, got {label}")
    return LabelledDag((label,))


def from_edges(labels: Sequence[Label], edges: Iterable[Edge]) -> LabelledDag:
    """Clôture d'un ensemble d'arêtes acyclique quelconque"""
    graph = nx.DiGraph()
    graph.add_nodes_from(range(len(labels)))
    for (u, w) in edges:
        if u == w:
            raise CycleError(f"self-loop on vertex {u}")
        if not (0 <= u < len(labels) and 0 <= w < len(labels)):
            raise CycleError(f"edge ({u}, {w}) leaves the vertex set")
        graph.add_edge(u, w)
    if not nx.is_directed_acyclic_graph(graph):
        raise CycleError("edges contain a directed cycle")
    closure = nx.transitive_closure_dag(graph)
    return LabelledDag(tuple(labels), frozenset(closure.edges()))


def _shift(edges: FrozenSet[Edge], offset: int) -> FrozenSet[Edge]:
    return frozenset((u + offset, w + offset) for (u, w) in edges)


def par_compose(a: LabelledDag, b: LabelledDag) -> LabelledDag:
    return LabelledDag(a.labels + b.labels, a.edges | _shift(b.edges, len(a)))


def seq_compose(first: LabelledDag, second: LabelledDag) -> LabelledDag:
    """Chaque sommet de `second` est dérivé de chaque sommet de `first`"""
    offset = len(first)
    cross = frozenset((offset + j, i) for j in second.vertices for i in first.vertices)
    return LabelledDag(first.labels + second.labels, first.edges | _shift(second.edges, offset) | cross)


def seq_compose_boundary(first: LabelledDag, second: LabelledDag) -> LabelledDag:
    """Clôture des arêtes de bord sinks(second) x sources(first)"""
    offset = len(first)
    boundary = [(offset + j, i) for j in second.sinks() for i in first.sources()]
    edges = list(first.edges) + list(_shift(second.edges, offset)) + boundary
    return from_edges(first.labels + second.labels, edges)


def transitive_reduction(d: LabelledDag) -> FrozenSet[Edge]:
    graph = nx.DiGraph()
    graph.add_nodes_from(d.vertices)
    graph.add_edges_from(d.edges)
    return frozenset(nx.transitive_reduction(graph).edges())


def coherent(d: LabelledDag, u: int, v: int) -> bool:
    """u et v portent consume(t)/stored(t) pour un même t clos et sont incomparables"""
    return u != v and d.label(u).is_complement_of(d.label(v)) and not d.comparable(u, v)


def coherent_pairs(d: LabelledDag) -> List[Edge]:
    """Paires (sommet consommé, sommet stocké)"""
    return [
        (u, v)
        for u in d.vertices
        if d.label(u).polarity == Polarity.CONSUME
        for v in d.vertices
        if coherent(d, u, v)
    ]


def merge_pair(d: LabelledDag, u: int, v: int) -> LabelledDag:
    """Plus petit DAG identifiant la paire cohérente u, v en un sommet artefact"""
    if not coherent(d, u, v):
        raise InvariantViolation(f"vertices {u} and {v} are not coherent")
    keep = [x for x in d.vertices if x != v]
    index = {x: i for i, x in enumerate(keep)}
    index[v] = index[u]
    labels = [d.label(x) for x in keep]
    labels[index[u]] = Label(Polarity.ARTEFACT, d.label(u).data)
    edges = {(index[a], index[b]) for (a, b) in d.edges}
    return from_edges(labels, edges)


# Forme N
def find_n_shape(d: LabelledDag) -> Optional[Tuple[int, int, int, int]]:
    """(v0, v1, v2, v3) induisant exactement {(v2,v0), (v3,v0), (v3,v1)}, s'il existe"""
    for quad in combinations(d.vertices, 4):
        inner = [(u, w) for (u, w) in d.edges if u in quad and w in quad]
        if len(inner) != 3:
            continue
        out_degree = Counter(u for u, _ in inner)
        in_degree = Counter(w for _, w in inner)
        v3 = [x for x in quad if out_degree[x] == 2]
        v2 = [x for x in quad if out_degree[x] == 1]
        v0 = [x for x in quad if in_degree[x] == 2]
        v1 = [x for x in quad if in_degree[x] == 1]
        if not (len(v3) == len(v2) == len(v0) == len(v1) == 1):
            continue
        shape = {(v2[0], v0[0]), (v3[0], v0[0]), (v3[0], v1[0])}
        if set(inner) == shape and len({v0[0], v1[0], v2[0], v3[0]}) == 4:
            return (v0[0], v1[0], v2[0], v3[0])
    return None


def is_n_free(d: LabelledDag) -> bool:
    return find_n_shape(d) is None


# Décomposition série-parallèle
def _comparability(d: LabelledDag, vertices: Sequence[int]) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(vertices)
    members = set(vertices)
    graph.add_edges_from((u, w) for (u, w) in d.edges if u in members and w in members)
    return graph


def _components(graph: nx.Graph) -> List[List[int]]:
    return sorted((sorted(part) for part in nx.connected_components(graph)), key=min)


def _sp_tree(d: LabelledDag, vertices: List[int]):
    """("v", x) | ("par", [trees]) | ("seq", [trees] earliest first), ou None"""
    if len(vertices) == 1:
        return ("v", vertices[0])
    comparability = _comparability(d, vertices)
    parts = _components(comparability)
    if len(parts) > 1:
        trees = [_sp_tree(d, part) for part in parts]
        return None if any(t is None for t in trees) else ("par", trees)
    layers = _components(nx.complement(comparability))
    if len(layers) == 1:
        return None
    for first in layers:
        rest = [x for x in vertices if x not in first]
        if all((x, c) in d.edges for x in rest for c in first):
            head, tail = _sp_tree(d, first), _sp_tree(d, rest)
            if head is None or tail is None:
                return None
            items = [head] + (tail[1] if tail[0] == "seq" else [tail])
            return ("seq", items)
    return None


def _tree_to_process(d: LabelledDag, tree) -> Process:
    if tree[0] == "v":
        return Literal(d.label(tree[1]))
    node = Par if tree[0] == "par" else Seq
    parts = [_tree_to_process(d, child) for child in tree[1]]
    result = parts[-1]
    for part in reversed(parts[:-1]):
        result = node(part, result)
    return result


def sp_decompose(d: LabelledDag) -> Process:
    """Terme série-parallèle dénotant d ; lève NotSeriesParallel avec un témoin N"""
    if len(d) == 0:
        return UNIT
    tree = _sp_tree(d, list(d.vertices))
    if tree is not None:
        return _tree_to_process(d, tree)
    witness = find_n_shape(d)
    if witness is None:
        logger.critical(f"decomposition failed on an N-free DAG with {len(d)} vertices")
        raise InvariantViolation("series-parallel decomposition failed without an N witness")
    raise NotSeriesParallel(witness)


# Formes canoniques
@dataclass(frozen=True)
class CanonicalForm:
    key: bytes
    order: Tuple[int, ...]


def _dumps(value) -> str:
    return json.dumps(value, ensure_ascii=False, separators=(",", ":"))


def _label_key(label: Label) -> list:
    return [label.polarity.value, list(label.data.texts())]


def _tree_key(d: LabelledDag, tree) -> Tuple[list, List[int]]:
    if tree[0] == "v":
        return ["L"] + _label_key(d.label(tree[1])), [tree[1]]
    parts = [_tree_key(d, child) for child in tree[1]]
    if tree[0] == "par":
        parts.sort(key=lambda part: _dumps(part[0]))
    order = [v for _, vs in parts for v in vs]
    return ["P" if tree[0] == "par" else "S", [k for k, _ in parts]], order


def _refined_classes(d: LabelledDag) -> List[List[int]]:
    colours = {v: _dumps(_label_key(d.label(v))) for v in d.vertices}
    while True:
        signature = {
            v: _dumps([
                colours[v],
                sorted(colours[w] for w in d.successors(v)),
                sorted(colours[u] for u in d.predecessors(v)),
            ])
            for v in d.vertices
        }
        ranks = {s: i for i, s in enumerate(sorted(set(signature.values())))}
        refined = {v: str(ranks[signature[v]]) for v in d.vertices}
        if len(set(refined.values())) == len(set(colours.values())):
            break
        colours = {v: signature[v] for v in d.vertices}
    groups: Dict[str, List[int]] = {}
    for v in d.vertices:
        groups.setdefault(signature[v], []).append(v)
    return [groups[key] for key in sorted(groups)]


def _search_canonical(d: LabelledDag) -> CanonicalForm:
    classes = _refined_classes(d)
    if prod(factorial(len(c)) for c in classes) > MAX_CANONICAL_PERMUTATIONS:
        raise SizeExceeded(f"canonical form search too large for {len(d)} vertices")
    best = None
    for choice in product(*(permutations(c) for c in classes)):
        order = [v for part in choice for v in part]
        position = {v: i for i, v in enumerate(order)}
        encoding = sorted((position[u], position[w]) for (u, w) in d.edges)
        if best is None or encoding < best[0]:
            best = (encoding, order)
    encoding, order = best if best is not None else ([], [])
    key = ["G", [_label_key(d.label(v)) for v in order], encoding]
    return CanonicalForm(_dumps(key).encode("utf-8"), tuple(order))


def canonical_form(d: LabelledDag, max_vertices: int = 16) -> CanonicalForm:
    """Clé invariante par isomorphisme et ordre canonique des sommets"""
    if len(d) > max_vertices:
        raise SizeExceeded(f"DAG has {len(d)} vertices, bound is {max_vertices}")
    if len(d) == 0:
        return CanonicalForm(b'["S",[]]', ())
    tree = _sp_tree(d, list(d.vertices))
    if tree is None:
        return _search_canonical(d)
    key, order = _tree_key(d, tree)
    return CanonicalForm(_dumps(key).encode("utf-8"), tuple(order))


def canonical_dag(d: LabelledDag, max_vertices: int = 16) -> bytes:
    return canonical_form(d, max_vertices).key


# Homomorphismes
@dataclass(frozen=True)
class HomWitness:
    """mapping[i] est l'image du sommet source i"""
    kind: HomKind
    mapping: Tuple[int, ...]

    def fibers(self) -> Dict[int, List[int]]:
        result: Dict[int, List[int]] = {}
        for u, w in enumerate(self.mapping):
            result.setdefault(w, []).append(u)
        return result

    @property
    def merges(self) -> List[List[int]]:
        return [fiber for fiber in self.fibers().values() if len(fiber) > 1]


def _merge_counts_match(src: LabelledDag, dst: LabelledDag) -> bool:
    """Comptage des étiquettes : une fusion change stocké+consommé en un artefact"""
    before, after = Counter(src.labels), Counter(dst.labels)
    merged = 0
    data = {label.data for label in src.labels} | {label.data for label in dst.labels}
    for t in data:
        s = Label(Polarity.STORED, t)
        c = Label(Polarity.CONSUME, t)
        a = Label(Polarity.ARTEFACT, t)
        k = before[s] - after[s]
        if k < 0 or before[c] - after[c] != k or after[a] - before[a] != k:
            return False
        if k and not t.is_ground:
            return False
        merged += k
    return len(src) - len(dst) == merged


class _HomSearch:
    def __init__(self, src: LabelledDag, dst: LabelledDag, kind: HomKind):
        self.src = src
        self.dst = dst
        self.kind = kind
        self.onto = kind != HomKind.LABELLED
        self.out = {u: set(src.successors(u)) for u in src.vertices}
        self.into = {u: set(src.predecessors(u)) for u in src.vertices}
        self.order = sorted(src.vertices, key=lambda u: (-(len(self.out[u]) + len(self.into[u])), u))
        self.mapping: Dict[int, int] = {}
        self.fiber: Dict[int, List[int]] = {w: [] for w in dst.vertices}
        self.unhit = len(dst)
        self.half = 0

    def candidates(self, u: int) -> List[int]:
        label = self.src.label(u)
        merged = Label(Polarity.ARTEFACT, label.data)
        may_merge = (
            self.kind == HomKind.INTERACTION
            and label.polarity != Polarity.ARTEFACT
            and label.data.is_ground
        )
        return [
            w for w in self.dst.vertices
            if self.dst.label(w) == label or (may_merge and self.dst.label(w) == merged)
        ]

    def fits(self, u: int, w: int) -> bool:
        fiber = self.fiber[w]
        label, target = self.src.label(u), self.dst.label(w)
        if self.kind == HomKind.SMOOTHING and fiber:
            return False
        if self.kind == HomKind.INTERACTION and fiber:
            if label == target or len(fiber) > 1:
                return False
            other = fiber[0]
            if not (label.is_complement_of(self.src.label(other)) and not self.src.comparable(u, other)):
                return False
        for v in self.out[u]:
            if v in self.mapping and (w, self.mapping[v]) not in self.dst.edges:
                return False
        for v in self.into[u]:
            if v in self.mapping and (self.mapping[v], w) not in self.dst.edges:
                return False
        return True

    def assign(self, u: int, w: int) -> None:
        fiber = self.fiber[w]
        if not fiber:
            self.unhit -= 1
            if self.src.label(u) != self.dst.label(w):
                self.half += 1
        elif len(fiber) == 1 and self.src.label(fiber[0]) != self.dst.label(w):
            self.half -= 1
        fiber.append(u)
        self.mapping[u] = w

    def unassign(self, u: int, w: int) -> None:
        fiber = self.fiber[w]
        fiber.pop()
        del self.mapping[u]
        if not fiber:
            self.unhit += 1
            if self.src.label(u) != self.dst.label(w):
                self.half -= 1
        elif len(fiber) == 1 and self.src.label(fiber[0]) != self.dst.label(w):
            self.half += 1

    def search(self, depth: int = 0) -> bool:
        remaining = len(self.order) - depth
        if self.onto and self.unhit + self.half > remaining:
            return False
        if depth == len(self.order):
            return not self.onto or (self.unhit == 0 and self.half == 0)
        u = self.order[depth]
        for w in self.candidates(u):
            if self.fits(u, w):
                self.assign(u, w)
                if self.search(depth + 1):
                    return True
                self.unassign(u, w)
        return False

    def run(self) -> Optional[HomWitness]:
        if self.kind == HomKind.SMOOTHING:
            if Counter(self.src.labels) != Counter(self.dst.labels):
                return None
        elif self.kind == HomKind.INTERACTION:
            if not _merge_counts_match(self.src, self.dst):
                return None
        if not self.search():
            return None
        witness = HomWitness(self.kind, tuple(self.mapping[u] for u in self.src.vertices))
        if any(len(fiber) > 2 for fiber in witness.fibers().values()):
            raise InvariantViolation("interaction witness merges three vertices")
        return witness


def find_hom(src: LabelledDag, dst: LabelledDag, kind: HomKind) -> Optional[HomWitness]:
    return _HomSearch(src, dst, kind).run()


def find_interaction_hom(src: LabelledDag, dst: LabelledDag) -> Optional[HomWitness]:
    return find_hom(src, dst, HomKind.INTERACTION)


def find_smoothing_hom(src: LabelledDag, dst: LabelledDag) -> Optional[HomWitness]:
    return find_hom(src, dst, HomKind.SMOOTHING)


def find_labelled_hom(src: LabelledDag, dst: LabelledDag) -> Optional[HomWitness]:
    return find_hom(src, dst, HomKind.LABELLED)


def verify_hom(witness: HomWitness, src: LabelledDag, dst: LabelledDag) -> bool:
    """Vérifie un témoin selon son type sans se fier à la recherche"""
    f = witness.mapping
    if len(f) != len(src) or any(not 0 <= w < len(dst) for w in f):
        return False
    if any((f[u], f[w]) not in dst.edges for (u, w) in src.edges):
        return False
    fibers = witness.fibers()
    if witness.kind == HomKind.LABELLED:
        return all(src.label(u) == dst.label(f[u]) for u in src.vertices)
    if set(fibers) != set(dst.vertices):
        return False
    for w, fiber in fibers.items():
        if len(fiber) == 1:
            if src.label(fiber[0]) != dst.label(w):
                return False
        elif witness.kind == HomKind.SMOOTHING or len(fiber) > 2:
            return False
        else:
            u, v = fiber
            if not coherent(src, u, v):
                return False
            if dst.label(w) != Label(Polarity.ARTEFACT, src.label(u).data):
                return False
    return True


def compose_hom(f: HomWitness, g: HomWitness) -> HomWitness:
    """g après f"""
    if f.kind == g.kind:
        kind = f.kind
    elif HomKind.LABELLED in (f.kind, g.kind):
        kind = HomKind.LABELLED
    else:
        kind = HomKind.INTERACTION
    return HomWitness(kind, tuple(g.mapping[w] for w in f.mapping))
