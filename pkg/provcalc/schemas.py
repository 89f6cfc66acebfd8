from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class Polarity(str, Enum):
    """Polarités d'un littéral"""
    CONSUME = "consume"
    STORED = "stored"
    ARTEFACT = "artefact"


class Grammar(str, Enum):
    """Sous-grammaires des processus, de la plus spécifique à la plus générale"""
    DATA = "Data"
    QUERY = "Query"
    UPDATE = "Update"
    SYSTEM = "System"
    GENERAL = "General"


class Rule(str, Enum):
    INTERACT = "interact"
    SEQUENCE = "sequence"
    CHOICE = "choice"
    EXISTS = "exists"


class Strategy(str, Enum):
    """Stratégies d'exécution"""
    EXHAUSTIVE = "exhaustive"
    EAGER = "eager"


class HomKind(str, Enum):
    LABELLED = "labelled"
    SMOOTHING = "smoothing"
    INTERACTION = "interaction"


class Membership(str, Enum):
    """Méthode de décision de l'appartenance à un idéal"""
    WITNESS = "witness"
    STEPWISE = "stepwise"


# Export des diagrammes
class DagNode(BaseModel):
    id: int
    kind: Polarity
    tuple: List[str]


class DagEdge(BaseModel):
    src: int
    dst: int
    direct: bool = True


class DagDocument(BaseModel):
    """Forme JSON d'un DAG étiqueté ; `src` est dérivé de `dst`"""
    nodes: List[DagNode] = Field(default_factory=list)
    edges: List[DagEdge] = Field(default_factory=list)

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "nodes": [
                    {"id": 0, "kind": "artefact", "tuple": ["mill", "depiction", "photo"]},
                    {"id": 1, "kind": "stored", "tuple": ["baltic", "depiction", "photo"]},
                ],
                "edges": [{"src": 1, "dst": 0, "direct": True}],
            }
        }
    )


class GeneratorSet(BaseModel):
    """Sortie de `denote`"""
    kind: HomKind
    config: Dict[str, str] = Field(default_factory=dict)
    generators: List[DagDocument] = Field(default_factory=list)


# Traces d'exécution
class StepRecord(BaseModel):
    rule: Rule
    position: List[int]
    detail: Dict[str, str] = Field(default_factory=dict)
    result: str


class TraceRecord(BaseModel):
    initial: str
    steps: List[StepRecord] = Field(default_factory=list)


class TerminalRecord(BaseModel):
    terminal: str
    quiescent: bool
    trace: TraceRecord


class RunReport(BaseModel):
    strategy: Strategy
    config: Dict[str, str] = Field(default_factory=dict)
    terminals: List[TerminalRecord] = Field(default_factory=list)
    states_visited: int = 0


class SpCheckReport(BaseModel):
    n_free: bool
    witness: Optional[List[int]] = None
    decomposition: Optional[str] = None
