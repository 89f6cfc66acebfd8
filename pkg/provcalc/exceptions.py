# provcalc/exceptions.py
from typing import Any, List, Optional, Sequence, Tuple


class ProvCalcError(Exception):
    """Erreur de base, porte le code de sortie de la CLI"""

    exit_code: int = 4

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ConfigError(ProvCalcError):
    exit_code = 2


class ParseError(ProvCalcError):
    """Syntaxe concrète invalide

    Args:
        span: SourceSpan du jeton fautif
        expected: descriptions des jetons qui auraient été acceptés
        found: texte du jeton effectivement trouvé
    """

    exit_code = 2

    def __init__(self, span: Any, expected: Sequence[str], found: str):
        self.span = span
        self.expected = list(expected)
        self.found = found
        super().__init__(
            f"{span.line}:{span.column}: expected {' or '.join(self.expected)}, found {found!r}"
        )


class UnboundVariable(ProvCalcError):
    exit_code = 2

    def __init__(self, variable: Any):
        self.variable = variable
        super().__init__(f"no value for variable ?{variable.text}")


class EmptyUniverse(ProvCalcError):
    exit_code = 2

    def __init__(self):
        super().__init__("cannot instantiate quantifiers over an empty universe")


class NotQuiescent(ProvCalcError):
    exit_code = 2


class CycleError(ProvCalcError):
    exit_code = 2


class BoundExceeded(ProvCalcError):
    """Recherche arrêtée par une borne avant d'avoir épuisé l'espace d'états"""

    exit_code = 3

    def __init__(self, detail: str, partial: Optional[List[Any]] = None, visited: int = 0):
        super().__init__(detail)
        self.partial = partial or []
        self.visited = visited


class SizeExceeded(ProvCalcError):
    exit_code = 3


class InvariantViolation(ProvCalcError):
    exit_code = 4


class NotSeriesParallel(ProvCalcError):
    """Levée par sp_decompose ; `witness` donne (v0, v1, v2, v3) formant le N"""

    exit_code = 1

    def __init__(self, witness: Tuple[int, int, int, int]):
        self.witness = witness
        super().__init__(f"N-shaped subgraph on vertices {list(witness)}")
