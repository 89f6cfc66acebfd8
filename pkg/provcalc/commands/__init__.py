# provcalc/commands/__init__.py
"""Groupes de sous-commandes ; chaque module expose register(subparsers)"""
import logging
from pathlib import Path
from typing import Sequence, TextIO

from provcalc.calculus.engine import Trace
from provcalc.calculus.syntax import parse_process, parse_triples, print_process
from provcalc.calculus.terms import Process
from provcalc.config import Settings
from provcalc.exceptions import ConfigError
from provcalc.schemas import StepRecord, TraceRecord

logger = logging.getLogger(__name__)


def read_text(path: str) -> str:
    file = Path(path)
    if not file.is_file():
        raise ConfigError(f"input file not found: {path}")
    return file.read_text(encoding="utf-8")


def read_process(path: str) -> Process:
    """Fichier de processus, ou de triplets si le nom finit par .nt"""
    text = read_text(path)
    if path.endswith(".nt"):
        return parse_triples(text)
    return parse_process(text)


def write_header(out: TextIO, config: Settings) -> None:
    out.write(f"% {config.header()}\n")


def format_position(position: Sequence[int]) -> str:
    return "/" + "/".join(str(i) for i in position)


def trace_record(trace: Trace) -> TraceRecord:
    return TraceRecord(
        initial=print_process(trace.initial),
        steps=[
            StepRecord(
                rule=step.rule,
                position=list(step.position),
                detail=step.detail_dict(),
                result=print_process(step.result),
            )
            for step in trace.steps
        ],
    )


def write_trace(out: TextIO, trace: Trace, indent: str = "  ") -> None:
    for step in trace.steps:
        out.write(f"{indent}{step.rule.value} {format_position(step.position)} {print_process(step.result)}\n")


def numbered(path: str, index: int, total: int) -> str:
    """out.dot, ou out.2.dot quand plusieurs fichiers sont écrits"""
    if total <= 1:
        return path
    file = Path(path)
    return str(file.with_name(f"{file.stem}.{index}{file.suffix}"))


def write_file(path: str, content: str) -> None:
    Path(path).write_text(content, encoding="utf-8", newline="\n")
    logger.info(f"wrote {path}")
