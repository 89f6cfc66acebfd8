# provcalc/commands/semantics.py
import logging
from typing import TextIO

from provcalc.calculus.denotation import DenotationService
from provcalc.calculus.provenance import to_document
from provcalc.calculus.spdag import transitive_reduction
from provcalc.commands import read_process, write_header
from provcalc.config import Settings
from provcalc.schemas import GeneratorSet, HomKind

logger = logging.getLogger(__name__)

KINDS = {"s": HomKind.SMOOTHING, "i": HomKind.INTERACTION, "l": HomKind.LABELLED}
KINDS.update({kind.value: kind for kind in HomKind})


def denote_command(args, config: Settings, out: TextIO) -> int:
    p = read_process(args.file)
    ideal = DenotationService(config).denote(p, kind=KINDS[args.kind])
    document = GeneratorSet(
        kind=ideal.kind,
        config=config.as_dict(),
        generators=[to_document(g, transitive_reduction(g), config.MAX_DAG_VERTICES) for g in ideal.generators],
    )
    out.write(document.model_dump_json(indent=2) + "\n")
    return 0


def include_command(args, config: Settings, out: TextIO) -> int:
    p, q = read_process(args.p_file), read_process(args.q_file)
    write_header(out, config)
    verdict = DenotationService(config).included(p, q, KINDS[args.kind])
    out.write("true\n" if verdict else "false\n")
    return 0 if verdict else 1


def register(subparsers) -> None:
    parser = subparsers.add_parser("denote", help="Generator DAGs of a term as JSON")
    parser.add_argument("file")
    parser.add_argument("--kind", choices=sorted(KINDS), default="i")
    parser.set_defaults(handler=denote_command)

    parser = subparsers.add_parser("include", help="Decide whether the ideal of P is included in that of Q")
    parser.add_argument("p_file", metavar="P")
    parser.add_argument("q_file", metavar="Q")
    parser.add_argument("--kind", choices=sorted(KINDS), default="i")
    parser.set_defaults(handler=include_command)
