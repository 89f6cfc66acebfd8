# provcalc/commands/provenance.py
import logging
from typing import TextIO

from provcalc.calculus.provenance import export_dot, export_json, extract_provenance, load_dag_json
from provcalc.calculus.spdag import sp_decompose
from provcalc.calculus.syntax import print_process
from provcalc.commands import read_process, read_text, write_file
from provcalc.config import Settings
from provcalc.exceptions import NotSeriesParallel
from provcalc.schemas import SpCheckReport

logger = logging.getLogger(__name__)


def provenance_command(args, config: Settings, out: TextIO) -> int:
    diagram = extract_provenance(read_process(args.file))
    dot = export_dot(diagram, transitive=args.transitive, max_vertices=config.MAX_DAG_VERTICES)
    document = export_json(diagram, config.MAX_DAG_VERTICES)
    if args.dot:
        write_file(args.dot, dot)
    if args.json:
        write_file(args.json, document)
    if not (args.dot or args.json):
        out.write(dot if args.format == "dot" else document)
    return 0


def spcheck_command(args, config: Settings, out: TextIO) -> int:
    dag = load_dag_json(read_text(args.file))
    try:
        report = SpCheckReport(n_free=True, decomposition=print_process(sp_decompose(dag)))
    except NotSeriesParallel as e:
        report = SpCheckReport(n_free=False, witness=list(e.witness))
    out.write(report.model_dump_json(indent=2) + "\n")
    return 0 if report.n_free else 1


def register(subparsers) -> None:
    parser = subparsers.add_parser("provenance", help="Provenance diagram of a quiescent term")
    parser.add_argument("file")
    parser.add_argument("--format", choices=["dot", "json"], default="dot")
    parser.add_argument("--transitive", action="store_true", help="Draw every derived-from edge")
    parser.add_argument("--dot")
    parser.add_argument("--json")
    parser.set_defaults(handler=provenance_command)

    parser = subparsers.add_parser("spcheck", help="N-free verdict for a DAG in JSON")
    parser.add_argument("file")
    parser.set_defaults(handler=spcheck_command)
