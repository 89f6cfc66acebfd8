# provcalc/commands/execution.py
import argparse
import logging
from typing import List, TextIO

from provcalc.calculus.engine import Engine, Terminal, step_all
from provcalc.calculus.generators import generate_systems
from provcalc.calculus.provenance import export_dot, export_json, extract_provenance
from provcalc.calculus.syntax import print_process
from provcalc.commands import (
    format_position, numbered, read_process, trace_record, write_file, write_header, write_trace,
)
from provcalc.config import Settings
from provcalc.exceptions import BoundExceeded
from provcalc.schemas import RunReport, Strategy, TerminalRecord

logger = logging.getLogger(__name__)


def step_command(args, config: Settings, out: TextIO) -> int:
    s = read_process(args.file)
    engine = Engine(config)
    write_header(out, config)
    for step in step_all(s, engine.universe_for(s)):
        out.write(f"{step.rule.value}\t{format_position(step.position)}\t{print_process(step.result)}\n")
    return 0


def _write_terminals(args, config: Settings, out: TextIO, terminals: List[Terminal], visited: int) -> None:
    for index, terminal in enumerate(terminals, start=1):
        status = "quiescent" if terminal.quiescent else "stuck"
        out.write(f"terminal {index} ({status}, {len(terminal.trace.steps)} steps): {print_process(terminal.state)}\n")
        write_trace(out, terminal.trace)
    out.write(f"% {len(terminals)} terminals, {visited} states\n")

    quiescent = [t for t in terminals if t.quiescent]
    for index, terminal in enumerate(quiescent, start=1):
        diagram = extract_provenance(terminal.state)
        if args.dot:
            write_file(numbered(args.dot, index, len(quiescent)), export_dot(diagram, max_vertices=config.MAX_DAG_VERTICES))
        if args.json:
            write_file(numbered(args.json, index, len(quiescent)), export_json(diagram, config.MAX_DAG_VERTICES))
    if args.trace_json:
        report = RunReport(
            strategy=config.STRATEGY,
            config=config.as_dict(),
            terminals=[
                TerminalRecord(terminal=print_process(t.state), quiescent=t.quiescent, trace=trace_record(t.trace))
                for t in terminals
            ],
            states_visited=visited,
        )
        write_file(args.trace_json, report.model_dump_json(indent=2) + "\n")


def run_command(args, config: Settings, out: TextIO) -> int:
    s = read_process(args.file)
    write_header(out, config)
    try:
        result = Engine(config).run(s)
    except BoundExceeded as e:
        _write_terminals(args, config, out, e.partial, e.visited)
        out.write("bound-exceeded\n")
        return e.exit_code
    _write_terminals(args, config, out, result.terminals, result.visited)
    return 0


def yields_command(args, config: Settings, out: TextIO) -> int:
    p, q = read_process(args.p_file), read_process(args.q_file)
    write_header(out, config)
    try:
        trace = Engine(config).yields(p, q)
    except BoundExceeded as e:
        out.write("bound-exceeded\n")
        return e.exit_code
    if trace is None:
        out.write("absent\n")
        return 1
    out.write(f"yields in {len(trace.steps)} steps\n")
    write_trace(out, trace)
    return 0


def generate_command(args, config: Settings, out: TextIO) -> int:
    write_header(out, config)
    for term in generate_systems(args.count, config.SEED, args.literals, args.binders):
        out.write(print_process(term) + "\n")
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("step", help="List every one-step evolution")
    parser.add_argument("file")
    parser.set_defaults(handler=step_command)

    parser = subparsers.add_parser("run", help="Execute a system and export provenance")
    parser.add_argument("file")
    parser.add_argument("--dot", help="DOT output for quiescent terminals")
    parser.add_argument("--json", help="JSON output for quiescent terminals")
    parser.add_argument("--trace-json", dest="trace_json", help="Terminals and traces as JSON")
    parser.add_argument("--strategy", choices=[s.value for s in Strategy], default=argparse.SUPPRESS)
    parser.set_defaults(handler=run_command)

    parser = subparsers.add_parser("yields", help="Search a derivation of P from Q")
    parser.add_argument("p_file", metavar="P")
    parser.add_argument("q_file", metavar="Q")
    parser.set_defaults(handler=yields_command)

    parser = subparsers.add_parser("generate", help="Print seeded random System terms")
    parser.add_argument("count", type=int)
    parser.add_argument("--literals", type=int, default=6)
    parser.add_argument("--binders", type=int, default=2)
    parser.set_defaults(handler=generate_command)
