# provcalc/commands/terms.py
import logging
from typing import TextIO

from provcalc.calculus.congruence import normalize
from provcalc.calculus.syntax import print_process
from provcalc.calculus.terms import classify
from provcalc.commands import read_process
from provcalc.config import Settings

logger = logging.getLogger(__name__)


def parse_command(args, config: Settings, out: TextIO) -> int:
    p = read_process(args.file)
    out.write(print_process(p) + "\n")
    if args.classify:
        out.write(f"% grammar {classify(p).value}\n")
    return 0


def normalize_command(args, config: Settings, out: TextIO) -> int:
    out.write(str(normalize(read_process(args.file))) + "\n")
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("parse", help="Parse a term and print it canonically")
    parser.add_argument("file")
    parser.add_argument("--classify", action="store_true", help="Also print the sub-grammar")
    parser.set_defaults(handler=parse_command)

    parser = subparsers.add_parser("normalize", help="Print the prenex choice normal form")
    parser.add_argument("file")
    parser.set_defaults(handler=normalize_command)
