# provcalc/main.py
import argparse
import io
import logging
import sys
from typing import List, Optional

from provcalc.commands import execution, provenance, semantics, terms
from provcalc.config import Settings, load_settings
from provcalc.exceptions import InvariantViolation, ProvCalcError
from provcalc.schemas import Membership, Strategy

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def configure_logging(config: Settings) -> None:
    """Uniquement sur stderr, stdout reste déterministe octet par octet"""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if config.LOG_FILE:
        handlers.append(logging.FileHandler(config.LOG_FILE, encoding="utf-8"))
    logging.basicConfig(level=config.LOG_LEVEL, format=LOG_FORMAT, handlers=handlers, force=True)


def get_parser() -> argparse.ArgumentParser:
    """Factory pour le parseur avec ses sous-commandes"""
    parser = argparse.ArgumentParser(
        prog="provcalc",
        description="Calcul de mises à jour avec suivi de provenance: execution, denotation and provenance export",
    )
    parser.add_argument("--config", help="key=value file with PROVCALC_ keys")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--max-states", dest="max_states", type=int)
    parser.add_argument("--max-depth", dest="max_depth", type=int)
    parser.add_argument("--max-dag-vertices", dest="max_dag_vertices", type=int)
    parser.add_argument("--strategy", choices=[s.value for s in Strategy])
    parser.add_argument("--membership", choices=[m.value for m in Membership])
    parser.add_argument(
        "--no-pruning", dest="yields_pruning", action="store_false", default=None,
        help="Plain breadth-first yields search, without denotation pruning",
    )
    parser.add_argument("--universe", action="append", metavar="NAME", help="Extra name for quantifier instantiation")
    parser.add_argument("--workers", type=int)
    parser.add_argument("--log-level", dest="log_level", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])

    subparsers = parser.add_subparsers(dest="command", required=True)
    for group in (terms, execution, semantics, provenance):
        group.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = get_parser().parse_args(argv)
    out = io.StringIO()
    try:
        config = load_settings(
            args.config,
            SEED=args.seed,
            MAX_STATES=args.max_states,
            MAX_DEPTH=args.max_depth,
            MAX_DAG_VERTICES=args.max_dag_vertices,
            STRATEGY=args.strategy,
            MEMBERSHIP=args.membership,
            YIELDS_PRUNING=args.yields_pruning,
            UNIVERSE_EXTRAS=args.universe,
            WORKERS=args.workers,
            LOG_LEVEL=args.log_level,
        )
        configure_logging(config)
        code = args.handler(args, config, out)
    except ProvCalcError as e:
        if isinstance(e, InvariantViolation):
            logger.critical(f"Invariant violation: {e.detail}", exc_info=True)
        sys.stdout.write(out.getvalue())
        sys.stderr.write(f"error: {e.detail}\n")
        return e.exit_code
    sys.stdout.write(out.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
