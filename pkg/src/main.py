"""Entry point for the ``auditml`` command line."""

import logging
import sys
from typing import Optional, Sequence

from src import __version__
from src.cli.commands import Context, build_parser
from src.cli.reports import ReportWriter
from src.config import load_config
from src.errors import AuditMLError

logger = logging.getLogger(__name__)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and return its exit code.

    0 on success, 2 for usage or configuration errors, 3 for data errors and 4
    for training or convergence errors. Failures print one ``error[CODE]: ...``
    line to stderr.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    logging.basicConfig(
        level=args.log_level or logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        config = load_config(args.config).with_overrides(seed=args.seed, out=args.out)
        if args.log_level is None:
            logging.getLogger().setLevel(config.runtime.log_level)
        logger.info(f"auditml {__version__}: {args.command} (seed {config.eval.seed})")
        ctx = Context(args=args, config=config, writer=ReportWriter(config.output.dir))
        return args.handler(ctx)
    except AuditMLError as err:
        logger.debug("Command failed", exc_info=True)
        print(f"error[{err.code}]: {err}", file=sys.stderr)
        return err.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
