"""
maskcorr - Main Entry Point

Command line simulator and verifier for masking a qubit into the
correlations of three parties.
"""

import logging
import sys
from typing import List, Optional

from maskcorr.components.cli import run_cli
from maskcorr.utils.helpers import get_log_level, load_environment

# Load environment variables
load_environment()


def configure_logging(verbosity: int = 0) -> None:
    """Log to stderr; -v and -vv override MASKCORR_LOG_LEVEL."""
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, get_log_level(), logging.WARNING)

    logging.basicConfig(
        stream=sys.stderr,
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _count_verbose(argv: List[str]) -> int:
    count = 0
    for arg in argv:
        if arg == "--verbose":
            count += 1
        elif arg.startswith("-") and not arg.startswith("--") and set(arg[1:]) == {"v"}:
            count += len(arg) - 1
    return count


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point."""
    argv = list(sys.argv[1:] if argv is None else argv)
    configure_logging(_count_verbose(argv))
    return run_cli(argv)


if __name__ == "__main__":
    sys.exit(main())
