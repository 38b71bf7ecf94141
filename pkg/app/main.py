import sys

import click

from app.cli.commands import app, exit_code_for
from app.config import settings
from app.logger import logger


def main(argv=None) -> int:
    """
    Run the CLI and return its exit code.

    Usage errors (unknown flags, bad option values) count as input errors.
    """
    logger.debug(f"padic-darboux starting ({settings.environment})")
    try:
        code = app(args=argv, prog_name="padic-darboux", standalone_mode=False)
    except click.exceptions.UsageError as e:
        e.show()
        return exit_code_for(e)
    except click.exceptions.Abort as e:
        return exit_code_for(e)
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
