import sys

from .cli_commands import cli
from .exceptions import IonCnotSimException
from .util import logger


def main():
    try:
        cli()
    except IonCnotSimException as e:
        logger.error(e)
        sys.exit(e.exit_code)
