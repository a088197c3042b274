"""
Entry point for the cmdkit command line.

    python main.py build fixtures/fig5.mdl
    python main.py impact fixtures/mediator.mdl fixtures/mediator_v2.mdl --class-level
"""

import sys

from cli.commands import run_cli

if __name__ == "__main__":
    sys.exit(run_cli())
