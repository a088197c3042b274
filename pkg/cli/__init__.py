from .commands import cli, run_cli

__all__ = ["cli", "run_cli"]
