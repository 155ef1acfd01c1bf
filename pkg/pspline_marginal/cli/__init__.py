from pspline_marginal.cli.main import main

__all__ = ["main"]
