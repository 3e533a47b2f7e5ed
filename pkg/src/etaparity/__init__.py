"""Parity of the partition function a(n) via eta-quotients over GF(2)."""

__version__ = "0.1.0"

from .gf2series import BitSeries  # noqa: E402
from .etaq import EtaExpr, euler, eval_eta, parse_eta, sparse  # noqa: E402

__all__ = ["BitSeries", "EtaExpr", "euler", "eval_eta", "parse_eta", "sparse", "__version__"]
