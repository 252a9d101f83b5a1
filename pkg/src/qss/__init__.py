"""Secret sharing, teleportation and Bell nonlocality of three-qubit pure states."""

from . import analysis, bell, correlations, fidelity, oracle, qmath, states
from .analysis import AnalysisRecord, TheoremReport, analyze
from .states import AcinParams, MsrParams, from_acin, from_msr, ghz

__all__ = ["analysis", "bell", "correlations", "fidelity", "oracle", "qmath", "states",
           "AnalysisRecord", "TheoremReport", "analyze",
           "AcinParams", "MsrParams", "from_acin", "from_msr", "ghz"]

__version__ = "0.1.0"
