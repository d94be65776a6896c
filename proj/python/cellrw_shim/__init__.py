"""Notebook integration and equivalence harness for the cellrw engine."""

from .cases import EquivalenceCase, GeneratorSpec, fallback_cases, make_case
from .engine import EngineError, find_engine
from .harness import Verdict, check_equivalence, time_pair
from .session import SessionState, hook_cell, load_ipython_extension, rewrite_source, unload_ipython_extension

__all__ = [
    "EngineError", "EquivalenceCase", "GeneratorSpec", "SessionState", "Verdict", "check_equivalence",
    "fallback_cases", "find_engine", "hook_cell", "load_ipython_extension", "make_case", "rewrite_source",
    "time_pair", "unload_ipython_extension",
]
