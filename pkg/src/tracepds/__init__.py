"""Reachability and first-order model checking for loop-connected
trace-pushdown systems, with Foata-normal-form automatic relations."""

__version__ = "0.1.0"

from .errors import DiagnosticFailure, InputError, PreconditionError, TracePdsError
from .traces import DependenceAlphabet, Trace, factorizations, fnf_of_word
from .automata import Nfa, EpsilonNfa
from .tracelang import TraceClosedLang, trace_closure, fnf_encode
from .relations import FnfRelation
from .system import Tpds, check_p1, check_p2, saturate, check_loop_connected, validate
from .reach import ReachTable, build_table
from .logic import parse, translate, evaluate

__all__ = [
    "DiagnosticFailure", "InputError", "PreconditionError", "TracePdsError",
    "DependenceAlphabet", "Trace", "factorizations", "fnf_of_word",
    "Nfa", "EpsilonNfa", "TraceClosedLang", "trace_closure", "fnf_encode",
    "FnfRelation", "Tpds", "check_p1", "check_p2", "saturate",
    "check_loop_connected", "validate", "ReachTable", "build_table",
    "parse", "translate", "evaluate",
]
