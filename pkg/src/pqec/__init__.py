"""Equivalence checking of parameterized quantum circuits.

Equivalence is proved symbolically with ZX-diagram rewriting when possible;
otherwise parameters are instantiated, first by solving for Clifford-friendly
angles and finally at random, and the instances go to a complete oracle.
"""

from .circuit import Circuit, Gate, GateKind, concatenate, dumps, inverse, load, parse, unitary
from .densecheck import EquivalenceResult, dense_equiv, oracle_equiv, pauli_equiv, stimuli_equiv
from .flow import CheckConfig, EquivalenceChecker, Verdict, check, check_report
from .harness import AnsatzSpec, ErrorModel, compile_like, generate, inject_errors
from .instantiator import AngleSystem, Assignment, collect_system, greedy_solve, random_assignment, target_schedule
from .symphase import ParamExpr, PhaseClass, parse_expr

__version__ = "0.1.0"

__all__ = [
    "AngleSystem",
    "AnsatzSpec",
    "Assignment",
    "CheckConfig",
    "Circuit",
    "EquivalenceChecker",
    "EquivalenceResult",
    "ErrorModel",
    "Gate",
    "GateKind",
    "ParamExpr",
    "PhaseClass",
    "Verdict",
    "check",
    "check_report",
    "collect_system",
    "compile_like",
    "concatenate",
    "dense_equiv",
    "dumps",
    "generate",
    "greedy_solve",
    "inject_errors",
    "inverse",
    "load",
    "oracle_equiv",
    "parse",
    "parse_expr",
    "pauli_equiv",
    "random_assignment",
    "stimuli_equiv",
    "target_schedule",
    "unitary",
]
