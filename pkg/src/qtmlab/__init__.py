"""Quantum Turing machines with final-state marking, computed as limits.

The package validates machines against the local unitary conditions,
evolves finite superpositions of tape configurations, reads partial
probability distributions off them, and simulates the observed protocol
that measures the output along a schedule of steps.
"""
from .distribution import PPD, OutputKind, OutputStatus, computed_output, encode_input, leq, ppd_of, ppd_trajectory
from .errors import (
    CompletenessError,
    InputError,
    ParseError,
    ProtocolViolation,
    QTMError,
    ResourceError,
    StructureError,
    ValidationError,
)
from .evolution import QSuperposition, apply_U, apply_U_adjoint, evolve, evolve_to, is_final
from .hilbert import SparseVector, inner_product, norm, norm_squared
from .machine import QTMDef, Rule, StateInfo, UnitarityReport, check_local_unitarity, delta, validate
from .observation import (
    Affine,
    Explicit,
    enumerate_runs,
    measure_output,
    observed_distribution_exact,
    parse_schedule,
    reconstruct,
    sample_counts,
    sample_run,
)
from .parsing import dump_qtm, load_qtm, parse_superposition
from .tape import BLANK, ONE, Configuration, Direction, Symbol, config, mark_k, render, reverse_step, step, val

__version__ = "0.1.0"
