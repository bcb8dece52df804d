"""Simulate IQP* circuits, their graph-state MBQC programs and dephased
zero-discord counterparts, and decide when a set of MBQCs is only
superficially measurement-based."""

from .criteria import (
    CriterionVerdict,
    MbqcSet,
    check_criterion1,
    check_criterion2,
    check_criterion3,
    classify_set,
)
from .discord import (
    ZeroDiscordState,
    classical_replacement_exact,
    classical_replacement_run,
    dephase,
    dephase_circuit_final,
    is_zero_discord,
    perbit_map,
)
from .errors import CapError, ValidationError
from .iqp import IqpCircuit, InputString, parse_iqp_instance, sample_iqp, shift_by_input, simulate_iqp
from .mbqc import (
    MbqcProgram,
    build_graph_state,
    compile_iqp_to_mbqc,
    run_mbqc_exact,
    run_mbqc_sample,
)
from .statekit import (
    ClassicalDistribution,
    DensityMatrix,
    LocalProductBasis,
    PureState,
    QubitBasis,
    tvd,
)

__version__ = "0.1.0"

__all__ = [
    "CapError",
    "ClassicalDistribution",
    "CriterionVerdict",
    "DensityMatrix",
    "InputString",
    "IqpCircuit",
    "LocalProductBasis",
    "MbqcProgram",
    "MbqcSet",
    "PureState",
    "QubitBasis",
    "ValidationError",
    "ZeroDiscordState",
    "build_graph_state",
    "check_criterion1",
    "check_criterion2",
    "check_criterion3",
    "classical_replacement_exact",
    "classical_replacement_run",
    "classify_set",
    "compile_iqp_to_mbqc",
    "dephase",
    "dephase_circuit_final",
    "is_zero_discord",
    "parse_iqp_instance",
    "perbit_map",
    "run_mbqc_exact",
    "run_mbqc_sample",
    "sample_iqp",
    "shift_by_input",
    "simulate_iqp",
    "tvd",
]
