"""Qubit channel estimation from incomplete or inconsistent test-state data."""
from .bloch import (
    MeasurementRecord,
    OperatorFrame,
    QubitState,
    adapted_frame_from_states,
    mix_state,
    regularize_state,
    state_from_record,
)
from .channel import (
    AffineChannel,
    DiagonalForm,
    apply,
    channel_from_blocks,
    compose,
    diagonal_form,
    identity_channel,
    rotation_channel,
    universal_not,
)
from .cp import choi_matrix, is_completely_positive, is_positive_map, tetrahedron_check
from .errors import InputError, QprocError, ReconstructionError
from .reconstruct import (
    ReconstructionReport,
    TestPair,
    reconstruct,
    reconstruct_complete,
    reconstruct_strategy1,
    reconstruct_strategy2,
    reconstruct_zero_fill,
    repair_free_parameters,
    two_state_compatibility,
)
from .regularize import (
    average_channel,
    critical_k,
    mix_with_average,
    regularize_map,
    regularize_outputs,
)
from .sim import SimConfig, exact_records, simulate

__version__ = "0.1.0"
