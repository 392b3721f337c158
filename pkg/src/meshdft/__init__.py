"""Parallel DFT engines over a simulated multi-core mesh.

Two interchangeable engines compute the same distributed transform: a
direct matrix engine (arbitrary sample points, quadratic work) and a
decimation-based engine (power-of-two sizes, log-linear work). Both run
as SPMD programs on :class:`MeshSim`, whose ledger counts every collective
and every arithmetic operation deterministically.
"""

from .ctensor import (
    Bf16Value,
    ComplexTensor,
    PrecisionMode,
    bf16_array,
    bf16_split,
    contract,
    matmul_mixed,
    reorder,
    scale_along_axis,
)
from .decomposition import (
    BlockAssignment,
    ComputationShape,
    decompose,
    gather_to_host,
    global_to_local,
    local_to_global,
    slices_for_shape,
)
from .errors import (
    ArgumentError,
    AssemblyError,
    CommunicationError,
    DecompositionError,
    DimensionError,
    MeshDftError,
    PlanError,
    ProtocolError,
    UnsupportedOperationError,
)
from .fft import (
    FftPlan,
    bit_reversal_permutation,
    create_fft_plan,
    fft_forward,
    gather_positions,
    local_fft,
    local_fft_flops,
    phase_adjust,
    strided_gather,
)
from .kdft import (
    KdftPlan,
    create_kdft_plan,
    kdft_forward,
    kdft_inverse_uniform,
    one_shuffle,
)
from .mesh import (
    AllToAll,
    CommLedger,
    Core,
    MeshSim,
    Permute,
    SourceTargetPairs,
    line_ring_pairs,
    ring_pairs,
)
from .oracle import (
    OracleResult,
    direct_dft,
    direct_dft_2d,
    direct_dft_3d,
    relative_l2_error,
)
from .vandermonde import (
    SamplePoints,
    VandermondeSlice,
    build_nonuniform,
    build_phase_slice,
    build_uniform,
    matrix_for,
    slice_rows,
)

__version__ = "0.1.0"

__all__ = [
    "AllToAll",
    "ArgumentError",
    "AssemblyError",
    "Bf16Value",
    "BlockAssignment",
    "CommLedger",
    "CommunicationError",
    "ComplexTensor",
    "ComputationShape",
    "Core",
    "DecompositionError",
    "DimensionError",
    "FftPlan",
    "KdftPlan",
    "MeshDftError",
    "MeshSim",
    "OracleResult",
    "Permute",
    "PlanError",
    "PrecisionMode",
    "ProtocolError",
    "SamplePoints",
    "SourceTargetPairs",
    "UnsupportedOperationError",
    "VandermondeSlice",
    "bf16_array",
    "bf16_split",
    "bit_reversal_permutation",
    "build_nonuniform",
    "build_phase_slice",
    "build_uniform",
    "contract",
    "create_fft_plan",
    "create_kdft_plan",
    "decompose",
    "direct_dft",
    "direct_dft_2d",
    "direct_dft_3d",
    "fft_forward",
    "gather_positions",
    "gather_to_host",
    "global_to_local",
    "kdft_forward",
    "kdft_inverse_uniform",
    "line_ring_pairs",
    "local_fft",
    "local_fft_flops",
    "local_to_global",
    "matmul_mixed",
    "matrix_for",
    "one_shuffle",
    "phase_adjust",
    "relative_l2_error",
    "reorder",
    "ring_pairs",
    "scale_along_axis",
    "slice_rows",
    "slices_for_shape",
    "strided_gather",
]
