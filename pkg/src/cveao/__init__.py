"""Continuous-variable entanglement-assisted operator codes.

Exact and floating-point symplectic algebra, code construction and checks,
Heisenberg-picture channel simulation, and encoding-circuit synthesis.
"""

__version__ = "0.1.0"

from .barnes import LiftError, barnes_lift
from .channel import (
    Decoder,
    DecoderConfig,
    Fixed,
    GaussianIID,
    SingleMode,
    SingleModeDecoder,
    SqueezingModel,
    StructuredS0,
    Syndrome,
    TrialStats,
    canonical_recovery,
    decode,
    extract_syndrome,
    residual_logical,
    run_trials,
    s0_error,
)
from .circuit import (
    CircuitDecomposition,
    DecompositionError,
    PassiveNetwork,
    SqueezeStage,
    bloch_messiah,
    emit_circuit,
    parse_circuit,
)
from .code import (
    Code,
    CodeParams,
    InvalidCodeError,
    NotSymplecticError,
    Role,
    RowKind,
    SymplecticBasis,
    ValidationReport,
    apply_symplectic,
    build_symplectic_basis,
    canonical_code,
    correctable_pair,
    example_code,
    example_encoding,
    single_mode_correctability,
    validate,
)
from .exact import DEFAULT_TOL, DimensionError
from .formats import ParseError, format_code, parse_code
from .symplectic import (
    LinearDependenceError,
    displacement_image,
    is_symplectic,
    rowspace_contains,
    symplectic_dual_contains,
    symplectic_gram_schmidt,
    symplectic_inverse,
    symplectic_product,
    syndrome_pairing,
)
