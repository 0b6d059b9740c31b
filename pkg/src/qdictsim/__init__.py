"""Gate-level quantum dictionary built on sorted (address, value) pair lists.

No QRAM: addressing is done by a single pass of compare-and-push over the
pair list, with match bits retired by measurement-based uncomputation.
"""

from .arith import (
    EqualsConstant,
    EqualsRegister,
    GreaterThan,
    UncomputeMode,
    WidthMismatch,
    add_into,
    compare_gt_bit,
    compare_gt_phase,
    compute_equals,
    controlled_swap_registers,
    is_zero,
    swap_registers,
    uncompute_bit,
)
from .qdict import (
    CapacityExceeded,
    ClassicalDict,
    InvalidEncoding,
    NonZeroOutput,
    QuantumDict,
    ReservedAddress,
    ZeroValue,
    add_dict_into_value,
    add_value_into_dict,
    decode,
    encode,
    extract,
    has_space,
    inject,
    superpose_dicts,
    swap_value,
)
from .oracle import (
    OpDescriptor,
    OpKind,
    OracleResult,
    PreconditionViolation,
    Report,
    TooLarge,
    check_permutation,
    enumerate_valid_dicts,
    oracle_apply,
    oracle_extract,
    oracle_inject,
)
from .sim import (
    DuplicateQubit,
    GateStats,
    LayoutMismatch,
    NonZeroRelease,
    Register,
    Simulator,
    SparseState,
    UnallocatedQubit,
    fidelity,
)

__version__ = "0.1.0"
