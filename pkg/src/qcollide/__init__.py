"""Kernel-recovery collision attacks on homomorphic hash functions,
simulated exactly at desk scale and verified against brute force."""

from .attack import (
    AttackConfig,
    AttackReport,
    CollisionRecord,
    ForgedPair,
    enumerate_collisions,
    forge_second_preimage,
    run_attack,
    saturation_check,
)
from .errors import (
    GroupMismatchError,
    NoCollisionError,
    ParameterError,
    ResourceLimitError,
    ToolkitError,
)
from .groups import (
    DEFAULT_ENUMERATION_BOUND,
    CharacterValue,
    GroupElement,
    GroupSpec,
    SubgroupBasis,
    character_eval,
    character_phase,
    character_sum,
    element_add,
    orthogonal_subgroup,
    solve_kernel_from_orthogonal_samples,
    subgroup_enumerate,
)
from .hashes import (
    HomomorphicHash,
    constant_zero_hash,
    gen_params,
    hash_add_outputs,
    hash_eval,
    hash_eval_all,
    kfm_hash,
    rsa_hash,
    xor_crc_hash,
    xor_matrix_hash,
)
from .oracle import (
    AuditVerdict,
    BruteForceResult,
    compare_backends,
    distribution_audit,
    kernel_bruteforce,
)
from .simulator import (
    BACKEND_COSET,
    BACKEND_STATEVECTOR,
    DEFAULT_STATEVECTOR_BOUND,
    SampleTrace,
    StateVector,
    apply_hash_oracle,
    measure_register,
    qft_group,
    sample_orthogonal,
    uniform_superposition,
)

__version__ = "0.1.0"

__all__ = [
    "AttackConfig",
    "AttackReport",
    "AuditVerdict",
    "BACKEND_COSET",
    "BACKEND_STATEVECTOR",
    "BruteForceResult",
    "CharacterValue",
    "CollisionRecord",
    "DEFAULT_ENUMERATION_BOUND",
    "DEFAULT_STATEVECTOR_BOUND",
    "ForgedPair",
    "GroupElement",
    "GroupMismatchError",
    "GroupSpec",
    "HomomorphicHash",
    "NoCollisionError",
    "ParameterError",
    "ResourceLimitError",
    "SampleTrace",
    "StateVector",
    "SubgroupBasis",
    "ToolkitError",
    "apply_hash_oracle",
    "character_eval",
    "character_phase",
    "character_sum",
    "compare_backends",
    "constant_zero_hash",
    "distribution_audit",
    "element_add",
    "enumerate_collisions",
    "forge_second_preimage",
    "gen_params",
    "hash_add_outputs",
    "hash_eval",
    "hash_eval_all",
    "kernel_bruteforce",
    "kfm_hash",
    "measure_register",
    "orthogonal_subgroup",
    "qft_group",
    "rsa_hash",
    "run_attack",
    "sample_orthogonal",
    "saturation_check",
    "solve_kernel_from_orthogonal_samples",
    "subgroup_enumerate",
    "uniform_superposition",
    "xor_crc_hash",
    "xor_matrix_hash",
]
