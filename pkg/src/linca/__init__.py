"""Exact linear cellular automata over finitely generated groups.

The library provides exact GF(p) window calculus for linear cellular
automata: inverse-rule synthesis with self-verifying certificates,
closed-image preimage extraction through stabilizing projective sequences
of affine window fibers, restriction/induction between a group and its
subgroups, and an executable gallery of infinite-dimensional
counterexamples (a bijective automaton with no finite-memory inverse and
an automaton with non-closed image) with machine-checkable witnesses.
"""

from ._kernels import backend
from .ca import (
    ConstantConfig,
    FiniteSupportConfig,
    LinearCA,
    LocalRule,
    Pattern,
    PeriodicConfig,
    WindowMap,
    compose,
    config_equal,
    constant,
    equals_identity,
    equivariance_check,
    finite_support,
    identity_ca,
    normalize_rule,
    periodic,
    shift_config,
)
from .groups import (
    BallSequence,
    FiniteGroup,
    FreeGroup,
    Group,
    IntegerGroup,
    LatticeGroup,
    Subgroup,
    cyclic_group,
    interior,
    subgroup_generated,
    symmetric_group_3,
)
from .linalg import (
    AffineSubspace,
    Subspace,
    image_of_affine,
    image_of_subspace,
    kernel_basis,
    rref,
    solve_affine,
)
from .solver import (
    EmptyFiberWitness,
    ExtractionResult,
    KernelWitness,
    NotInvertible,
    PreimageResult,
    ProjectiveAffineSequence,
    ReversibilityCertificate,
    SolverUnknown,
    UniversalChain,
    WindowSystem,
    extract_limit_prefix,
    invert_ca,
    kernel_sequence,
    kernel_witness,
    lift_element,
    preimage_extract,
    preimage_sequence,
    surjectivity_counterexample,
    universal_spaces,
)
from .transfer import induce, restrict

__version__ = "0.1.0"
