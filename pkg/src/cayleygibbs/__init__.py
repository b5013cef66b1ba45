"""Coset structure on Cayley trees and weakly periodic Ising field equations."""

from cayleygibbs.cosets import (
    CosetLabel,
    SpecError,
    SubgroupSpec,
    check_cosets,
    coset_classes,
    fold_alternating,
    is_member,
    label,
    matching_permutation,
    neighbor_counts,
    project,
)
from cayleygibbs.invariance import (
    IllDefinedSystemError,
    WeaklyPeriodicSystem,
    check_class_counts,
    check_invariance,
    derive_system,
    matches_reference,
    reference_counts,
    state_of,
)
from cayleygibbs.solver import (
    INVARIANT_PATTERNS,
    NotInvariantError,
    SolverConfig,
    Theta,
    check_quartic_positivity,
    edge_field,
    finite_volume_probability,
    restrict,
    solve_fixed_points,
    solve_i1_exact,
    theta_sweep,
    translation_invariant_fields,
    verify_compatibility,
)
from cayleygibbs.words import (
    IDENTITY,
    Ball,
    ResourceLimitError,
    Word,
    ball_size,
    distance,
    enumerate_ball,
    inverse,
    multiply,
    neighborhood,
    parent,
    reduce_word,
    sphere_size,
    successors,
    word_from_str,
    word_to_str,
)

__version__ = "0.1.0"

__all__ = [
    "IDENTITY",
    "INVARIANT_PATTERNS",
    "Ball",
    "CosetLabel",
    "IllDefinedSystemError",
    "NotInvariantError",
    "ResourceLimitError",
    "SolverConfig",
    "SpecError",
    "SubgroupSpec",
    "Theta",
    "WeaklyPeriodicSystem",
    "Word",
    "ball_size",
    "check_class_counts",
    "check_cosets",
    "check_invariance",
    "check_quartic_positivity",
    "coset_classes",
    "derive_system",
    "distance",
    "edge_field",
    "enumerate_ball",
    "finite_volume_probability",
    "fold_alternating",
    "inverse",
    "is_member",
    "label",
    "matches_reference",
    "matching_permutation",
    "multiply",
    "neighbor_counts",
    "neighborhood",
    "parent",
    "project",
    "reduce_word",
    "reference_counts",
    "restrict",
    "solve_fixed_points",
    "solve_i1_exact",
    "sphere_size",
    "state_of",
    "successors",
    "theta_sweep",
    "translation_invariant_fields",
    "verify_compatibility",
    "word_from_str",
    "word_to_str",
    "__version__",
]
