"""Geometric phases of spin-1 states transported around loops in the Bloch ball."""

from .catalog import CATALOG, builtin
from .errors import DegeneracyError, InputError, NonIsolatedZeroError, NotLiftableError
from .holonomy import (
    HolonomyResult,
    LiftPath,
    generalized_solid_angle,
    geometric_phase,
    horizontal_lift,
    rp2_phase,
    solid_angle_decomposition,
    vertical_displacement_rp2,
)
from .loopgeom import Loop, check_liftable, find_zeros, project_to_rp2, segment_loop
from .loopspec import parse_loop_spec, resolve_loop
from .oracles import greedy_lift_oracle, solid_angle_oracle
from .rotations import axis_angle_of, rotation_from_axis_angle, spin1_rep
from .spinstate import (
    Chord,
    bloch_vector,
    chord_from_state,
    fluctuation_tensor,
    fubini_study_distance,
    state_from_chord,
)

__all__ = [
    "CATALOG", "builtin",
    "DegeneracyError", "InputError", "NonIsolatedZeroError", "NotLiftableError",
    "HolonomyResult", "LiftPath", "generalized_solid_angle", "geometric_phase",
    "horizontal_lift", "rp2_phase", "solid_angle_decomposition", "vertical_displacement_rp2",
    "Loop", "check_liftable", "find_zeros", "project_to_rp2", "segment_loop",
    "parse_loop_spec", "resolve_loop",
    "greedy_lift_oracle", "solid_angle_oracle",
    "axis_angle_of", "rotation_from_axis_angle", "spin1_rep",
    "Chord", "bloch_vector", "chord_from_state", "fluctuation_tensor",
    "fubini_study_distance", "state_from_chord",
]
