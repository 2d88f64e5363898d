"""Finite-dimensional g-frames and their bounded operator representations."""

__version__ = "0.1.0"

from .core import (
    DEFAULT_DEPTH,
    DEFAULT_TOL,
    Classification,
    FrameBounds,
    GFrameFamily,
    analysis_apply,
    as_operator,
    canonical_dual,
    classify,
    frame_bounds,
    frame_operator,
    frame_to_gframe,
    lift_to_frame,
    mixed_frame_operator,
    riesz_bounds,
    synthesis_apply,
    transition_operator,
)
from .representation import fit_representation, generate_family

__all__ = [
    "DEFAULT_DEPTH", "DEFAULT_TOL", "Classification", "FrameBounds", "GFrameFamily",
    "analysis_apply", "as_operator", "canonical_dual", "classify", "frame_bounds",
    "frame_operator", "frame_to_gframe", "lift_to_frame", "mixed_frame_operator",
    "riesz_bounds", "synthesis_apply", "transition_operator",
    "fit_representation", "generate_family",
]
