"""Truncated-Fock Lindblad simulation of GW-bath decoherence (hbar = 1)."""
from ._backend import BACKEND, available
from .analysis import (
    RateFit,
    cross_coherence,
    decoherence_rate_fit,
    fit_trajectory,
    fringe_visibility,
    purity_decay_rate,
    purity_decay_rate_fd,
    trajectory_visibility,
    translation_operator,
)
from .errors import CoherenceError, SolverError, StabilityError, TruncationError
from .lindblad import LindbladGenerator, Trajectory, evolve, evolve_for
from .states import (
    CatStateSpec,
    FockDensityMatrix,
    build_cat_state,
    cat_x_moment,
    coherent_ket,
    dephased_cat,
    p_operator,
    x_operator,
)
from .wigner import WignerGrid, default_axis, wigner_transform

__all__ = [
    "BACKEND",
    "available",
    "CatStateSpec",
    "CoherenceError",
    "FockDensityMatrix",
    "LindbladGenerator",
    "RateFit",
    "SolverError",
    "StabilityError",
    "Trajectory",
    "TruncationError",
    "WignerGrid",
    "build_cat_state",
    "cat_x_moment",
    "coherent_ket",
    "cross_coherence",
    "decoherence_rate_fit",
    "default_axis",
    "dephased_cat",
    "evolve",
    "evolve_for",
    "fit_trajectory",
    "fringe_visibility",
    "p_operator",
    "purity_decay_rate",
    "purity_decay_rate_fd",
    "trajectory_visibility",
    "translation_operator",
    "wigner_transform",
    "x_operator",
]
