"""Transformative Caputo derivatives and a Crank-Nicolson solver for the
time-fractional mobile/immobile transport equation."""

__version__ = "0.1.0"

from fracmim.frac_deriv import (
    FractionalOrder,
    QuadratureConfig,
    QuadratureError,
    SmoothFunction,
    caputo_eval,
    shift_term,
    tcaputo_eval,
)
from fracmim.mim_solver import Grid, Problem, SolutionHistory, solve
from fracmim.weights import WeightTable, build_weights, stability_margin

__all__ = [
    "FractionalOrder",
    "Grid",
    "Problem",
    "QuadratureConfig",
    "QuadratureError",
    "SmoothFunction",
    "SolutionHistory",
    "WeightTable",
    "build_weights",
    "caputo_eval",
    "shift_term",
    "solve",
    "stability_margin",
    "tcaputo_eval",
]
