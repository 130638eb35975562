"""torusflow: a numerical laboratory for stochastic weighted mean curvature
flow of graphs over the flat torus.

The package simulates the Ito-form SPDE

    du = ((1 + eps) Lap_f u - (lam^2/2) v.D^2u v + xi u) dt + lam Q dW

on periodic grids and verifies, at desk scale, the a priori estimates the
flow satisfies: the energy supermartingale property, the dissipation
inequality, the gradient maximum principle, operator coercivity, and the
small-noise and viscous limits.
"""

from ._backend import ACTIVE as backend
from .grid import (
    GridSpec,
    ScalarField,
    SymMatrixField,
    VectorField,
    div_f,
    gradient_c,
    gradient_f,
    hessian,
    integrate_mu,
    laplacian_f,
    staggered_inner,
)
from .hfuncs import HFunction, h_M_eval, make_h
from .noise import WienerPath, coarsen, sample_path
from .spde import (
    BlowupDetected,
    SpdeParams,
    State,
    Trajectory,
    area_element,
    cfl_dt,
    correction_term,
    ito_drift,
    noise_coeff,
    run_path,
    step,
    strat_drift,
    tilt,
)
from .weights import PinchingReport, WeightModel, alpha_from_delta, build_preset, check_pinching

__version__ = "0.1.0"

__all__ = [
    "backend",
    "GridSpec",
    "ScalarField",
    "VectorField",
    "SymMatrixField",
    "gradient_c",
    "gradient_f",
    "hessian",
    "integrate_mu",
    "div_f",
    "laplacian_f",
    "staggered_inner",
    "WeightModel",
    "PinchingReport",
    "build_preset",
    "check_pinching",
    "alpha_from_delta",
    "WienerPath",
    "sample_path",
    "coarsen",
    "SpdeParams",
    "State",
    "Trajectory",
    "BlowupDetected",
    "area_element",
    "tilt",
    "correction_term",
    "ito_drift",
    "strat_drift",
    "noise_coeff",
    "cfl_dt",
    "step",
    "run_path",
    "HFunction",
    "make_h",
    "h_M_eval",
    "__version__",
]
