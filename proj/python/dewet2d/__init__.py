"""Parametric finite element simulation of 2D solid-state dewetting.

The heavy lifting lives in the compiled `_core` module; this package
re-exports its public surface.  Curves are open polygons with both endpoints
on the substrate (y = 0); schemes are selected by name: "zjb" (backward
Euler), "pc" (predictor-corrector), and "bdf2" / "bdf3" / "bdf4".
"""

from dewet2d._core import (
    Curve,
    DewetError,
    SchemeParams,
    TrajectoryPoint,
    TrajectoryRecord,
    angle_study,
    cauchy_study,
    convergence_orders,
    evolve,
    evolve_to_equilibrium,
    initial_curvature,
    make_params,
    make_shape,
    manifold_distance,
    step,
    wulff_shape,
    wulff_study,
)

__all__ = [
    "Curve",
    "DewetError",
    "SchemeParams",
    "TrajectoryPoint",
    "TrajectoryRecord",
    "angle_study",
    "cauchy_study",
    "convergence_orders",
    "evolve",
    "evolve_to_equilibrium",
    "initial_curvature",
    "make_params",
    "make_shape",
    "manifold_distance",
    "step",
    "wulff_shape",
    "wulff_study",
]
