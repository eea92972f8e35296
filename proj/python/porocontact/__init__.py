"""Fixed-stress split solver for Biot poroelasticity with frictionless contact."""

from ._core import (
    ConfigError,
    MeshError,
    ParameterError,
    beta,
    compare_oracle,
    contraction_bound,
    estimate_order,
    manufactured,
    rect_mesh,
    simulate,
    terzaghi_pressure,
)

__all__ = [
    "ConfigError",
    "MeshError",
    "ParameterError",
    "beta",
    "compare_oracle",
    "contraction_bound",
    "estimate_order",
    "manufactured",
    "rect_mesh",
    "simulate",
    "terzaghi_pressure",
]
