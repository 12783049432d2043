"""groliton: verification engine and solution catalog for generalised Ricci
soliton equations on 2- and 3-dimensional metrics, built on truncated-Taylor
(jet) automatic differentiation."""

__version__ = "0.1.0"

from .catalog import (
    SolitonInstance,
    conic_angle,
    family_ids,
    make_family,
    negative_fixture,
    registry,
)
from .geometry import ChartFrame, MetricChart
from .jets import BACKEND, DEFAULT_ORDER, Jet, jet_constant, jet_variable
from .soliton import SolitonParams, grid_report

__all__ = [
    "__version__",
    "BACKEND",
    "DEFAULT_ORDER",
    "ChartFrame",
    "Jet",
    "MetricChart",
    "SolitonInstance",
    "SolitonParams",
    "conic_angle",
    "family_ids",
    "grid_report",
    "jet_constant",
    "jet_variable",
    "make_family",
    "negative_fixture",
    "registry",
]
