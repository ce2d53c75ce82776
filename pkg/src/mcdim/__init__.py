"""Dimension of the outer Julia boundary of the McMullen maps z**Q + p/z**Q."""

from .bowen import (
    ContractionRatios, DimensionEstimate, falconer_bound, falconer_estimate,
    fit_quadratic_coefficient, pressure_sum, solve_bowen, solve_bowen_extrapolated,
)
from .errors import ConfigError, McDimError, RegimeError
from .mapcore import McMullenMap
from .periodic import BoundaryAngle, BoundaryPeriodicPoint, PeriodicPointSet, enumerate_points, locate
from .raster import RasterClassification, Window, box_count, classify_point, render
from .series import TruncatedSeries, U1, U2, boundary_series, phi, predict_dimension, sum_AmAk

__all__ = [
    "BoundaryAngle", "BoundaryPeriodicPoint", "ConfigError", "ContractionRatios",
    "DimensionEstimate", "McDimError", "McMullenMap", "PeriodicPointSet",
    "RasterClassification", "RegimeError", "TruncatedSeries", "U1", "U2", "Window",
    "boundary_series", "box_count", "classify_point", "enumerate_points",
    "falconer_bound", "falconer_estimate", "fit_quadratic_coefficient", "locate",
    "phi", "predict_dimension", "pressure_sum", "render", "solve_bowen",
    "solve_bowen_extrapolated", "sum_AmAk",
]
