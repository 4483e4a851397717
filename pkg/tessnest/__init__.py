"""
tessnest - Nested random tessellations in the plane

Simulates X/X0-nestings, where every cell of an initial random tessellation X
is subdivided by an independent copy of a component tessellation X0, counts
the T-crossings the component edges form on the cell boundaries, and checks
the counts against closed-form means, variances and central limit theorems.

Key Features:
    - Poisson line (PLT) and Poisson-Voronoi (PVT) tessellations, exact inside a window
    - Closed-form intensities and asymptotic variances in general dimension
    - Reproducible Monte Carlo over a window ladder with a process pool
    - Normality tests, variance-rate fits and simulated constants
    - Command-line interface writing CSV records and JSON summaries

Quick Start:
    >>> from tessnest import ModelSpec, TessellationKind, TessellationSpec, theory_moments
    >>> model = ModelSpec(
    ...     TessellationSpec(TessellationKind.PVT, 1.0),
    ...     TessellationSpec(TessellationKind.PLT, 1.0),
    ... )
    >>> round(theory_moments(model).mean_density, 6)
    2.546479
"""

from .exceptions import (
    TessNestError,
    InvalidInputError,
    GeometryError,
    ExactnessError,
    UnsupportedModelError,
    ConfigError,
    DataFormatError,
)
from .geom2d import ConvexPolygon, Disc, Line, Point, Segment
from .moments import MomentReport, theory_moments
from .montecarlo import (
    ExperimentConfig,
    ReplicateRecord,
    RunSummary,
    run_experiment,
    summarize_experiment,
)
from .nesting import ModelSpec, total_Z
from .tessellate import (
    PlanarTessellation,
    SeedStream,
    TessellationKind,
    TessellationSpec,
    WindowShape,
    WindowSpec,
)
from .utils import setup_logging, timing_decorator, Metrics

__version__ = "0.1.0"
__license__ = "MIT"

__all__ = [
    # Geometry
    "ConvexPolygon",
    "Disc",
    "Line",
    "Point",
    "Segment",
    # Tessellations
    "PlanarTessellation",
    "SeedStream",
    "TessellationKind",
    "TessellationSpec",
    "WindowShape",
    "WindowSpec",
    # Nesting and moments
    "ModelSpec",
    "total_Z",
    "MomentReport",
    "theory_moments",
    # Monte Carlo
    "ExperimentConfig",
    "ReplicateRecord",
    "RunSummary",
    "run_experiment",
    "summarize_experiment",
    # Exceptions
    "TessNestError",
    "InvalidInputError",
    "GeometryError",
    "ExactnessError",
    "UnsupportedModelError",
    "ConfigError",
    "DataFormatError",
    # Utils
    "setup_logging",
    "timing_decorator",
    "Metrics",
]

# Configure default logging
import logging

logging.getLogger(__name__).addHandler(logging.NullHandler())
