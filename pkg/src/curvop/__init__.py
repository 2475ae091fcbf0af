"""Curvature-induced effective operators for particles confined to curved surfaces."""
from . import errors
from .dsl import builtin_catalog, format_surface, parse_surface
from .geometry import Geometry, frame_at, geometric_potential, grid_sample, offset_metric, reduced_bracket
from .gridfield import GridField
from .jets import Jet3
from .spectral import RadialProblem, radial_reduce, solve_spectrum
from .spin import dresselhaus_tensor_ccs, pauli_ccs, rashba_tensor_ccs
from .verify import run_verify

__version__ = "0.1.0"

__all__ = [
    "errors", "Jet3", "parse_surface", "format_surface", "builtin_catalog", "Geometry", "frame_at",
    "offset_metric", "reduced_bracket", "geometric_potential", "grid_sample", "GridField",
    "pauli_ccs", "rashba_tensor_ccs", "dresselhaus_tensor_ccs", "RadialProblem", "radial_reduce",
    "solve_spectrum", "run_verify",
]
