"""Flat geometry of the slit double cover: lattice, flow, saddle connections, gaps."""
from .gaps import ThreeGaps, three_gaps
from .geometry import (
    FlowTime,
    PlanarVector,
    ReducedBasis,
    ShearedLattice,
    flow,
    reduce_basis,
    shear_lattice,
)
from .intersect import count_open_parallelogram, crossings
from .surface import (
    FillingEvidence,
    LengthCertificate,
    NoCertificateError,
    ResourceError,
    SaddleConnection,
    SlitCurve,
    SlitSurface,
    SystoleReport,
    make_surface,
    stage_time,
)


def intersection_number(surface: SlitSurface, j: int, k: int, curves: dict | None = None) -> int:
    """Crossings of the doubled slit curves on X: each torus crossing lifts to both sheets."""
    if j < 1 or k < 1:
        raise IndexError("slit-curve indices start at 1")
    if j == k:
        return 0
    curves = curves or {}
    a = curves.get(j) or surface.slit_curve(j)
    b = curves.get(k) or surface.slit_curve(k)
    if j > k:
        a, b = b, a
    return 2 * crossings(surface, a, b)


__all__ = [
    "FillingEvidence",
    "FlowTime",
    "LengthCertificate",
    "NoCertificateError",
    "PlanarVector",
    "ReducedBasis",
    "ResourceError",
    "SaddleConnection",
    "ShearedLattice",
    "SlitCurve",
    "SlitSurface",
    "SystoleReport",
    "ThreeGaps",
    "count_open_parallelogram",
    "crossings",
    "flow",
    "intersection_number",
    "make_surface",
    "reduce_basis",
    "shear_lattice",
    "stage_time",
    "three_gaps",
]
