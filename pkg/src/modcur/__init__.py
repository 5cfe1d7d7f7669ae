"""Conformal moduli of curve families and Liouville geodesic currents for
the horizontal strip and the chimney domain under shrink/stretch
deformations."""

from .circle import (
    BoundaryMap,
    CirclePoint,
    Geodesic,
    GeodesicBox,
    InvalidBoundaryMapError,
    InvalidBoxError,
    MobiusDisk,
)
from .conformal import (
    Continuum,
    Modulus,
    annulus_modulus,
    conjugate_box,
    elliptic_K,
    mod_upper_bound,
    quad_modulus,
    quad_modulus_box,
    rel_distance,
)
from .currents import (
    DiracLamination,
    MeasuredLamination,
    lamination_box_measure,
    liouville_box,
    pullback_liouville,
    weakstar_report,
)
from .domains import (
    CHIMNEY,
    STRIP,
    ChimneyBoundaryMap,
    ChimneyPrimeEnd,
    Deformation,
    PrimeEndArc,
    RiemannMap,
    StripBoundaryMap,
    StripPrimeEnd,
    StripVerticalLamination,
    boundary_map_h,
    canonical_arcs,
    chimney_map,
    chimney_map_boundary,
    deform_arc,
    strip_map,
    strip_map_inverse,
    strip_parameter_box,
    strip_separating_box,
    strip_vertical_lamination,
)

__version__ = "0.1.0"
