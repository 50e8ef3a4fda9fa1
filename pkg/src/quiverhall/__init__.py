"""Exact computation of bar-involution coefficient matrices for Dynkin
quivers, cross-checked by slice and preprojective point counts."""

from .errors import (
    ContainmentError,
    DimensionMismatchError,
    InexactDivisionError,
    InternalInvariantError,
    InterpolationError,
    NotARootError,
    QuiverHallError,
    QuiverParseError,
    SearchExhaustedError,
    SliceConventionError,
)
from .gflinalg import (
    FpMatrix,
    SubspaceBasis,
    complement_in,
    enumerate_subspaces,
    gaussian_binomial,
    kernel_basis,
    rank,
)
from .hallalg import BarMatrix, HallAlgebra, HallElement
from .hallnums import CountSample, HallTable, interpolate, stable_subspaces
from .indecs import IndecTable, Rep, build_indecomposable, directed_order, hom_dim
from .orbits import OrbitLabel, QuiverContext
from .polynomials import IntPolyQ, LaurentPolyV
from .quiver import QuiverSpec, euler_form, parse_quiver, positive_roots
from .slices import (
    AffineSlice,
    build_slice,
    orthogonality_check,
    phi_image,
    preprojective_census,
    preprojective_fiber,
    slice_census,
)

__version__ = "0.1.0"
