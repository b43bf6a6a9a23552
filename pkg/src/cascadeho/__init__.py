"""Exact-arithmetic chain complexes for combinatorial Morse-Bott orbit systems.

Everything is computed over Z (or Q where the theory demands it) with
arbitrary-precision integers and ``fractions.Fraction``; no floating point
anywhere.  See the README for the document formats and the ``cascadeho``
command-line interface.
"""

from .errors import (
    CascadehoError,
    ChainMapFailure,
    InputError,
    NonDistinct,
    NonGenericConfiguration,
    NonRegularValue,
    SquareNonzero,
    UnknownFixture,
    ValidationFailure,
)
from .exact import (
    ChainComplex,
    ChainGenerator,
    HomologyResult,
    IntMatrix,
    homology,
    invariant_factors,
    smith_normal_form,
    verify_square_zero,
)
from .mbs import (
    BoundaryLabel,
    MorseBottSystem,
    Orbit,
    PLComponent,
    SignedPoint,
    assign_basepoints,
    signed_preimages,
    validate_system,
)
from .cascades import build_ncc, enumerate_cascades, nch_homology
from .autonomous import (
    AutonomousData,
    CylinderRecord,
    block_differential,
    bv_operator,
    compare_egh,
    egh_homology,
    equivariant_homology,
    validate_data,
)
from .morphisms import (
    MorphismData,
    PhiLabel,
    compose,
    induced_chain_map,
    trivial_cobordism,
    validate_morphism,
)
from .scenarios import fixture, fixture_names, mutations, period_doubling, prequantization

__version__ = "0.1.0"
