"""Exact symbolic metric-connection geometry on pre-Leibniz algebroids."""

from .algebroid import (
    Algebroid,
    AlgebroidReport,
    Residual,
    builtin,
    courant,
    courant_pairing,
    lie_algebra,
    so3,
    tangent,
)
from .connection import (
    EConnection,
    covariant_derivative,
    curvature,
    curvature_eval,
    difference_tensor,
    koszul_connection,
    levi_civita_solve,
    modified_bracket,
    modified_bracket_coeffs,
    nonmetricity,
    projected_modified_bracket,
    projected_torsion,
    second_cov_and_ricci,
    second_covariant_derivative,
    torsion,
    torsion_eval,
)
from .errors import (
    CompatibilityFailure,
    DegenerateMetric,
    ExprSyntaxError,
    LeibnizGeoError,
    MissingProjector,
    NonUnique,
    NoSolution,
    NotAdmissible,
    ParseError,
    PoleAtPoint,
    SchemaError,
    ShapeError,
    SlotMismatch,
    UnknownVariable,
)
from .hessian import (
    FlaggedResidual,
    HessianStructure,
    conjugate_curvature_transfer_residual,
    constant_curvature_check,
    fundamental_theorem_residual,
    function_form,
    hessian,
    hessian_asymmetry,
    hessian_structure_check,
    hessian_symmetry_equivalences,
    projected_exterior_derivative,
)
from .scalar import Rational, ScalarField
from .statgeo import (
    ConjugatePair,
    StatisticalStructure,
    alpha_connection,
    alpha_curvature_residual,
    conjugate_connection,
    conjugation_residual,
    mean_connection,
    quasi_statistical_check,
    relative_torsion,
    statistical_solve,
    strong_conjugacy_residual,
)
from .tensor import (
    EMetric,
    EOneForm,
    EPForm,
    ETensor,
    EVectorField,
    contract,
    is_antisymmetric_in,
    is_totally_symmetric,
    metric_inverse,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
