"""Vector fields on S^1 x Sigma, their two-forms and precondition diagnostics."""

from .diagnostics import (
    CandidateReport,
    TransverseAngle,
    TwoFormSample,
    beta_components,
    candidate_angles,
    divergence_residual,
    evaluate_angle,
    exterior_derivative_residual,
    find_transverse_angle,
    reeb_normalize,
    tangency_residual,
)
from .isotopy import (
    FunctionIsotopy,
    Isotopy,
    RadialTwistIsotopy,
    check_isotopy,
    dehn_twist_isotopy,
    identity_isotopy,
    rigid_rotation_isotopy,
    suspension_field,
)
from .spec import (
    AdaptedField,
    ConstantField,
    FieldSpec,
    FunctionField,
    GriddedField,
    HelicalMode,
    LundquistField,
    PerturbedField,
    ReebNormalizedField,
    ReversedField,
    SuspensionField,
    adapt_angle,
    angle_value,
    eval_field,
    lundquist_annulus,
    polar_components,
    straight_field,
    toroidal_field,
    zero_field,
)

__all__ = [name for name in dir() if not name.startswith("_")]
