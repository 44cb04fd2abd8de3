"""Hamiltonian flows of closed space curves under weighted symplectic
structures: discrete curve geometry, weighted Liouville/presymplectic forms,
Hamiltonian vector fields, momentum maps, RK4 flows, and a finite-difference
verification suite.
"""

from ._backend import backend_name
from .curves import (
    ArclengthMeasure,
    ConfigurationError,
    CurveflowError,
    DegenerateCurveError,
    DegenerateSpanError,
    DiscreteCurve,
    EdgeCollapseError,
    FlowInvarianceError,
    NumericalBlowupError,
    UnsupportedWeightError,
    WeightError,
    arclength_derivative,
    curvature_sq,
    diameter,
    l2_inner,
    length_gradient,
    load_curve,
    make_curve,
    measures,
    polyline_gap,
    resample_uniform,
    save_curve,
    tangent_cross,
    torsion,
    vertical_projection,
)
from .forms import (
    ConformalCustom,
    CurvatureWeighted,
    Identity,
    LengthWeighted,
    MW_FACTOR,
    WeightSpec,
    almost_symplectic,
    grad_lambda,
    omega,
    omega_mw,
    scale_defect,
    theta,
)
from .hamiltonians import (
    FluxRotation,
    FluxTranslation,
    HamiltonianSpec,
    Length,
    LengthTimesK,
    SquaredCurvature,
    SquaredScale,
    TotalTorsion,
    binormal_field,
    closed_form_hgrad,
    h_grad_l2,
    h_value,
    hgrad,
    hgrad_mw,
    spec_name,
    validate_pairing,
)
from .momentum import MomentumRecord, angular_momentum, linear_momentum, momentum_record
from .flow import (
    FieldFn,
    FlowAborted,
    FlowDiagnostics,
    SimulationResult,
    hamiltonian_field,
    rk4_step,
    simulate,
)
from .scenario import CurveSpec, Scenario, ScenarioError, load_scenario, parse_scenario
from .verify import (
    CheckReport,
    check_closedness,
    check_closedness_control,
    check_form_consistency,
    check_gradient,
    check_hamiltonian_identity,
    check_invariances,
    fd_directional,
    fourier_fields,
    gradient_residual,
    rotation_matrix,
    standard_battery,
)

__version__ = "0.1.0"
