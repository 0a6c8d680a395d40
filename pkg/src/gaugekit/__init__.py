"""Numerical gauge geometry: connections, curvature, holonomy and charged-particle dynamics."""
from .errors import (
    BranchError,
    CatalogError,
    CoverError,
    DomainError,
    GaugeKitError,
    NumericDomainError,
    PreconditionError,
)
from .lie import SO3, SU2, U1, Ad, GLn, LieGroupSpec, bracket, exp, invariant_inner, log, reproject
from .geometry import (
    Chart,
    MetricField,
    einstein_residual,
    energy_integral,
    first_variation,
    levi_civita_christoffel,
    metric,
    riemann_curvature,
    torsion,
)
from .atlas import (
    Cocycle,
    Cover,
    GaugedSection,
    GaugeTransformation,
    apply_gauge,
    build_monopole_bundle,
    section_push,
    validate_cocycle,
)
from .gauge import (
    AlgebraValuedForm,
    LocalConnectionForm,
    VolumeData,
    bianchi_residual,
    connection,
    covariant_codifferential,
    covariant_differential,
    curvature_form,
    graded_bracket,
    hodge_star,
    overlap_residual,
)
from .transport import (
    SampledCurve,
    affine_curvature_commutator,
    ambrose_singer_span_check,
    covariant_derivative_section,
    holonomy,
    horizontal_lift_group,
    infinitesimal_holonomy,
    loop,
    parallel_transport_vector,
)
from .dynamics import (
    ParticleState,
    Trajectory,
    geodesic_integrate,
    kk_geodesic,
    kk_metric_eval,
    lorentz_force_integrate,
)
from .fields import (
    EMField,
    ResidualReport,
    charge_conservation_residual,
    em_stress_energy,
    maxwell_F_from_EB,
    maxwell_residuals,
    scalar_curvature_decomposition_check,
    yang_mills_residual,
    ym_action_density,
)

__version__ = "0.1.0"
