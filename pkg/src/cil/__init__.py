"""Rigorous numerics for conformal iterated function systems.

Exact rational and Gaussian-rational arithmetic, certified interval enclosures,
pressure brackets with certified roots, separation-condition diagnostics, and
dimension estimates, together with bit-exact verification procedures for the
built-in named systems.
"""

from .arith import (
    EnclosureBall,
    GaussianRational,
    Q,
    Rational,
    RationalInterval,
    SqrtSum,
    circumcenter,
    interval_ops,
    mobius_ball_image,
    rat,
    rat_str,
    sqrt_exact,
    sqrt_interval,
)
from .errors import (
    BudgetExceededError,
    CilError,
    DegenerateGeometryError,
    DepthCapError,
    EnclosureError,
    InvalidSystemError,
    PoleCollisionError,
)
from .attractor import (
    AttractorSample,
    CylinderSet,
    NaturalMeasure,
    cylinder,
    measure_of_ball,
    sample_attractor,
)
from .dimension import (
    AhlforsReport,
    BoxDimensionFit,
    ContentEstimate,
    CoveringCount,
    QuasiConstants,
    UniformPerfectnessEstimate,
    ahlfors_check,
    box_dimension_estimate,
    content_estimate,
    covering_number,
    covering_envelope,
    quasi_constant,
    uniform_perfectness,
)
from .examples import (
    NamedSystem,
    REGISTRY,
    list_systems,
    load_system,
    verify_shortword_example,
    verify_wsc_example,
)
from .ifs import (
    ConformalMap,
    DistortionData,
    IFSystem,
    PiecewisePolynomial,
    construct_invariant_domain,
    derivative_bounds,
    evaluate,
    holder_composed_check,
)
from .pressure import PressureEstimate, RootBracket, pressure_bracket, pressure_root
from .separation import (
    AmplificationReport,
    CertifiedBool,
    IlcSearchReport,
    IlcWitness,
    Magnification,
    SeparationCount,
    TangentReport,
    WitnessScheduleInfeasible,
    amplify_wsc_failure,
    build_weak_tangent,
    count_phi,
    equivalence_of_restrictions,
    exact_overlap_scan,
    ilc_search,
)
from .words import GenerationCut, Word, generation_cut, parent, shift

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
