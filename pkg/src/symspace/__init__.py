"""Computational tools for symmetric spaces and Lie triple systems."""

from .errors import (
    AmbiguityError,
    InvalidInputError,
    NumericalAmbiguityError,
    PropertyViolationError,
    RangeError,
    UnsupportedError,
)
from .lts import (
    JordanHolderSeries,
    LtsModule,
    LtsStructure,
    Root,
    StdEmbedding,
    bracket_operator,
    classify_simple_quotient,
    curvature_operator,
    is_abelian_ideal,
    is_solvable,
    jordan_holder_series,
    roots,
    solvable_exponentiality,
    standard_embedding,
    tangent_bundle_lts,
    verify_lts_axioms,
)
from .models import (
    Euclidean,
    Hyperbolic,
    ModelSpace,
    ProductSpace,
    SL2Group,
    SolvablePlane,
    Sphere,
    loos_axiom_check,
    space_from_selector,
)
from .geometry import (
    Triangle,
    delta3_flat,
    double_ngon_solve,
    gamma3,
    hyperbolic_double_exists,
    midpoint,
    product_chart,
    square_root,
    transvection_placement,
)
from .newton import SolveResult
from .spectral import (
    Spectrum,
    eigenvalues,
    helgason_differential,
    local_diffeo_test,
    locally_exponential_sample_test,
    sinhc,
    square_spectrum_check,
    unipotent_inverse,
)
