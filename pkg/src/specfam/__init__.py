"""Spectra and invertibility through families of representations."""

from .errors import (
    DomainError,
    EmptySet,
    IncompatibleModel,
    IncompatibleQuery,
    NoConvergence,
    NotCertified,
    NotElliptic,
    NotNormal,
    NotSelfAdjoint,
    NumericError,
    ParseError,
    ToolkitError,
    TruncationTooSmall,
    UnsupportedModel,
)
from .spectral import (
    DEFAULT_RESOLUTION,
    SampledFunction,
    SpectrumSet,
    eig_normal,
    func_calc,
    hausdorff,
    normal_eigensystem,
    op_norm,
    union_spectra,
)
from .models import (
    AlgebraElement,
    BaseSpace,
    BlockConstraint,
    BlockStructure,
    Element,
    FunctionModel,
    NormEstimate,
    PrimPoint,
    Representation,
    ToeplitzElement,
    ToeplitzModel,
    elem_norm,
    enum_prim,
    n_a_profile,
    prim_representation,
    rep_apply,
    toeplitz_norm,
)
from .families import (
    CheckResult,
    DirectCheck,
    FamilyReport,
    FredholmVerdict,
    MemberCheck,
    RepFamily,
    check_exhausting,
    check_faithful,
    check_full,
    direct_invertible,
    family_report,
    fredholm_via_family,
    invertibility_threshold,
    invertible_via_exhausting,
    invertible_via_faithful,
    member_invertibility,
    member_norm,
    norm_via_family,
    spectrum_union,
    standard_probes,
)
from .observables import (
    INFINITE,
    CayleyImage,
    Observable,
    ObservableVerdict,
    cayley,
    invertible_observable,
    spec_observable,
    spec_union_observable,
)
from .parametric import (
    CircleBase,
    GraphBase,
    InvariantOperator,
    LambdaGrid,
    ParametricVerdict,
    RestrictionCheck,
    fiber,
    invertible_parametric,
    order_reduction,
    principal_symbol,
    spectrum_parametric,
    symbol_restriction_check,
)
from .gallery import FAMILY_GENERATORS, MODEL_NAMES, build_family, build_model

__version__ = "0.1.0"

__all__ = [
    "AlgebraElement",
    "BaseSpace",
    "BlockConstraint",
    "BlockStructure",
    "CayleyImage",
    "CheckResult",
    "CircleBase",
    "DEFAULT_RESOLUTION",
    "DirectCheck",
    "DomainError",
    "Element",
    "EmptySet",
    "FAMILY_GENERATORS",
    "FamilyReport",
    "FredholmVerdict",
    "FunctionModel",
    "GraphBase",
    "INFINITE",
    "IncompatibleModel",
    "IncompatibleQuery",
    "InvariantOperator",
    "LambdaGrid",
    "MODEL_NAMES",
    "MemberCheck",
    "NoConvergence",
    "NormEstimate",
    "Observable",
    "ObservableVerdict",
    "ParametricVerdict",
    "RestrictionCheck",
    "NotCertified",
    "NotElliptic",
    "NotNormal",
    "NotSelfAdjoint",
    "NumericError",
    "ParseError",
    "PrimPoint",
    "RepFamily",
    "Representation",
    "SampledFunction",
    "SpectrumSet",
    "ToeplitzElement",
    "ToeplitzModel",
    "ToolkitError",
    "TruncationTooSmall",
    "UnsupportedModel",
    "build_family",
    "build_model",
    "cayley",
    "check_exhausting",
    "check_faithful",
    "check_full",
    "direct_invertible",
    "eig_normal",
    "elem_norm",
    "enum_prim",
    "family_report",
    "fiber",
    "fredholm_via_family",
    "func_calc",
    "hausdorff",
    "invertible_parametric",
    "invertibility_threshold",
    "invertible_observable",
    "invertible_via_exhausting",
    "invertible_via_faithful",
    "member_invertibility",
    "member_norm",
    "n_a_profile",
    "norm_via_family",
    "normal_eigensystem",
    "op_norm",
    "order_reduction",
    "prim_representation",
    "principal_symbol",
    "rep_apply",
    "spec_observable",
    "spec_union_observable",
    "spectrum_parametric",
    "spectrum_union",
    "standard_probes",
    "symbol_restriction_check",
    "toeplitz_norm",
    "union_spectra",
    "__version__",
]
