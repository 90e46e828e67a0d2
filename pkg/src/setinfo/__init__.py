"""Convex-set parameterized information measures, Bayes risks, and the
numerical certification of the identities connecting them."""

from ._backend import active_backend, set_backend
from .convexsets import (
    ConvexSpec,
    DVarN,
    HadamardScale,
    HPolyhedron,
    LinearPullback,
    PhiHypograph,
    SetReport,
    Translate,
    VPolyhedron,
    check_membership,
    contains,
    dvarn,
    hadamard_scale,
    hpolyhedron,
    polar_gauge,
    pullback,
    region_boundary,
    support,
    support_subgradient,
    to_vrep,
    translate,
    vpolyhedron,
)
from .decision import (
    BRIER,
    FORMS,
    LOG,
    TABLE,
    ZERO_ONE,
    Hypothesis,
    LossSpec,
    SuperpredictionSpec,
    bayes_risk,
    bridge_set,
    conditional_bayes_risk,
    constrained_bayes_risk,
    constrained_bridge_class,
    default_grid,
    loss_matrix,
    loss_vector,
    make_loss,
    phi_induced_loss,
    superprediction,
)
from .errors import (
    ConsistencyError,
    DimensionError,
    DominationError,
    SchemaError,
    SetInfoError,
    SubgradientError,
    UnboundedSupportError,
)
from .experiments import (
    Experiment,
    Kernel,
    RefMeasure,
    compose_label,
    compose_observation,
    default_ref,
    make_ti,
    make_tni,
    product_with_prior,
    rn_matrix,
    rn_vector,
    uniform_ref,
)
from .information import (
    BssReport,
    FunctionClass,
    InfoResult,
    binary_variational_rep,
    boundedness,
    bss_necessary_check,
    certify_range,
    d_entropy,
    d_information,
    f_information,
    f_mutual_information,
    mi_experiment,
    phi_divergence,
    variational_bruteforce,
    variational_information,
)
from .phicatalog import (
    BUILTIN_NAMES,
    CatalogError,
    PhiGenerator,
    affine_offset,
    builtin,
    channel_transform,
    csiszar_conjugate,
    d_phi_set,
    perspective,
    phi_from_set,
)
from .verify import SUITE_NAMES, SuiteReport, TrialConfig, run_all

__version__ = "0.1.0"
