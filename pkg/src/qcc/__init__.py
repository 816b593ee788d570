"""Coherence and correlation measures for small bipartite density matrices.

The main entry points are re-exported here; see the submodules for details:
:mod:`qcc.state` (types and tensor plumbing), :mod:`qcc.coherence`,
:mod:`qcc.correlated`, :mod:`qcc.extensions`, :mod:`qcc.stategen` and the
JSON front end in :mod:`qcc.io` / :mod:`qcc.cli`.
"""

from .coherence import dephase, dephase_subsystem, l1_coherence, max_loss_certificate
from .correlated import (
    CanonicalBasisMode,
    CCResult,
    asymmetric_discord_delta,
    correlated_coherence,
    correlated_coherence_canonical,
    local_eigenbasis,
    symmetric_discord_zero,
)
from .errors import (
    BadSubsystemIndex,
    DimMismatch,
    NoSymmetricCandidateFound,
    NonHermitian,
    NotClassicalOnRegistry,
    NotPSD,
    OptimizerDidNotConverge,
    QccError,
    StateValidationError,
    TraceNotOne,
)
from .extensions import (
    ExtensionResult,
    classical_copy,
    ensemble_extension,
    eoc_upper_bound,
    locc_round_probe,
    min_cc_extension,
    mixture_extension,
    projection_dilation,
    restrict_extension,
    separable_extension,
    transport_extension,
    unitary_symmetry_residual,
)
from .optimize import OptimizerConfig, OptimizerReport
from .state import (
    DensityMatrix,
    LocalBasis,
    ProductBasisChoice,
    SeparableDecomposition,
    apply_unitary,
    eigh,
    frobenius_distance,
    kron,
    partial_trace,
    purify,
    swap_bipartite,
    validate_density,
)

__all__ = [
    "apply_unitary",
    "asymmetric_discord_delta",
    "BadSubsystemIndex",
    "CanonicalBasisMode",
    "CCResult",
    "classical_copy",
    "correlated_coherence",
    "correlated_coherence_canonical",
    "DensityMatrix",
    "dephase",
    "dephase_subsystem",
    "DimMismatch",
    "eigh",
    "ensemble_extension",
    "eoc_upper_bound",
    "ExtensionResult",
    "frobenius_distance",
    "kron",
    "l1_coherence",
    "local_eigenbasis",
    "LocalBasis",
    "locc_round_probe",
    "max_loss_certificate",
    "min_cc_extension",
    "mixture_extension",
    "NonHermitian",
    "NoSymmetricCandidateFound",
    "NotClassicalOnRegistry",
    "NotPSD",
    "OptimizerConfig",
    "OptimizerDidNotConverge",
    "OptimizerReport",
    "partial_trace",
    "ProductBasisChoice",
    "projection_dilation",
    "purify",
    "QccError",
    "restrict_extension",
    "separable_extension",
    "SeparableDecomposition",
    "StateValidationError",
    "swap_bipartite",
    "symmetric_discord_zero",
    "TraceNotOne",
    "transport_extension",
    "unitary_symmetry_residual",
    "validate_density",
]

__version__ = "0.1.0"
