"""Two-mode Gaussian entanglement under loss: PPT and variance-sum tests, ESD classification."""

from .channels import ChannelSpec, attenuate, duan_after_symmetric_loss, rebalance
from .criteria import DuanReport, PptReport, duan_sum, partial_transpose, ppt_min_eigenvalue
from .cv_core import (
    NotTwinBeamError,
    TwinBeamVariances,
    UnphysicalStateError,
    covariance_matrix,
    embed,
    extract,
    is_physical,
    purity,
    symplectic_eigenvalues,
    two_mode_squeezed,
    vacuum,
)
from .esd import (
    Classification,
    Region,
    SweepCurve,
    WQuantities,
    classify,
    classify_analytic,
    classify_oracle,
    critical_transmission,
    region_map,
    transmission_sweep,
    w_quantities,
)
from .ingest import (
    QuadratureRecord,
    TooFewSamplesError,
    estimate_covariance,
    gaussianity_check,
    synthesize_record,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelSpec",
    "attenuate",
    "duan_after_symmetric_loss",
    "rebalance",
    "DuanReport",
    "PptReport",
    "duan_sum",
    "partial_transpose",
    "ppt_min_eigenvalue",
    "NotTwinBeamError",
    "TwinBeamVariances",
    "UnphysicalStateError",
    "covariance_matrix",
    "embed",
    "extract",
    "is_physical",
    "purity",
    "symplectic_eigenvalues",
    "two_mode_squeezed",
    "vacuum",
    "Classification",
    "Region",
    "SweepCurve",
    "WQuantities",
    "classify",
    "classify_analytic",
    "classify_oracle",
    "critical_transmission",
    "region_map",
    "transmission_sweep",
    "w_quantities",
    "QuadratureRecord",
    "TooFewSamplesError",
    "estimate_covariance",
    "gaussianity_check",
    "synthesize_record",
]
