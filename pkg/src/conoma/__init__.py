"""Cooperative NOMA with strong-user-first power allocation: SINR engines,
closed-form outage analysis, Monte-Carlo estimation and power search."""

__version__ = "0.1.0"

from .model import (  # noqa: E402
    NetworkRealization,
    PowerAllocation,
    RateTargets,
    Scheme,
    SinrVector,
    decode_schedule,
    sinr_conventional,
    sinr_oma,
    sinr_proposed,
)
from .analytic import (  # noqa: E402
    HypoExpParams,
    MopK2Params,
    RatioCdfParams,
    mop_closed_form_k2,
    mop_k2_subterms,
    strong_user_outage,
    weak_user_outage,
)
from .simulate import ExperimentConfig, OutageStats, run_experiment  # noqa: E402
from .optimize import OptimizationResult, optimize_cnpa_k2, optimize_cnsa_k2  # noqa: E402
