"""Tax competition under a partial-coverage global minimum tax.

Closed-form equilibrium regimes, a brute-force game oracle that verifies
them, welfare comparative statics, moment-matching calibration, model
extensions (decentralised havens, tax-dependent profits), and a CLI for
reform reports, sweeps and conformance runs.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .calibration import CalibrationResult, MomentTargets, calibrate, model_moments
from .comparative import (
    full_coverage_comparison,
    introduction_effects,
    marginal_coverage_effects,
    marginal_rate_effects,
    regime_switch_jumps,
)
from .equilibrium import (
    EquilibriumOutcome,
    Regime,
    ThresholdSet,
    best_response_haven_uniform,
    best_response_nonhaven_uniform,
    classify_regime,
    equilibrium,
    regime_thresholds,
    unconstrained_equilibrium,
)
from .errors import (
    BoundaryError,
    CalibrationError,
    ConsistencyError,
    ConvergenceError,
    DomainError,
)
from .extensions import (
    RealResponseParams,
    commitment_gain,
    decentralised_equilibrium,
    decentralised_thresholds,
    real_response_equilibrium,
    real_response_regime0,
    real_response_thresholds,
)
from .model import (
    ModelParams,
    PolicyEnvironment,
    SegmentOutcome,
    TaxSchedule,
    haven_objective,
    nonhaven_objective,
    shifting_share,
    tax_base_elasticity,
    world_objective,
)
from .oracle import (
    CommitmentProfile,
    GridSpec,
    stage1_decentralised,
    stage1_spe,
    stage2_nash,
)
from .report import build_reform_report, build_sweep
from .verify import run_conformance

__all__ = [
    "BACKEND",
    "BoundaryError",
    "CalibrationError",
    "CalibrationResult",
    "CommitmentProfile",
    "ConsistencyError",
    "ConvergenceError",
    "DomainError",
    "EquilibriumOutcome",
    "GridSpec",
    "ModelParams",
    "MomentTargets",
    "PolicyEnvironment",
    "RealResponseParams",
    "Regime",
    "SegmentOutcome",
    "TaxSchedule",
    "ThresholdSet",
    "best_response_haven_uniform",
    "best_response_nonhaven_uniform",
    "build_reform_report",
    "build_sweep",
    "calibrate",
    "classify_regime",
    "commitment_gain",
    "decentralised_equilibrium",
    "decentralised_thresholds",
    "equilibrium",
    "full_coverage_comparison",
    "haven_objective",
    "introduction_effects",
    "marginal_coverage_effects",
    "marginal_rate_effects",
    "model_moments",
    "nonhaven_objective",
    "real_response_equilibrium",
    "real_response_regime0",
    "real_response_thresholds",
    "regime_switch_jumps",
    "regime_thresholds",
    "run_conformance",
    "shifting_share",
    "stage1_decentralised",
    "stage1_spe",
    "stage2_nash",
    "tax_base_elasticity",
    "unconstrained_equilibrium",
    "world_objective",
]
