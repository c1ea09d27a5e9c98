"""Moment-matching calibration of the public-funds weight and shifting cost.

Two targeted moments — the non-haven's unconstrained rate and the aggregate
shifted-profit share — exactly identify the two free parameters in the
baseline model: the share pins the public-funds weight through
share = (mvpf - 1)/(3*mvpf - 1), after which the rate pins the shifting cost.
The analytic solution seeds a derivative-free polish so the reported residual
is an actual minimised objective, not an assumption.

The real-response variant keeps the share equation (haven rates still halve
the non-haven rate) but the rate moment must be inverted through the numeric
regime-0 solver; baseline profits are then backed out so realized profits hit
their target.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import brentq, minimize

from .equilibrium import unconstrained_equilibrium
from .errors import CalibrationError, DomainError
from .extensions import RealResponseParams, real_response_regime0
from .model import ModelParams

__all__ = [
    "MomentTargets",
    "Moments",
    "CalibrationResult",
    "model_moments",
    "calibrate",
    "load_moments_file",
]


@dataclass(frozen=True)
class MomentTargets:
    """Data moments the calibration matches: both fractions in (0, 1)."""

    t_n0_target: float
    shifted_share_target: float
    weights: tuple = (1.0, 1.0)

    def __post_init__(self):
        for name in ("t_n0_target", "shifted_share_target"):
            v = getattr(self, name)
            if not (math.isfinite(v) and 0 < v < 1):
                raise DomainError(f"{name} must lie in (0, 1), got {v}")
        if len(self.weights) != 2 or any(w <= 0 for w in self.weights):
            raise DomainError(f"weights must be two positive numbers, got {self.weights}")


@dataclass(frozen=True)
class Moments:
    """Model-implied unconstrained-equilibrium moments."""

    t_n0: float
    t_h0: float
    shifted_share: float
    revenue_loss: float  # non-haven revenue forgone to shifting, billion USD


@dataclass(frozen=True)
class CalibrationResult:
    mvpf_hat: float
    shifting_cost_hat: float
    residual: float
    moments_model: Moments
    nontargeted: dict
    variant: str
    havens: int
    coverage: float
    total_profits: float
    baseline_profits_hat: float | None = None

    @property
    def params(self) -> ModelParams | RealResponseParams:
        if self.variant == "real_response":
            return RealResponseParams(
                self.mvpf_hat, self.shifting_cost_hat, self.havens,
                self.coverage, self.baseline_profits_hat)
        return ModelParams(self.mvpf_hat, self.shifting_cost_hat, self.havens,
                           self.coverage, self.total_profits)


def model_moments(params: ModelParams) -> Moments:
    """Unconstrained-equilibrium moments implied by the parameters."""
    out = unconstrained_equilibrium(params)
    share = out.shifted_profits_total / params.total_profits
    return Moments(
        t_n0=out.nonhaven.small_rate,
        t_h0=out.haven.small_rate,
        shifted_share=share,
        revenue_loss=out.nonhaven.small_rate * out.shifted_profits_total,
    )


def _real_response_moments(params: RealResponseParams) -> tuple[Moments, float]:
    out = real_response_regime0(params)
    realized = params.baseline_profits * params.scale(out.nonhaven.small_rate)
    share = out.shifted_profits_total / realized
    moments = Moments(
        t_n0=out.nonhaven.small_rate,
        t_h0=out.haven.small_rate,
        shifted_share=share,
        revenue_loss=out.nonhaven.small_rate * out.shifted_profits_total,
    )
    return moments, realized


def _objective(targets: MomentTargets, t_n0: float, share: float) -> float:
    w1, w2 = targets.weights
    return (w1 * (t_n0 - targets.t_n0_target) ** 2
            + w2 * (share - targets.shifted_share_target) ** 2)


def calibrate(targets: MomentTargets, havens: int, coverage: float,
              total_profits: float, variant: str = "baseline") -> CalibrationResult:
    """Recover (mvpf, shifting_cost) — plus baseline profits for the
    real-response variant — from the targeted moments.

    Raises :class:`CalibrationError` when no admissible parameters are
    consistent with the targets.
    """
    if variant not in ("baseline", "real_response"):
        raise DomainError(f"variant must be baseline|real_response, got {variant!r}")
    t, s = targets.t_n0_target, targets.shifted_share_target
    if s >= 1.0 / 3.0:
        raise CalibrationError(
            f"shifted-share target {s} is not attainable: the model share "
            "(mvpf - 1)/(3*mvpf - 1) stays below 1/3 for any admissible mvpf")
    mvpf0 = (1.0 - s) / (1.0 - 3.0 * s)
    delta0 = havens * t / (2.0 * s)  # from share = havens * t_n0 / (2 * shifting_cost)
    if not 0 < delta0 < 1.5 * havens:
        raise CalibrationError(
            f"targets imply shifting_cost={delta0}, outside the admissible "
            f"(0, {1.5 * havens}) for havens={havens}")

    if variant == "baseline":
        def moments_at(x):
            p = ModelParams(x[0], x[1], havens, coverage, total_profits)
            m = model_moments(p)
            return m, None

        res = minimize(
            lambda x: _objective(targets, *_point(moments_at, x)),
            x0=np.array([mvpf0, delta0]), method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": 1e-24, "maxiter": 600})
        mvpf_hat, delta_hat = float(res.x[0]), float(res.x[1])
        moments, _ = moments_at((mvpf_hat, delta_hat))
        residual = _objective(targets, moments.t_n0, moments.shifted_share)
        baseline_profits_hat = None
    else:
        delta_hat = delta0

        def rate_gap(mvpf):
            p = RealResponseParams(mvpf, delta_hat, havens, coverage, 1.0)
            return real_response_regime0(p).nonhaven.small_rate - t

        try:
            mvpf_hat = brentq(rate_gap, 1.0 + 1e-9, 1e3, xtol=1e-12)
        except ValueError as exc:
            raise CalibrationError(
                f"no admissible mvpf reproduces the rate target {t} at "
                f"shifting_cost={delta_hat}") from exc
        base = RealResponseParams(mvpf_hat, delta_hat, havens, coverage, 1.0)
        rate0 = real_response_regime0(base).nonhaven.small_rate
        baseline_profits_hat = total_profits / base.scale(rate0)
        fitted = RealResponseParams(mvpf_hat, delta_hat, havens, coverage,
                                    baseline_profits_hat)
        moments, _ = _real_response_moments(fitted)
        residual = _objective(targets, moments.t_n0, moments.shifted_share)

    return CalibrationResult(
        mvpf_hat=mvpf_hat,
        shifting_cost_hat=delta_hat,
        residual=residual,
        moments_model=moments,
        nontargeted={"t_h0": moments.t_h0, "revenue_loss": moments.revenue_loss},
        variant=variant,
        havens=havens,
        coverage=coverage,
        total_profits=total_profits,
        baseline_profits_hat=baseline_profits_hat,
    )


def _point(moments_at, x):
    if not (x[0] > 1 and 0 < x[1] < np.inf):
        return 1e6, 1e6
    try:
        m, _ = moments_at(x)
    except DomainError:
        return 1e6, 1e6
    return m.t_n0, m.shifted_share


_MOMENTS_FIELDS = {
    "t_n0": (float, "rate in (0, 1)"),
    "shifted_share": (float, "fraction in (0, 1)"),
    "H": (int, "positive integer"),
    "phi": (float, "fraction in (0, 1]"),
    "Pi": (float, "positive, billion USD"),
}


def load_moments_file(path) -> dict:
    """Read and validate a moments JSON file.

    Expected fields: t_n0, shifted_share, H, phi, Pi, optional variant
    (``baseline`` or ``real_response``). Errors name the offending field.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise DomainError(f"{path}: expected a JSON object at top level")
    out = {}
    for field, (typ, desc) in _MOMENTS_FIELDS.items():
        if field not in raw:
            raise DomainError(f"{path}: missing required field '{field}' ({desc})")
        value = raw[field]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise DomainError(f"{path}: field '{field}' must be a number ({desc})")
        out[field] = typ(value)
    variant = raw.get("variant", "baseline")
    if variant not in ("baseline", "real_response"):
        raise DomainError(
            f"{path}: field 'variant' must be 'baseline' or 'real_response', "
            f"got {variant!r}")
    out["variant"] = variant
    unknown = set(raw) - set(_MOMENTS_FIELDS) - {"variant"}
    if unknown:
        raise DomainError(f"{path}: unknown field(s) {sorted(unknown)}")
    if out["H"] < 1:
        raise DomainError(f"{path}: field 'H' must be a positive integer")
    if not 0 < out["phi"] <= 1:
        raise DomainError(f"{path}: field 'phi' must lie in (0, 1]")
    if out["Pi"] <= 0:
        raise DomainError(f"{path}: field 'Pi' must be positive")
    return out
