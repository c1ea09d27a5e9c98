"""Core model: parameters, tax schedules, profit shifting, welfare objectives.

The economy has one non-haven country hosting all multinational headquarters
and ``havens`` symmetric tax havens. Firms shift a share of true profits to
each haven at quadratic cost; countries may tax firms below and above the
minimum-tax size threshold at different rates (a split schedule). Everything
here is a pure function of its inputs; all value types are frozen.

Units: tax rates are fractions in [0, 1]; money is billion USD. Welfare
reported by higher-level modules is the raw objective divided by the marginal
value of public funds (the raw objective is what these functions return).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "ModelParams",
    "TaxSchedule",
    "PolicyEnvironment",
    "SegmentOutcome",
    "shifting_share",
    "shifting_share_unclamped",
    "segment_outcome",
    "nonhaven_objective",
    "haven_objective",
    "world_objective",
    "tax_base_elasticity",
]


def _require_finite(name, value):
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class ModelParams:
    """Structural parameters with their admissibility domain.

    mvpf            marginal value of public funds (> 1); the weight on tax
                    revenue in welfare. Large values approach a pure
                    revenue-maximising government.
    shifting_cost   cost parameter of profit shifting (0 < c < 3*havens/2;
                    the upper bound keeps unconstrained equilibrium rates
                    inside (0, 1)).
    havens          number of symmetric tax havens (>= 1).
    coverage        share of aggregate profits earned by firms above the
                    minimum-tax threshold, in (0, 1].
    total_profits   aggregate true pre-tax profits, billion USD (> 0).
    """

    mvpf: float
    shifting_cost: float
    havens: int
    coverage: float
    total_profits: float

    def __post_init__(self):
        for name in ("mvpf", "shifting_cost", "coverage", "total_profits"):
            _require_finite(name, getattr(self, name))
        if self.mvpf <= 1:
            raise DomainError(f"mvpf must exceed 1, got {self.mvpf}")
        if not isinstance(self.havens, int) or self.havens < 1:
            raise DomainError(f"havens must be a positive integer, got {self.havens!r}")
        if not 0 < self.shifting_cost < 1.5 * self.havens:
            raise DomainError(
                f"shifting_cost must lie in (0, {1.5 * self.havens}) for "
                f"havens={self.havens}, got {self.shifting_cost}"
            )
        if not 0 < self.coverage <= 1:
            raise DomainError(f"coverage must lie in (0, 1], got {self.coverage}")
        if self.total_profits <= 0:
            raise DomainError(f"total_profits must be positive, got {self.total_profits}")

    def with_coverage(self, coverage: float) -> "ModelParams":
        return ModelParams(self.mvpf, self.shifting_cost, self.havens,
                           coverage, self.total_profits)


@dataclass(frozen=True)
class TaxSchedule:
    """Pair of statutory rates: below-threshold firms and at/above-threshold firms."""

    small_rate: float
    large_rate: float

    def __post_init__(self):
        for name in ("small_rate", "large_rate"):
            rate = getattr(self, name)
            _require_finite(name, rate)
            if not 0 <= rate <= 1:
                raise DomainError(f"{name} must lie in [0, 1], got {rate}")

    @property
    def is_uniform(self) -> bool:
        return self.small_rate == self.large_rate

    @classmethod
    def uniform(cls, rate: float) -> "TaxSchedule":
        return cls(rate, rate)


@dataclass(frozen=True)
class PolicyEnvironment:
    """Minimum-tax setting: the floor rate and whether the floor applies at all."""

    gmt_rate: float
    gmt_applies: bool = True

    def __post_init__(self):
        _require_finite("gmt_rate", self.gmt_rate)
        if not 0 <= self.gmt_rate <= 1:
            raise DomainError(f"gmt_rate must lie in [0, 1], got {self.gmt_rate}")

    @property
    def effective_rate(self) -> float:
        return self.gmt_rate if self.gmt_applies else 0.0


@dataclass(frozen=True)
class SegmentOutcome:
    """Shifting outcome for one firm segment.

    theta_per_haven  profit share booked in each haven.
    retained_share   share kept in the non-haven, 1 - havens * theta_per_haven.
    segment_weight   the segment's share of aggregate profits.
    """

    theta_per_haven: float
    retained_share: float
    segment_weight: float


def shifting_share_unclamped(t_n: float, t_h: float, delta: float) -> float:
    """Raw first-order shifting share (t_n - t_h) / delta, sign included.

    Kept for derivative diagnostics; economic quantities use the clamped
    :func:`shifting_share`.
    """
    for name, v in (("t_n", t_n), ("t_h", t_h), ("delta", delta)):
        _require_finite(name, v)
    if delta <= 0:
        raise DomainError(f"delta must be positive, got {delta}")
    return (t_n - t_h) / delta


def shifting_share(t_n: float, t_h: float, delta: float) -> float:
    """Per-haven profit share a firm shifts given the rate differential.

    The firm's optimum is (t_n - t_h) / delta, independent of firm size;
    reverse shifting (t_h > t_n) is clamped to zero.
    """
    return max(0.0, shifting_share_unclamped(t_n, t_h, delta))


def _theta_capped(t_n: float, t_h: float, params: ModelParams) -> float:
    # Aggregate shifting cannot exceed the firm's whole profit. The cap never
    # binds at equilibrium schedules; it only matters for off-path rate pairs
    # probed by numeric solvers.
    return min(shifting_share(t_n, t_h, params.shifting_cost), 1.0 / params.havens)


def segment_outcome(t_n: float, t_h: float, params: ModelParams,
                    segment_weight: float) -> SegmentOutcome:
    theta = _theta_capped(t_n, t_h, params)
    return SegmentOutcome(theta, 1.0 - params.havens * theta, segment_weight)


def _segment_terms(t_n: float, t_h: float, params: ModelParams):
    """Per-unit-of-profit pieces for one segment: (private, revenue_n, revenue_h_total, theta)."""
    H = params.havens
    delta = params.shifting_cost
    theta = _theta_capped(t_n, t_h, params)
    retained = 1.0 - H * theta
    private = ((1.0 - t_n) * retained
               + H * (1.0 - t_h) * theta
               - H * delta * theta * theta / 2.0)
    return private, t_n * retained, H * t_h * theta, theta


def _segments(t_n_sched: TaxSchedule, t_h_sched: TaxSchedule, params: ModelParams):
    yield t_n_sched.small_rate, t_h_sched.small_rate, 1.0 - params.coverage
    yield t_n_sched.large_rate, t_h_sched.large_rate, params.coverage


def nonhaven_objective(t_n_sched: TaxSchedule, t_h_sched: TaxSchedule,
                       params: ModelParams) -> float:
    """Non-haven welfare: private income plus mvpf-weighted tax revenue.

    Evaluated segment by segment (weights 1-coverage and coverage); for
    uniform schedules this reduces exactly to the single-segment form.
    """
    lam = params.mvpf
    total = 0.0
    for t_n, t_h, w in _segments(t_n_sched, t_h_sched, params):
        private, revenue, _, _ = _segment_terms(t_n, t_h, params)
        total += w * (private + lam * revenue)
    return total * params.total_profits


def haven_objective(t_n_sched: TaxSchedule, t_h_sched: TaxSchedule,
                    params: ModelParams) -> float:
    """Welfare of one representative haven: mvpf-weighted revenue on inbound profits."""
    lam = params.mvpf
    total = 0.0
    for t_n, t_h, w in _segments(t_n_sched, t_h_sched, params):
        _, _, revenue_h_total, _ = _segment_terms(t_n, t_h, params)
        total += w * revenue_h_total / params.havens
    return lam * total * params.total_profits


def world_objective(t_n_sched: TaxSchedule, t_h_sched: TaxSchedule,
                    params: ModelParams) -> float:
    """Utilitarian sum: non-haven objective plus all havens' objectives."""
    return (nonhaven_objective(t_n_sched, t_h_sched, params)
            + params.havens * haven_objective(t_n_sched, t_h_sched, params))


def tax_base_elasticity(t_n: float, t_h: float, params: ModelParams) -> float:
    """Semi-elasticity of the non-haven tax base; equal across firm sizes.

    Requires the base not to be exhausted: shifting_cost - havens*(t_n - t_h) > 0.
    """
    for name, v in (("t_n", t_n), ("t_h", t_h)):
        _require_finite(name, v)
    denom = params.shifting_cost - params.havens * (t_n - t_h)
    if denom <= 0:
        raise DomainError(
            f"tax base exhausted: shifting_cost - havens*(t_n - t_h) = {denom} <= 0"
        )
    return t_n / denom
