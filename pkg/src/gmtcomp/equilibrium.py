"""Closed-form tax-competition equilibria under a binding minimum tax.

As the floor rate rises, the equilibrium passes through an ordered sequence
of regimes:

  R0  floor not binding; both sides set unconstrained uniform rates
  R1  havens commit to a single rate at the floor; non-haven uniform above it
  R2  havens split (below-floor rate for small firms); non-haven still uniform
  R3  non-haven commits to the floor for all firms; havens split
  R4  both sides split; small-firm rates fall back to their R0 values

Under full coverage (coverage == 1) the sequence collapses to R0 -> R1f -> R2f.
Switching rates between regimes are closed forms in the parameters; their
ordering is asserted at runtime rather than assumed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import ConsistencyError, DomainError
from .model import (
    ModelParams,
    TaxSchedule,
    haven_objective,
    nonhaven_objective,
    segment_outcome,
)

__all__ = [
    "Regime",
    "ThresholdSet",
    "EquilibriumOutcome",
    "unconstrained_equilibrium",
    "best_response_nonhaven_uniform",
    "best_response_haven_uniform",
    "regime_thresholds",
    "classify_regime",
    "equilibrium",
    "outcome_from_schedules",
    "regime_schedules",
]


class Regime(str, enum.Enum):
    """Equilibrium regime label. The *f* variants are the full-coverage path."""

    R0 = "R0"
    R1 = "R1"
    R2 = "R2"
    R3 = "R3"
    R4 = "R4"
    R1F = "R1f"
    R2F = "R2f"

    @property
    def description(self) -> str:
        return _REGIME_DESCRIPTIONS[self]


_REGIME_DESCRIPTIONS = {
    Regime.R0: "floor not binding; unconstrained uniform rates everywhere",
    Regime.R1: "havens commit to a uniform rate at the floor; non-haven uniform above",
    Regime.R2: "havens split their schedule; non-haven uniform above the floor",
    Regime.R3: "non-haven commits to the floor for all firms; havens split",
    Regime.R4: "both sides split; small-firm rates at unconstrained values",
    Regime.R1F: "full coverage: havens at the floor; non-haven uniform above",
    Regime.R2F: "full coverage: both sides uniform at the floor",
}


@dataclass(frozen=True)
class ThresholdSet:
    """All regime-switching and welfare sign-switching floor rates.

    t_m0..t_m3      regime switches R0|R1, R1|R2, R2|R3, R3|R4.
    t_m_plus        haven gains from introducing the floor iff below this.
    t_m_plusplus    haven's marginal gain from a higher floor flips sign here.
    t_mf            full-coverage switch R1f|R2f.
    """

    t_m0: float
    t_m1: float
    t_m2: float
    t_m3: float
    t_m_plus: float
    t_m_plusplus: float
    t_mf: float


def unconstrained_rates(params: ModelParams) -> tuple[float, float]:
    """Uniform (non-haven, haven) rates with no floor in force."""
    lam, delta, H = params.mvpf, params.shifting_cost, params.havens
    t_n0 = 2.0 * delta * (lam - 1.0) / (H * (3.0 * lam - 1.0))
    return t_n0, t_n0 / 2.0


def best_response_nonhaven_uniform(t_h: float, params: ModelParams) -> float:
    """Non-haven's optimal uniform rate when every haven charges t_h."""
    lam, delta, H = params.mvpf, params.shifting_cost, params.havens
    return (lam - 1.0) * (H * t_h + delta) / (H * (2.0 * lam - 1.0))


def best_response_haven_uniform(t_n: float) -> float:
    """A haven's unconstrained optimum halves the non-haven rate."""
    return t_n / 2.0


def regime_thresholds(params: ModelParams) -> ThresholdSet:
    """Compute all seven switching rates and assert their ordering.

    Requires coverage strictly inside (0, 1); the full-coverage path has its
    own two-threshold structure handled by :func:`classify_regime`.
    """
    phi = params.coverage
    if not 0 < phi < 1:
        raise DomainError(f"regime thresholds require coverage in (0, 1), got {phi}")
    lam, delta, H = params.mvpf, params.shifting_cost, params.havens

    t_m0 = delta * (lam - 1.0) / (H * (3.0 * lam - 1.0))
    t_m1 = (delta * (lam - 1.0) * (2.0 * lam - 1.0)
            / (H * (lam * (3.0 * lam - 1.0) - phi * (lam - 1.0) ** 2)))
    t_m2 = 2.0 * delta * (lam - 1.0) / (H * (3.0 * lam - 1.0 - phi * (lam - 1.0)))
    t_m3 = (2.0 * delta * (lam - 1.0) * (8.0 * lam - 3.0)
            / (H * (3.0 * lam - 1.0) * (4.0 * lam - 1.0)))
    t_m_plus = (delta * (lam - 1.0) * (2.0 * lam - 1.0)
                / (H * lam * (3.0 * lam - 1.0)))
    t_m_plusplus = delta * (lam - 1.0) / (2.0 * H * lam)
    t_mf = delta * (lam - 1.0) / (H * lam)

    ordered = (t_m0 < t_m1 < t_m2 < t_m3
               and t_m0 < t_m_plusplus < t_m_plus < t_m1
               and t_m1 < t_mf)
    if not ordered:
        raise ConsistencyError(
            "threshold ordering violated (formula transcription bug?): "
            f"t_m0={t_m0}, t_m1={t_m1}, t_m2={t_m2}, t_m3={t_m3}, "
            f"t_m_plus={t_m_plus}, t_m_plusplus={t_m_plusplus}, t_mf={t_mf}"
        )
    return ThresholdSet(t_m0, t_m1, t_m2, t_m3, t_m_plus, t_m_plusplus, t_mf)


def classify_regime(t_m: float, params: ModelParams) -> Regime:
    """Map a floor rate to its equilibrium regime.

    Boundaries belong to the lower (committing) regime: R1 on [t_m0, t_m1],
    R2 on (t_m1, t_m2], R3 on (t_m2, t_m3], R4 above t_m3.
    """
    if not 0 <= t_m <= 1:
        raise DomainError(f"t_m must lie in [0, 1], got {t_m}")
    lam, delta, H = params.mvpf, params.shifting_cost, params.havens
    if params.coverage == 1.0:
        t_m0 = delta * (lam - 1.0) / (H * (3.0 * lam - 1.0))
        t_mf = delta * (lam - 1.0) / (H * lam)
        if t_m < t_m0:
            return Regime.R0
        if t_m <= t_mf:
            return Regime.R1F
        return Regime.R2F
    thr = regime_thresholds(params)
    if t_m < thr.t_m0:
        return Regime.R0
    if t_m <= thr.t_m1:
        return Regime.R1
    if t_m <= thr.t_m2:
        return Regime.R2
    if t_m <= thr.t_m3:
        return Regime.R3
    return Regime.R4


def regime_schedules(regime: Regime, t_m: float,
                     params: ModelParams) -> tuple[TaxSchedule, TaxSchedule]:
    """Equilibrium (non-haven, haven) schedules for a *given* regime.

    Does not check that ``regime`` is the equilibrium regime at ``t_m``;
    that makes regime-switch discontinuities evaluable from both sides.
    """
    lam, delta, H = params.mvpf, params.shifting_cost, params.havens
    phi = params.coverage
    t_n0, t_h0 = unconstrained_rates(params)
    if regime is Regime.R0:
        return TaxSchedule.uniform(t_n0), TaxSchedule.uniform(t_h0)
    if regime in (Regime.R1, Regime.R1F):
        t_n1 = best_response_nonhaven_uniform(t_m, params)
        return TaxSchedule.uniform(t_n1), TaxSchedule.uniform(t_m)
    if regime is Regime.R2:
        t_n2 = (2.0 * (lam - 1.0) * (phi * H * t_m + delta)
                / (H * (3.0 * lam - 1.0 + phi * (lam - 1.0))))
        return TaxSchedule.uniform(t_n2), TaxSchedule(t_n2 / 2.0, t_m)
    if regime is Regime.R3:
        return TaxSchedule.uniform(t_m), TaxSchedule(t_m / 2.0, t_m)
    if regime is Regime.R4:
        return TaxSchedule(t_n0, t_m), TaxSchedule(t_h0, t_m)
    if regime is Regime.R2F:
        return TaxSchedule.uniform(t_m), TaxSchedule.uniform(t_m)
    raise DomainError(f"unknown regime {regime!r}")


@dataclass(frozen=True)
class EquilibriumOutcome:
    """Full description of one tax-competition equilibrium.

    Welfare fields are normalised by the marginal value of public funds, so
    haven welfare equals haven revenue. All money fields in billion USD.
    """

    regime: Regime
    nonhaven: TaxSchedule
    haven: TaxSchedule
    theta_small: float
    theta_large: float
    shifted_profits_total: float
    welfare_nonhaven: float
    welfare_haven_total: float
    welfare_world: float
    revenue_nonhaven: float
    revenue_haven_total: float


def outcome_from_schedules(regime: Regime, nonhaven: TaxSchedule,
                           haven: TaxSchedule,
                           params: ModelParams) -> EquilibriumOutcome:
    """Assemble the aggregate outcome record for given equilibrium schedules."""
    lam, H, Pi = params.mvpf, params.havens, params.total_profits
    small = segment_outcome(nonhaven.small_rate, haven.small_rate, params,
                            1.0 - params.coverage)
    large = segment_outcome(nonhaven.large_rate, haven.large_rate, params,
                            params.coverage)
    shifted = Pi * H * (small.segment_weight * small.theta_per_haven
                        + large.segment_weight * large.theta_per_haven)
    revenue_n = Pi * (small.segment_weight * nonhaven.small_rate * small.retained_share
                      + large.segment_weight * nonhaven.large_rate * large.retained_share)
    revenue_h = Pi * H * (small.segment_weight * haven.small_rate * small.theta_per_haven
                          + large.segment_weight * haven.large_rate * large.theta_per_haven)
    g_n = nonhaven_objective(nonhaven, haven, params)
    g_h_total = H * haven_objective(nonhaven, haven, params)
    return EquilibriumOutcome(
        regime=regime,
        nonhaven=nonhaven,
        haven=haven,
        theta_small=small.theta_per_haven,
        theta_large=large.theta_per_haven,
        shifted_profits_total=shifted,
        welfare_nonhaven=g_n / lam,
        welfare_haven_total=g_h_total / lam,
        welfare_world=(g_n + g_h_total) / lam,
        revenue_nonhaven=revenue_n,
        revenue_haven_total=revenue_h,
    )


def unconstrained_equilibrium(params: ModelParams) -> EquilibriumOutcome:
    """The no-floor benchmark (regime R0)."""
    nonhaven, haven = regime_schedules(Regime.R0, 0.0, params)
    return outcome_from_schedules(Regime.R0, nonhaven, haven, params)


def equilibrium(t_m: float, params: ModelParams) -> EquilibriumOutcome:
    """Closed-form equilibrium outcome at floor rate ``t_m``."""
    regime = classify_regime(t_m, params)
    nonhaven, haven = regime_schedules(regime, t_m, params)
    return outcome_from_schedules(regime, nonhaven, haven, params)
