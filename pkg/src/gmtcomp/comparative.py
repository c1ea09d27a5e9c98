"""Welfare effects of the minimum tax: introduction, rate and coverage reforms.

Derivative formulas are regime-specific closed forms in the parameters,
obtained by differentiating the equilibrium welfare polynomials; the
conformance suite checks every one against central finite differences of the
equilibrium-welfare path, which never touches these expressions.

All welfare numbers here follow the reporting convention of
:class:`gmtcomp.equilibrium.EquilibriumOutcome`: raw objectives divided by
the marginal value of public funds, in billion USD. Haven figures aggregate
all havens.
"""

from __future__ import annotations

from dataclasses import dataclass

from .equilibrium import (
    EquilibriumOutcome,
    Regime,
    classify_regime,
    equilibrium,
    outcome_from_schedules,
    regime_schedules,
    regime_thresholds,
    unconstrained_equilibrium,
)
from .errors import BoundaryError, DomainError
from .model import ModelParams

__all__ = [
    "WelfareDelta",
    "GroupDerivatives",
    "RegimeSwitchJumps",
    "FullCoverageComparison",
    "introduction_effects",
    "marginal_rate_effects",
    "marginal_coverage_effects",
    "regime_switch_jumps",
    "full_coverage_comparison",
]


@dataclass(frozen=True)
class WelfareDelta:
    """Welfare change per jurisdiction group, billion USD.

    ``signs`` holds the predicted sign labels ('+', '-', '0' or None) for
    (non-haven, haven total, world); ``applicable`` is False where the
    haven-sign prediction's coverage hypothesis (3/4 < coverage < 1) fails,
    in which case no haven sign is claimed.
    """

    d_nonhaven: float
    d_haven_total: float
    d_world: float
    signs: tuple
    applicable: bool


@dataclass(frozen=True)
class GroupDerivatives:
    """Per-group welfare derivative at an interior point of a regime."""

    regime: Regime
    d_nonhaven: float
    d_haven_total: float
    d_world: float


@dataclass(frozen=True)
class RegimeSwitchJumps:
    """Welfare discontinuities (upper minus lower regime) at the switching rates."""

    at_t_m1: tuple
    at_t_m2: tuple
    at_t_m3: tuple


@dataclass(frozen=True)
class FullCoverageComparison:
    """Same floor rate under the given coverage versus full coverage."""

    partial: EquilibriumOutcome
    full: EquilibriumOutcome
    welfare_gap_world: float
    revenue_gap_world: float
    shifted_profits_gap: float


def introduction_effects(t_m: float, params: ModelParams) -> WelfareDelta:
    """Welfare change from introducing a binding floor, relative to no floor.

    Requires the floor to bind (t_m at or above the haven's unconstrained
    rate). The haven's sign prediction (positive below t_m_plus, negative
    above) is only claimed for coverage in (3/4, 1).
    """
    lam, delta, H = params.mvpf, params.shifting_cost, params.havens
    t_m0 = delta * (lam - 1.0) / (H * (3.0 * lam - 1.0))
    if t_m < t_m0:
        raise DomainError(f"floor rate {t_m} does not bind (needs >= {t_m0})")
    after = equilibrium(t_m, params)
    base = unconstrained_equilibrium(params)
    applicable = 0.75 < params.coverage < 1.0
    if applicable:
        t_m_plus = regime_thresholds(params).t_m_plus
        haven_sign = "+" if t_m < t_m_plus else "-"
    else:
        haven_sign = None
    return WelfareDelta(
        d_nonhaven=after.welfare_nonhaven - base.welfare_nonhaven,
        d_haven_total=after.welfare_haven_total - base.welfare_haven_total,
        d_world=after.welfare_world - base.welfare_world,
        signs=("+", haven_sign, "+"),
        applicable=applicable,
    )


_SWITCH_EPS = 1e-12


def _interior_regime(t_m: float, params: ModelParams) -> Regime:
    if params.coverage == 1.0:
        raise DomainError("marginal-effect formulas cover partial coverage only")
    thr = regime_thresholds(params)
    for name in ("t_m0", "t_m1", "t_m2", "t_m3"):
        if abs(t_m - getattr(thr, name)) <= _SWITCH_EPS:
            raise BoundaryError(
                f"t_m={t_m} sits at switching rate {name}; "
                "use regime_switch_jumps for the discontinuity")
    return classify_regime(t_m, params)


def marginal_rate_effects(t_m: float, params: ModelParams) -> GroupDerivatives:
    """d(welfare)/d(floor rate) per group, at an interior point of a regime.

    Sign pattern: non-haven and world positive in R1-R4; haven positive in
    R1 below t_m_plusplus then negative, negative in R2, positive in R3,
    exactly zero in R4. In R0 the floor is slack and all derivatives vanish.
    """
    regime = _interior_regime(t_m, params)
    lam, delta, H = params.mvpf, params.shifting_cost, params.havens
    phi = params.coverage
    if regime is Regime.R0:
        d_n = d_h = 0.0
    elif regime is Regime.R1:
        d_n = (H * lam**2 * t_m + delta * (lam - 1.0) ** 2) / (delta * (2.0 * lam - 1.0))
        d_h = lam * (delta * (lam - 1.0) - 2.0 * H * lam * t_m) / (delta * (2.0 * lam - 1.0))
    elif regime is Regime.R2:
        base = 3.0 * lam - 1.0 + phi * (lam - 1.0)
        d_n = phi * (
            H * t_m * (8.0 * lam**3 * phi - 13.0 * lam**2 * phi + 9.0 * lam**2
                       + 6.0 * lam * phi - 6.0 * lam - phi + 1.0) / delta
            + (lam - 1.0) ** 2 * (8.0 * lam - phi - 3.0)
        ) / base**2
        d_h = 2.0 * lam * phi * (
            H * t_m * (lam**2 * phi - 9.0 * lam**2 - 2.0 * lam * phi
                       + 6.0 * lam + phi - 1.0) / delta
            + 2.0 * (lam - 1.0) * (2.0 * lam - 1.0)
        ) / base**2
    elif regime is Regime.R3:
        d_n = (lam - 1.0) - H * (4.0 * lam - 1.0) * (1.0 - phi) * t_m / (4.0 * delta)
        d_h = H * lam * (1.0 - phi) * t_m / (2.0 * delta)
    else:  # R4
        d_n = phi * (lam - 1.0)
        d_h = 0.0
    scale = params.total_profits / lam
    return GroupDerivatives(regime, d_n * scale, d_h * scale, (d_n + d_h) * scale)


def marginal_coverage_effects(t_m: float, params: ModelParams) -> GroupDerivatives:
    """d(welfare)/d(coverage) per group, at an interior point of a regime.

    Zero everywhere in R1 (all schedules uniform); in R2-R4 positive for the
    non-haven and the world, negative for the havens. Points where a tiny
    coverage change would flip the regime are refused.
    """
    regime = _interior_regime(t_m, params)
    eps = 1e-9
    for phi_probe in (params.coverage - eps, params.coverage + eps):
        if 0.0 < phi_probe < 1.0:
            if classify_regime(t_m, params.with_coverage(phi_probe)) is not regime:
                raise BoundaryError(
                    f"a marginal coverage change at t_m={t_m} switches the regime")
    lam, delta, H = params.mvpf, params.shifting_cost, params.havens
    phi = params.coverage
    if regime in (Regime.R0, Regime.R1):
        d_n = d_h = 0.0
    elif regime is Regime.R2:
        base = 3.0 * lam - 1.0 + phi * (lam - 1.0)
        lead = H * t_m * (3.0 * lam - 1.0) - delta * (lam - 1.0)
        theta_n = (phi * (H * t_m * (lam - 1.0) * (16.0 * lam**2 - 13.0 * lam + 3.0)
                          - delta * (lam - 1.0) ** 2)
                   + H * t_m * (3.0 * lam - 1.0) ** 2
                   + delta * (lam - 1.0) * (16.0 * lam**2 - 19.0 * lam + 5.0))
        theta_h = (phi * (H * t_m * (lam - 1.0) * (5.0 * lam - 3.0)
                          - delta * (lam - 1.0) ** 2)
                   - H * t_m * (3.0 * lam - 1.0) ** 2
                   + delta * (lam - 1.0) * (5.0 * lam - 3.0))
        d_n = theta_n * lead / (2.0 * delta * H * base**3)
        d_h = lam * theta_h * lead / (delta * H * base**3)
    elif regime is Regime.R3:
        d_n = H * (4.0 * lam - 1.0) * t_m**2 / (8.0 * delta)
        d_h = -H * lam * t_m**2 / (4.0 * delta)
    else:  # R4
        d_n = ((lam - 1.0)
               * (2.0 * H * t_m * (3.0 * lam - 1.0) ** 2
                  - delta * (lam - 1.0) * (8.0 * lam - 3.0))
               / (2.0 * H * (3.0 * lam - 1.0) ** 2))
        d_h = -delta * lam * (lam - 1.0) ** 2 / (H * (3.0 * lam - 1.0) ** 2)
    scale = params.total_profits / lam
    return GroupDerivatives(regime, d_n * scale, d_h * scale, (d_n + d_h) * scale)


def regime_switch_jumps(params: ModelParams) -> RegimeSwitchJumps:
    """Welfare discontinuities at the three switching rates.

    Evaluates both adjacent regimes' closed-form schedules exactly at each
    switching rate. Structure: at t_m1 the non-haven and world drop while the
    haven is unaffected; at t_m2 everything is continuous; at t_m3 the haven
    and world drop while the non-haven is unaffected.
    """
    thr = regime_thresholds(params)

    def jump(lower, upper, t_m):
        a = outcome_from_schedules(lower, *regime_schedules(lower, t_m, params), params)
        b = outcome_from_schedules(upper, *regime_schedules(upper, t_m, params), params)
        return (b.welfare_nonhaven - a.welfare_nonhaven,
                b.welfare_haven_total - a.welfare_haven_total,
                b.welfare_world - a.welfare_world)

    return RegimeSwitchJumps(
        at_t_m1=jump(Regime.R1, Regime.R2, thr.t_m1),
        at_t_m2=jump(Regime.R2, Regime.R3, thr.t_m2),
        at_t_m3=jump(Regime.R3, Regime.R4, thr.t_m3),
    )


def full_coverage_comparison(t_m: float, params: ModelParams) -> FullCoverageComparison:
    """Outcome at the given coverage versus the same floor under full coverage."""
    partial = equilibrium(t_m, params)
    full = equilibrium(t_m, params.with_coverage(1.0))
    return FullCoverageComparison(
        partial=partial,
        full=full,
        welfare_gap_world=full.welfare_world - partial.welfare_world,
        revenue_gap_world=(full.revenue_nonhaven + full.revenue_haven_total
                           - partial.revenue_nonhaven - partial.revenue_haven_total),
        shifted_profits_gap=full.shifted_profits_total - partial.shifted_profits_total,
    )
