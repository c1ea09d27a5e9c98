"""Reform reports and floor-rate sweep datasets.

A reform report compares one policy scenario (floor rate, coverage, variant)
against the matching no-floor benchmark, per jurisdiction group, in levels
that mirror the quantitative tables: welfare, revenue, and retained-profit
changes in billion USD with percent changes against the benchmark. Sweeps
tabulate the equilibrium path over a floor-rate grid, one CSV row per point.

Text and JSON renderings are generated from the same report object; text
displays money and percent at one decimal, JSON carries full precision.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .equilibrium import (
    EquilibriumOutcome,
    equilibrium,
    regime_thresholds,
    unconstrained_equilibrium,
)
from .errors import DomainError
from .extensions import (
    RealResponseParams,
    decentralised_equilibrium,
    real_response_equilibrium,
    real_response_regime0,
)
from .model import ModelParams

__all__ = [
    "GroupRow",
    "ReformReport",
    "build_reform_report",
    "SweepDataset",
    "build_sweep",
    "SWEEP_COLUMNS",
]

VARIANTS = ("baseline", "decentralised", "real_response")


def _solve(t_m, params, variant, selection):
    if variant == "baseline":
        return equilibrium(t_m, params)
    if variant == "decentralised":
        if params.coverage < 1.0:
            thr = regime_thresholds(params)
            if not thr.t_m0 <= t_m <= thr.t_m2:
                # outside the commitment window the decentralised and
                # collective games coincide
                return equilibrium(t_m, params)
        return decentralised_equilibrium(t_m, params, selection)
    if variant == "real_response":
        return real_response_equilibrium(t_m, params)
    raise DomainError(f"unknown variant {variant!r}")


def _benchmark(params, variant):
    if variant == "real_response":
        return real_response_regime0(params)
    return unconstrained_equilibrium(params)


@dataclass(frozen=True)
class GroupRow:
    """One jurisdiction group's deltas against the no-floor benchmark."""

    group: str
    schedule: tuple | None       # (small_rate, large_rate); None for the world row
    welfare_change: float
    welfare_change_pct: float
    revenue_change: float
    revenue_change_pct: float
    profit_change: float         # change in profits booked in the group
    profit_change_pct: float


@dataclass(frozen=True)
class ReformReport:
    scenario: str
    variant: str
    t_m: float
    coverage: float
    regime: str
    rows: tuple
    compliance_cost: float | None = None
    net_world_revenue_change: float | None = None
    net_world_welfare_change: float | None = None
    coverage_comparison: dict | None = None

    def to_json_dict(self) -> dict:
        out = {
            "scenario": self.scenario,
            "variant": self.variant,
            "t_m": self.t_m,
            "coverage": self.coverage,
            "regime": self.regime,
            "rows": [
                {
                    "group": r.group,
                    "schedule": None if r.schedule is None else
                        {"small_rate": r.schedule[0], "large_rate": r.schedule[1]},
                    "welfare_change": r.welfare_change,
                    "welfare_change_pct": r.welfare_change_pct,
                    "revenue_change": r.revenue_change,
                    "revenue_change_pct": r.revenue_change_pct,
                    "profit_change": r.profit_change,
                    "profit_change_pct": r.profit_change_pct,
                }
                for r in self.rows
            ],
        }
        if self.compliance_cost is not None:
            out["compliance_cost"] = self.compliance_cost
            out["net_world_revenue_change"] = self.net_world_revenue_change
            out["net_world_welfare_change"] = self.net_world_welfare_change
        if self.coverage_comparison is not None:
            out["coverage_comparison"] = self.coverage_comparison
        return out

    def to_text(self) -> str:
        def sched(r):
            if r.schedule is None:
                return "-----"
            s, l = r.schedule
            if s == l:
                return f"{100 * s:.1f}% for all"
            return f"{100 * s:.1f}% small / {100 * l:.1f}% large"

        lines = [
            f"Scenario {self.scenario}: floor {100 * self.t_m:.1f}%, "
            f"coverage {100 * self.coverage:.0f}%, variant {self.variant}, "
            f"regime {self.regime}",
            f"{'':14s}{'Non-haven':>22s}{'Haven':>22s}{'World':>22s}",
        ]
        by = {r.group: r for r in self.rows}

        def fmt(r, field, pct):
            return f"{getattr(r, field):+.1f} ({getattr(r, pct):+.1f}%)"

        lines.append("Tax rates     "
                     + "".join(f"{sched(by[g]):>22s}" for g in ("nonhaven", "haven", "world")))
        for label, field, pct in (
                ("Welfare chg   ", "welfare_change", "welfare_change_pct"),
                ("Revenue chg   ", "revenue_change", "revenue_change_pct"),
                ("Profit chg    ", "profit_change", "profit_change_pct")):
            lines.append(label + "".join(
                f"{fmt(by[g], field, pct):>22s}" for g in ("nonhaven", "haven", "world")))
        lines.append("(billion USD; percent against the no-floor benchmark)")
        if self.compliance_cost is not None:
            lines.append(
                f"Compliance cost {self.compliance_cost:.1f} bUSD -> net world "
                f"revenue change {self.net_world_revenue_change:+.1f}, "
                f"net world welfare change {self.net_world_welfare_change:+.1f}")
        if self.coverage_comparison is not None:
            cc = self.coverage_comparison
            lines.append(
                f"Against coverage {100 * cc['base_coverage']:.0f}%: world revenue "
                f"gap {cc['world_revenue_gap']:+.1f}, world welfare gap "
                f"{cc['world_welfare_gap']:+.1f}")
            if "net_world_revenue_gap" in cc:
                lines.append(
                    f"  net of compliance: revenue gap {cc['net_world_revenue_gap']:+.1f}, "
                    f"welfare gap {cc['net_world_welfare_gap']:+.1f}")
        return "\n".join(lines) + "\n"


def _world_revenue(outcome: EquilibriumOutcome) -> float:
    return outcome.revenue_nonhaven + outcome.revenue_haven_total


def _pct(change, base):
    return 100.0 * change / base if base != 0 else float("nan")


def _rows(after: EquilibriumOutcome, base: EquilibriumOutcome) -> tuple:
    d_shift = after.shifted_profits_total - base.shifted_profits_total
    rows = (
        GroupRow(
            group="nonhaven",
            schedule=(after.nonhaven.small_rate, after.nonhaven.large_rate),
            welfare_change=after.welfare_nonhaven - base.welfare_nonhaven,
            welfare_change_pct=_pct(after.welfare_nonhaven - base.welfare_nonhaven,
                                    base.welfare_nonhaven),
            revenue_change=after.revenue_nonhaven - base.revenue_nonhaven,
            revenue_change_pct=_pct(after.revenue_nonhaven - base.revenue_nonhaven,
                                    base.revenue_nonhaven),
            profit_change=-d_shift,
            profit_change_pct=_pct(-d_shift, base.shifted_profits_total),
        ),
        GroupRow(
            group="haven",
            schedule=(after.haven.small_rate, after.haven.large_rate),
            welfare_change=after.welfare_haven_total - base.welfare_haven_total,
            welfare_change_pct=_pct(after.welfare_haven_total - base.welfare_haven_total,
                                    base.welfare_haven_total),
            revenue_change=after.revenue_haven_total - base.revenue_haven_total,
            revenue_change_pct=_pct(after.revenue_haven_total - base.revenue_haven_total,
                                    base.revenue_haven_total),
            profit_change=d_shift,
            profit_change_pct=_pct(d_shift, base.shifted_profits_total),
        ),
        GroupRow(
            group="world",
            schedule=None,
            welfare_change=after.welfare_world - base.welfare_world,
            welfare_change_pct=_pct(after.welfare_world - base.welfare_world,
                                    base.welfare_world),
            revenue_change=_world_revenue(after) - _world_revenue(base),
            revenue_change_pct=_pct(_world_revenue(after) - _world_revenue(base),
                                    _world_revenue(base)),
            profit_change=0.0,
            profit_change_pct=0.0,
        ),
    )
    for field in ("welfare_change", "revenue_change", "profit_change"):
        total = getattr(rows[0], field) + getattr(rows[1], field)
        if abs(total - getattr(rows[2], field)) > 1e-6:
            raise AssertionError(
                f"group additivity violated for {field}: "
                f"{total} vs {getattr(rows[2], field)}")
    return rows


def _with_coverage(params, coverage):
    if isinstance(params, RealResponseParams):
        return RealResponseParams(params.mvpf, params.shifting_cost, params.havens,
                                  coverage, params.baseline_profits,
                                  params.profit_response)
    return params.with_coverage(coverage)


def build_reform_report(params, t_m: float, variant: str = "baseline",
                        selection: str = "commit",
                        compliance_cost: float | None = None,
                        coverage: float | None = None,
                        scenario: str | None = None) -> ReformReport:
    """Reform deltas against the no-floor benchmark of the same variant.

    ``coverage`` overrides the coverage in ``params``; when it differs, the
    report also carries the gap against the same reform at the params' own
    coverage (net of the compliance cost, when one is given).
    """
    if variant not in VARIANTS:
        raise DomainError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if selection not in ("commit", "split"):
        raise DomainError(
            f"reform reports need a single equilibrium; selection must be "
            f"commit or split, got {selection!r}")
    base_coverage = params.coverage
    run_params = _with_coverage(params, coverage) if coverage is not None else params
    after = _solve(t_m, run_params, variant, selection)
    base = _benchmark(run_params, variant)
    rows = _rows(after, base)

    report_kwargs = {}
    if compliance_cost is not None:
        world = rows[2]
        report_kwargs.update(
            compliance_cost=compliance_cost,
            net_world_revenue_change=world.revenue_change - compliance_cost,
            net_world_welfare_change=world.welfare_change - compliance_cost,
        )
    if coverage is not None and coverage != base_coverage:
        ref_after = _solve(t_m, params, variant, selection)
        ref_base = _benchmark(params, variant)
        ref_rows = _rows(ref_after, ref_base)
        comparison = {
            "base_coverage": base_coverage,
            "world_revenue_gap": rows[2].revenue_change - ref_rows[2].revenue_change,
            "world_welfare_gap": rows[2].welfare_change - ref_rows[2].welfare_change,
        }
        if compliance_cost is not None:
            comparison["net_world_revenue_gap"] = (
                comparison["world_revenue_gap"] - compliance_cost)
            comparison["net_world_welfare_gap"] = (
                comparison["world_welfare_gap"] - compliance_cost)
        report_kwargs["coverage_comparison"] = comparison

    return ReformReport(
        scenario=scenario or f"tm{t_m:g}_phi{run_params.coverage:g}_{variant}",
        variant=variant,
        t_m=t_m,
        coverage=run_params.coverage,
        regime=after.regime.value,
        rows=rows,
        **report_kwargs,
    )


SWEEP_COLUMNS = ("t_M", "regime", "t_n_small", "t_n_large", "t_h_small",
                 "t_h_large", "G_n_over_lambda", "G_h_total_over_lambda",
                 "shifted_profits")


@dataclass(frozen=True)
class SweepDataset:
    """Equilibrium path over a floor-rate grid at one coverage level."""

    coverage: float
    variant: str
    rows: tuple  # tuples ordered as SWEEP_COLUMNS

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(SWEEP_COLUMNS) + "\n")
        for row in self.rows:
            buf.write(",".join(
                value if isinstance(value, str) else repr(float(value))
                for value in row) + "\n")
        return buf.getvalue()


def build_sweep(params, t_m_start: float, t_m_stop: float, step: float,
                variant: str = "baseline", selection: str = "commit") -> SweepDataset:
    """One row per floor-rate grid point; regimes stay contiguous by construction."""
    if step <= 0:
        raise DomainError(f"sweep step must be positive, got {step}")
    if not 0 <= t_m_start <= t_m_stop <= 1:
        raise DomainError(
            f"sweep range must satisfy 0 <= start <= stop <= 1, "
            f"got [{t_m_start}, {t_m_stop}]")
    grid = np.arange(t_m_start, t_m_stop + step / 2.0, step)
    rows = []
    for t in grid:
        out = _solve(float(t), params, variant, selection)
        rows.append((
            float(t), out.regime.value,
            out.nonhaven.small_rate, out.nonhaven.large_rate,
            out.haven.small_rate, out.haven.large_rate,
            out.welfare_nonhaven, out.welfare_haven_total,
            out.shifted_profits_total,
        ))
    return SweepDataset(coverage=params.coverage, variant=variant, rows=tuple(rows))
