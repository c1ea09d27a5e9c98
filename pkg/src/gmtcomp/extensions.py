"""Model extensions: decentralised haven choices and tax-dependent profits.

Decentralised commitment: each haven decides alone whether to pledge a single
floor-level rate, given how many rivals do. The commitment gain is linear in
the number of committers, which yields two closed-form switching rates t_m_a
(below it, committing is dominant) and t_m_b (above it, splitting is
dominant) with a multiplicity band in between.

Real responses: a firm's pre-tax profit shrinks with the non-haven rate,
profit = baseline / (1 + rate) by default (a linear law 1 - rate and a
no-response law are selectable). Equilibria are then found numerically by
damped best-response iteration with golden-section inner maximization; the
same first-stage comparisons as the grid oracle pick the commitment
structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import haven_segment_values, nonhaven_segment_values
from .equilibrium import (
    EquilibriumOutcome,
    Regime,
    outcome_from_schedules,
    regime_schedules,
    regime_thresholds,
)
from .errors import ConvergenceError, DomainError
from .model import ModelParams, TaxSchedule

__all__ = [
    "DecentralisedThresholds",
    "decentralised_thresholds",
    "commitment_gain",
    "decentralised_equilibrium",
    "RealResponseParams",
    "RealResponseRegime0Diagnostics",
    "real_response_regime0",
    "real_response_regime0_diagnostics",
    "real_response_equilibrium",
    "real_response_thresholds",
    "RealResponseThresholds",
]


# ---------------------------------------------------------------------------
# Decentralised commitment decisions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecentralisedThresholds:
    """Switching rates and linear-form coefficients of the commitment game.

    The gain from committing has sign A*h_m + B for h_m committers; A and B
    depend on the floor rate while C..F do not: the dominance bounds are
    t_m_a = C/D and t_m_b = E/F, and A stays positive below t_m_c.
    """

    t_m_a: float
    t_m_b: float
    t_m_c: float
    A: float
    B: float
    C: float
    D: float
    E: float
    F: float


def _check_decentralised_domain(t_m: float, params: ModelParams):
    thr = regime_thresholds(params)
    if not thr.t_m0 <= t_m <= thr.t_m2:
        raise DomainError(
            f"decentralised analysis needs t_m in [{thr.t_m0}, {thr.t_m2}], got {t_m}")
    return thr


def decentralised_thresholds(t_m: float, params: ModelParams) -> DecentralisedThresholds:
    """Coefficients A-F and the switching rates of the decentralised game."""
    thr = _check_decentralised_domain(t_m, params)
    lam, delta, H = params.mvpf, params.shifting_cost, params.havens
    phi = params.coverage

    x = delta * (lam - 1.0) - t_m * (H * (3.0 * lam - 1.0) - 2.0 * (lam - 1.0))
    A = (lam - 1.0) * (1.0 - phi) * x
    B = (H * (phi * (lam - 1.0) + 3.0 * lam - 1.0) * x
         - 2.0 * t_m * (lam - 1.0) ** 2 * (1.0 - phi))
    C = delta * (lam - 1.0) * (phi * (lam - 1.0) * (H - 1.0)
                               + lam * (3.0 * H + 1.0) - (H + 1.0))
    D = (H * phi * (lam - 1.0) * (lam * (3.0 * H - 5.0) - (H - 3.0))
         + H * (3.0 * lam - 1.0) * (lam * (3.0 * H - 1.0) - (H - 1.0)))
    E = delta * H * (2.0 * lam - 1.0) * (lam - 1.0)
    F = ((6.0 * H**2 - 4.0 * H + 1.0) * lam**2
         - (5.0 * H**2 - 6.0 * H + 2.0) * lam
         + (H - 1.0) ** 2 - phi * (lam - 1.0) ** 2)
    t_m_a = C / D
    t_m_b = E / F
    t_m_c = delta * (lam - 1.0) / (H * (3.0 * lam - 1.0) - 2.0 * (lam - 1.0))

    if params.havens > 1:
        ordered = thr.t_m0 < t_m_a < t_m_b < thr.t_m1 and t_m_b < t_m_c
    else:
        # a single haven's decentralised and collective problems coincide
        ordered = thr.t_m0 < t_m_a <= t_m_b <= thr.t_m1 and t_m_b <= t_m_c
    if not ordered:
        from .errors import ConsistencyError
        raise ConsistencyError(
            f"decentralised threshold chain violated: t_m0={thr.t_m0}, "
            f"t_m_a={t_m_a}, t_m_b={t_m_b}, t_m1={thr.t_m1}, t_m_c={t_m_c}")
    return DecentralisedThresholds(t_m_a, t_m_b, t_m_c, A, B, C, D, E, F)


def _nonhaven_rate_given_committers(k: int, t_m: float, params: ModelParams) -> float:
    """Non-haven's interior uniform rate when k havens commit and H-k split."""
    lam, delta, H = params.mvpf, params.shifting_cost, params.havens
    phi = params.coverage
    num = 2.0 * (lam - 1.0) * (t_m * (phi * H + k * (1.0 - phi)) + delta)
    den = (lam - 1.0) * (phi * (H - k) + H + k) + 2.0 * H * lam
    return num / den


def commitment_gain(h_m: int, t_m: float, params: ModelParams) -> float:
    """Payoff advantage of committing for a haven expecting ``h_m`` committers.

    Difference between its payoff committed (with h_m - 1 fellow committers)
    and split (with the same h_m - 1 others still committed). Raw objective
    units, billion USD.
    """
    if not 1 <= h_m <= params.havens:
        raise DomainError(f"h_m must lie in [1, {params.havens}], got {h_m}")
    _check_decentralised_domain(t_m, params)
    lam, delta = params.mvpf, params.shifting_cost
    phi, Pi = params.coverage, params.total_profits

    t_n_commit = _nonhaven_rate_given_committers(h_m, t_m, params)
    gain_commit = t_m * max(0.0, t_n_commit - t_m) / delta

    t_n_split = _nonhaven_rate_given_committers(h_m - 1, t_m, params)
    small = t_n_split / 2.0
    gain_split = ((1.0 - phi) * small * (t_n_split - small) / delta
                  + phi * t_m * max(0.0, t_n_split - t_m) / delta)
    return lam * Pi * (gain_commit - gain_split)


@dataclass(frozen=True)
class InteriorCommitmentOutcome:
    """Mixed first-stage outcome: some havens commit, the rest split."""

    committed_count: int
    nonhaven: TaxSchedule
    committed: TaxSchedule
    splitting: TaxSchedule


def decentralised_equilibrium(t_m: float, params: ModelParams,
                              selection: str = "commit"):
    """Equilibrium under decentralised haven decisions.

    Below t_m_a all havens commit (uniform-at-floor schedules as in R1);
    above t_m_b all split (R2 schedules). In the multiplicity band the
    ``selection`` rule decides: ``commit`` (default, the treatment behind the
    headline reform numbers — the switch effectively happens at t_m_b),
    ``split``, or ``all`` to get every belief-consistent equilibrium.
    """
    if selection not in ("commit", "split", "all"):
        raise DomainError(f"selection must be commit|split|all, got {selection!r}")
    if params.coverage == 1.0:
        # commitment gains carry a (1 - coverage) factor: havens are
        # indifferent and the committed outcome is the full-coverage one
        from .equilibrium import equilibrium as _closed_equilibrium
        outcome = _closed_equilibrium(t_m, params)
        return [outcome] if selection == "all" else outcome

    thr = decentralised_thresholds(t_m, params)

    def regime_outcome(regime):
        nonhaven, haven = regime_schedules(regime, t_m, params)
        return outcome_from_schedules(regime, nonhaven, haven, params)

    if t_m <= thr.t_m_a:
        chosen = [regime_outcome(Regime.R1)]
    elif t_m > thr.t_m_b:
        chosen = [regime_outcome(Regime.R2)]
    else:
        if selection == "commit":
            chosen = [regime_outcome(Regime.R1)]
        elif selection == "split":
            chosen = [regime_outcome(Regime.R2)]
        else:
            chosen = [regime_outcome(Regime.R1), regime_outcome(Regime.R2)]
            for h_m in range(1, params.havens + 1):
                if abs(commitment_gain(h_m, t_m, params)) < 1e-9 * params.total_profits:
                    t_n = _nonhaven_rate_given_committers(h_m, t_m, params)
                    chosen.append(InteriorCommitmentOutcome(
                        committed_count=h_m,
                        nonhaven=TaxSchedule.uniform(t_n),
                        committed=TaxSchedule.uniform(t_m),
                        splitting=TaxSchedule(t_n / 2.0, t_m)))
    return chosen if selection == "all" else chosen[0]


# ---------------------------------------------------------------------------
# Real responses of profits to taxes
# ---------------------------------------------------------------------------

_PROFIT_LAWS = {
    "inverse": lambda t: 1.0 / (1.0 + t),
    "linear": lambda t: 1.0 - t,
    "none": lambda t: 1.0,
}


@dataclass(frozen=True)
class RealResponseParams:
    """Parameters of the variant where pre-tax profits react to the tax rate.

    baseline_profits is aggregate profit at a zero non-haven rate; realized
    profit scales by 1/(1 + rate) under the default ``inverse`` law, by
    (1 - rate) under ``linear``, and not at all under ``none``.
    """

    mvpf: float
    shifting_cost: float
    havens: int
    coverage: float
    baseline_profits: float
    profit_response: str = "inverse"

    def __post_init__(self):
        if self.profit_response not in _PROFIT_LAWS:
            raise DomainError(
                f"profit_response must be one of {sorted(_PROFIT_LAWS)}, "
                f"got {self.profit_response!r}")
        if self.baseline_profits <= 0 or not math.isfinite(self.baseline_profits):
            raise DomainError(
                f"baseline_profits must be positive, got {self.baseline_profits}")
        # reuse the core admissibility checks
        ModelParams(self.mvpf, self.shifting_cost, self.havens, self.coverage, 1.0)

    def scale(self, t_n: float) -> float:
        return _PROFIT_LAWS[self.profit_response](t_n)

    def unit_params(self) -> ModelParams:
        return ModelParams(self.mvpf, self.shifting_cost, self.havens,
                           self.coverage, 1.0)


_INV_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(fvec, lo: float, hi: float, tol: float = 1e-10,
                       presamples: int = 33) -> float:
    """Maximize a unimodal-on-a-bump objective on [lo, hi].

    ``fvec`` maps a candidate array to a value array. A coarse presample
    brackets the peak first; haven revenue curves are flat zero over most of
    [0, 1], which defeats plain bracket-free golden section.
    """
    if hi - lo <= tol:
        return 0.5 * (lo + hi)
    xs = np.linspace(lo, hi, presamples)
    i = int(np.argmax(fvec(xs)))
    a = xs[max(0, i - 1)]
    b = xs[min(presamples - 1, i + 1)]
    c = b - _INV_GOLD * (b - a)
    d = a + _INV_GOLD * (b - a)
    fc = float(fvec(np.array([c]))[0])
    fd = float(fvec(np.array([d]))[0])
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLD * (b - a)
            fc = float(fvec(np.array([c]))[0])
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLD * (b - a)
            fd = float(fvec(np.array([d]))[0])
    return 0.5 * (a + b)


class _RealResponseSolver:
    """Damped best-response iteration for one commitment structure."""

    def __init__(self, params: RealResponseParams, t_m: float,
                 nonhaven_uniform: bool, havens_split: bool,
                 rate_tol: float = 1e-10, damping: float = 0.5,
                 max_iters: int = 2000):
        self.p = params
        self.t_m = t_m
        self.nonhaven_uniform = nonhaven_uniform
        self.havens_split = havens_split
        self.rate_tol = rate_tol
        self.damping = damping
        self.max_iters = max_iters

    def solve(self):
        p = self.p
        t_m = self.t_m
        w_s, w_l = 1.0 - p.coverage, p.coverage
        H, delta = float(p.havens), p.shifting_cost
        gtol = self.rate_tol / 10.0
        state = [max(t_m, 0.3), max(t_m, 0.3), max(t_m, 0.15), max(t_m, 0.15)]

        for it in range(self.max_iters):
            tn_s, tn_l, th_s, th_l = state
            target = list(state)

            def g_seg(cands, th, lam=p.mvpf):
                return nonhaven_segment_values(cands, th, H, 0.0, 0.0, lam, delta)

            if self.nonhaven_uniform:
                def obj(cands):
                    return (w_s * g_seg(cands, th_s)
                            + w_l * g_seg(cands, th_l)) * p.scale(cands)
                target[0] = target[1] = golden_section_max(obj, t_m, 1.0, gtol)
            else:
                target[0] = golden_section_max(
                    lambda c: g_seg(c, th_s) * p.scale(c), 0.0, 1.0, gtol)
                target[1] = golden_section_max(
                    lambda c: g_seg(c, th_l) * p.scale(c), t_m, 1.0, gtol)

            def h_seg(cands, t_n, th_cur):
                return haven_segment_values(cands, t_n, th_cur, H - 1.0, 0.0, 0.0, delta)

            if self.havens_split:
                target[2] = golden_section_max(
                    lambda c: h_seg(c, target[0], th_s), 0.0, 1.0, gtol)
                target[3] = golden_section_max(
                    lambda c: h_seg(c, target[1], th_l), t_m, 1.0, gtol)
            else:
                def obj_h(cands):
                    return (w_s * p.scale(target[0]) * h_seg(cands, target[0], th_s)
                            + w_l * p.scale(target[1]) * h_seg(cands, target[1], th_l))
                u = golden_section_max(obj_h, t_m, 1.0, gtol)
                target[2] = target[3] = u

            move = max(abs(t - s) for t, s in zip(target, state))
            state = [s + self.damping * (t - s) for s, t in zip(state, target)]
            if move <= self.rate_tol:
                return tuple(state), it + 1
        raise ConvergenceError("real-response stage-2 iteration did not converge",
                               last_state=tuple(state), iterations=self.max_iters)


def _rr_outcome(regime: Regime, rates, params: RealResponseParams) -> EquilibriumOutcome:
    tn_s, tn_l, th_s, th_l = rates
    from .model import _segment_terms  # shared per-unit pieces

    unit = params.unit_params()
    lam, H = params.mvpf, float(params.havens)
    g_n = rev_n = rev_h = shifted = 0.0
    thetas = []
    for (tn, th, w) in ((tn_s, th_s, 1.0 - params.coverage),
                        (tn_l, th_l, params.coverage)):
        pi_seg = w * params.baseline_profits * params.scale(tn)
        private, revenue_n, revenue_h_total, theta = _segment_terms(tn, th, unit)
        g_n += pi_seg * (private + lam * revenue_n)
        rev_n += pi_seg * revenue_n
        rev_h += pi_seg * revenue_h_total
        shifted += pi_seg * H * theta
        thetas.append(theta)
    return EquilibriumOutcome(
        regime=regime,
        nonhaven=TaxSchedule(tn_s, tn_l),
        haven=TaxSchedule(th_s, th_l),
        theta_small=thetas[0],
        theta_large=thetas[1],
        shifted_profits_total=shifted,
        welfare_nonhaven=g_n / lam,
        welfare_haven_total=rev_h,
        welfare_world=g_n / lam + rev_h,
        revenue_nonhaven=rev_n,
        revenue_haven_total=rev_h,
    )


def _haven_total_payoff(outcome: EquilibriumOutcome) -> float:
    return outcome.welfare_haven_total


def real_response_regime0(params: RealResponseParams) -> EquilibriumOutcome:
    """Unconstrained equilibrium when profits react to the non-haven rate."""
    solver = _RealResponseSolver(params, 0.0, nonhaven_uniform=True, havens_split=True)
    rates, _ = solver.solve()
    return _rr_outcome(Regime.R0, rates, params)


@dataclass(frozen=True)
class RealResponseRegime0Diagnostics:
    """Solver rate versus the printed closed form for the unconstrained rate.

    The closed form, evaluated as published, does not reproduce the solver's
    first-order condition; the residual is reported so downstream output can
    carry the conformance note instead of silently preferring either number.
    """

    solver_rate: float
    closed_form_rate: float
    residual: float


def real_response_regime0_diagnostics(params: RealResponseParams) -> RealResponseRegime0Diagnostics:
    if params.profit_response != "inverse":
        raise DomainError("the published closed form covers the inverse law only")
    lam, delta, H = params.mvpf, params.shifting_cost, params.havens
    inner = H * ((16.0 * delta + 9.0 * H) * lam**2
                 - (38.0 * delta - 6.0 * H) * lam
                 + 12.0 * delta + H)
    closed = 2.0 * (math.sqrt(inner) - H * (3.0 * lam - 1.0)) / (H * (8.0 * lam - 3.0))
    solver_rate = real_response_regime0(params).nonhaven.small_rate
    return RealResponseRegime0Diagnostics(solver_rate, closed, closed - solver_rate)


def real_response_equilibrium(t_m: float, params: RealResponseParams) -> EquilibriumOutcome:
    """Equilibrium outcome at floor rate ``t_m`` with tax-dependent profits.

    Stage-2 fixed points are computed per commitment cell; the first-stage
    selection mirrors the baseline game: havens commit while that pays,
    the non-haven commits once the floor pins its uniform rate, ties to the
    committing side.
    """
    if not 0 <= t_m <= 1:
        raise DomainError(f"t_m must lie in [0, 1], got {t_m}")
    interior_tol = 1e-7

    def cell(nonhaven_uniform, havens_split):
        solver = _RealResponseSolver(params, t_m, nonhaven_uniform, havens_split)
        rates, _ = solver.solve()
        return rates

    rates_us = cell(True, True)
    if rates_us[1] > t_m + interior_tol:
        rates_uu = cell(True, False)
        out_uu = _rr_outcome(Regime.R1, rates_uu, params)
        out_us = _rr_outcome(Regime.R2, rates_us, params)
        if _haven_total_payoff(out_uu) >= _haven_total_payoff(out_us):
            regime = Regime.R0 if rates_uu[2] > t_m + interior_tol else Regime.R1
            outcome = _rr_outcome(regime, rates_uu, params)
        else:
            outcome = out_us
    else:
        rates_ss = cell(False, True)
        out_us = _rr_outcome(Regime.R3, rates_us, params)
        out_ss = _rr_outcome(Regime.R4, rates_ss, params)
        outcome = out_us if out_us.welfare_nonhaven >= out_ss.welfare_nonhaven else out_ss

    if params.coverage == 1.0 and outcome.regime is not Regime.R0:
        remap = {Regime.R1: Regime.R1F, Regime.R2: Regime.R1F,
                 Regime.R3: Regime.R2F, Regime.R4: Regime.R2F}
        uniform = TaxSchedule.uniform(outcome.haven.large_rate)
        rates = (outcome.nonhaven.small_rate, outcome.nonhaven.large_rate,
                 uniform.small_rate, uniform.large_rate)
        outcome = _rr_outcome(remap[outcome.regime], rates, params)
    return outcome


@dataclass(frozen=True)
class RealResponseThresholds:
    """Regime-switching floor rates under tax-dependent profits.

    Located by bisection on the same payoff comparisons that define the
    regimes; t_m3 is None when the non-haven never abandons its commitment
    below a 100% floor.
    """

    t_m0: float
    t_m1: float
    t_m2: float
    t_m3: float | None


def real_response_thresholds(params: RealResponseParams,
                             xtol: float = 1e-9) -> RealResponseThresholds:
    from scipy.optimize import brentq

    base = real_response_regime0(params)
    t_m0 = base.haven.small_rate

    def nonhaven_slack(t_m):
        solver = _RealResponseSolver(params, t_m, True, True)
        rates, _ = solver.solve()
        return rates[0] - t_m

    t_m2 = brentq(nonhaven_slack, t_m0, 1.0, xtol=xtol)

    def commit_gap(t_m):
        uu = _RealResponseSolver(params, t_m, True, False).solve()[0]
        us = _RealResponseSolver(params, t_m, True, True).solve()[0]
        return (_haven_total_payoff(_rr_outcome(Regime.R1, uu, params))
                - _haven_total_payoff(_rr_outcome(Regime.R2, us, params)))

    t_m1 = brentq(commit_gap, t_m0 * (1.0 + 1e-6), t_m2 * (1.0 - 1e-6), xtol=xtol)

    def nonhaven_commit_gap(t_m):
        us = _RealResponseSolver(params, t_m, True, True).solve()[0]
        ss = _RealResponseSolver(params, t_m, False, True).solve()[0]
        return (_rr_outcome(Regime.R3, us, params).welfare_nonhaven
                - _rr_outcome(Regime.R4, ss, params).welfare_nonhaven)

    hi = 1.0
    t_m3 = None
    if nonhaven_commit_gap(hi) < 0:
        t_m3 = brentq(nonhaven_commit_gap, t_m2 * (1.0 + 1e-6), hi, xtol=xtol)
    return RealResponseThresholds(t_m0, t_m1, t_m2, t_m3)
