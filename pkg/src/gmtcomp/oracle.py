"""Brute-force solver of the full three-stage tax game on a discretized grid.

Ground truth for every closed form in :mod:`gmtcomp.equilibrium`: last-stage
shifting is analytic (inside the payoff kernels), second-stage Nash rates come
from iterated best responses over a rate grid, and the first-stage commitment
structure is picked by exhaustive payoff comparison — the collective-haven
uniform-vs-split check and, past the point where the non-haven is pinned to
the floor, the non-haven's own uniform-vs-split check. A decentralised
variant lets each haven decide alone given how many rivals commit.

Nothing here touches the closed-form schedules; agreement between the two
routes is asserted by the conformance suite.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ._backend import haven_segment_values, nonhaven_segment_values
from .equilibrium import EquilibriumOutcome, Regime, outcome_from_schedules
from .errors import ConvergenceError, DomainError
from .model import ModelParams, TaxSchedule

__all__ = [
    "GridSpec",
    "CommitmentProfile",
    "Stage2Result",
    "stage2_nash",
    "cell_payoffs",
    "stage1_spe",
    "DecentralisedEquilibriumSet",
    "stage1_decentralised",
]


@dataclass(frozen=True)
class GridSpec:
    """Discretization and iteration budget for the grid solver.

    step           rate grid granularity.
    max_iters      best-response sweeps before giving up.
    damping        update weight on the new best response, in (0, 1].
    refine_passes  extra local-refinement rounds after coarse convergence;
                   each shrinks the effective step by ~100x.
    """

    step: float = 1e-4
    max_iters: int = 10_000
    damping: float = 1.0
    refine_passes: int = 0

    def __post_init__(self):
        if not self.step > 0:
            raise DomainError(f"grid step must be positive, got {self.step}")
        if self.max_iters < 1:
            raise DomainError(f"max_iters must be >= 1, got {self.max_iters}")
        if not 0 < self.damping <= 1:
            raise DomainError(f"damping must lie in (0, 1], got {self.damping}")


@dataclass(frozen=True)
class CommitmentProfile:
    """First-stage structure: who pledged a single uniform rate.

    nonhaven_committed        non-haven sets one rate for all firms (at or
                              above the floor); otherwise it splits.
    havens_committed_count    how many of the symmetric havens committed.
    """

    nonhaven_committed: bool
    havens_committed_count: int


@dataclass(frozen=True)
class Stage2Result:
    """Fixed point of the second-stage rate game for one commitment profile."""

    nonhaven: TaxSchedule
    committed_rate: float | None
    splitting: TaxSchedule | None
    iterations: int


def _candidates(lo: float, hi: float, step: float) -> np.ndarray:
    """Ascending candidate rates on [lo, hi], lo included exactly."""
    n = int(np.floor((hi - lo) / step))
    grid = lo + step * np.arange(n + 1)
    if grid[-1] < hi - 1e-15:
        grid = np.append(grid, hi)
    return grid


def _argmax(cands: np.ndarray, values: np.ndarray) -> float:
    # first index on ties -> lowest rate, which keeps corner solutions at the floor
    return float(cands[int(np.argmax(values))])


class _CellSolver:
    """Best-response machinery for one commitment profile."""

    def __init__(self, profile: CommitmentProfile, t_m: float,
                 params: ModelParams, grid: GridSpec):
        H = params.havens
        if not 0 <= profile.havens_committed_count <= H:
            raise DomainError(
                f"havens_committed_count must lie in [0, {H}], "
                f"got {profile.havens_committed_count}"
            )
        self.profile = profile
        self.t_m = t_m
        self.params = params
        self.grid = grid
        self.k = profile.havens_committed_count
        self.m = H - self.k
        self.w_small = 1.0 - params.coverage
        self.w_large = params.coverage

    # state vector: (tn_s, tn_l, u, bs, bl); u is the committed havens' rate,
    # (bs, bl) the splitting havens' schedule. Unused entries stay at t_m.

    def default_start(self):
        t_m = self.t_m
        return (max(t_m, 0.5), max(t_m, 0.5),
                max(t_m, 0.25), max(t_m, 0.25), max(t_m, 0.25))

    def _nonhaven_value(self, cands, state, segment):
        u, bs, bl = state[2], state[3], state[4]
        b = bs if segment == 0 else bl
        return nonhaven_segment_values(cands, u, float(self.k), b, float(self.m),
                                       self.params.mvpf, self.params.shifting_cost)

    def best_responses(self, state, windows=None):
        """One Jacobi sweep: every player's grid best response to ``state``."""
        step = self.grid.step
        t_m = self.t_m
        delta = self.params.shifting_cost
        tn_s, tn_l, u, bs, bl = state

        def window(idx, lo):
            if windows is None:
                return lo, 1.0
            w = windows[idx]
            return max(lo, state[idx] - w), min(1.0, state[idx] + w)

        new = list(state)
        if self.profile.nonhaven_committed:
            lo, hi = window(0, t_m)
            cands = _candidates(lo, hi, step)
            vals = (self.w_small * self._nonhaven_value(cands, state, 0)
                    + self.w_large * self._nonhaven_value(cands, state, 1))
            best = _argmax(cands, vals)
            new[0] = new[1] = best
        else:
            lo, hi = window(0, 0.0)
            cands = _candidates(lo, hi, step)
            new[0] = _argmax(cands, self._nonhaven_value(cands, state, 0))
            lo, hi = window(1, t_m)
            cands = _candidates(lo, hi, step)
            new[1] = _argmax(cands, self._nonhaven_value(cands, state, 1))

        if self.k > 0:
            lo, hi = window(2, t_m)
            cands = _candidates(lo, hi, step)
            vals = (self.w_small * haven_segment_values(
                        cands, tn_s, u, float(self.k - 1), bs, float(self.m), delta)
                    + self.w_large * haven_segment_values(
                        cands, tn_l, u, float(self.k - 1), bl, float(self.m), delta))
            new[2] = _argmax(cands, vals)
        if self.m > 0:
            lo, hi = window(3, 0.0)
            cands = _candidates(lo, hi, step)
            new[3] = _argmax(cands, haven_segment_values(
                cands, tn_s, u, float(self.k), bs, float(self.m - 1), delta))
            lo, hi = window(4, t_m)
            cands = _candidates(lo, hi, step)
            new[4] = _argmax(cands, haven_segment_values(
                cands, tn_l, u, float(self.k), bl, float(self.m - 1), delta))
        return tuple(new)

    def solve(self, start=None):
        state = tuple(start) if start is not None else self.default_start()
        damping = self.grid.damping
        step = self.grid.step
        iterations = 0
        for _ in range(self.grid.max_iters):
            target = self.best_responses(state)
            iterations += 1
            move = max(abs(t - s) for t, s in zip(target, state))
            state = tuple(s + damping * (t - s) for s, t in zip(state, target))
            if move <= step + 1e-12:
                break
        else:
            raise ConvergenceError(
                f"stage-2 iteration did not settle within {self.grid.max_iters} sweeps",
                last_state=state, iterations=iterations)

        window = 2.0 * step
        for _ in range(self.grid.refine_passes):
            local = replace(self.grid, step=window / 100.0)
            solver = _CellSolver(self.profile, self.t_m, self.params, local)
            for _ in range(local.max_iters):
                target = solver.best_responses(state, windows=[window] * 5)
                iterations += 1
                move = max(abs(t - s) for t, s in zip(target, state))
                state = tuple(s + damping * (t - s) for s, t in zip(state, target))
                if move <= local.step + 1e-15:
                    break
            window /= 50.0
        return state, iterations


def stage2_nash(profile: CommitmentProfile, t_m: float, params: ModelParams,
                grid: GridSpec = GridSpec(), start=None) -> Stage2Result:
    """Second-stage Nash rates for a given commitment profile.

    Iterates grid best responses until no player moves by more than one step.
    Raises :class:`ConvergenceError` (carrying the last rate profile) if the
    iteration budget runs out.
    """
    solver = _CellSolver(profile, t_m, params, grid)
    state, iterations = solver.solve(start)
    tn_s, tn_l, u, bs, bl = state
    nonhaven = TaxSchedule(tn_s, tn_l)
    committed = u if solver.k > 0 else None
    splitting = TaxSchedule(bs, bl) if solver.m > 0 else None
    return Stage2Result(nonhaven, committed, splitting, iterations)


def cell_payoffs(result: Stage2Result, profile: CommitmentProfile,
                 params: ModelParams) -> dict:
    """Raw objective levels at a stage-2 fixed point.

    Returns non-haven welfare plus the committed and splitting per-haven
    payoffs (None when the class is empty), all mvpf-weighted as in the
    underlying objectives.
    """
    k = profile.havens_committed_count
    m = params.havens - k
    lam, delta, Pi = params.mvpf, params.shifting_cost, params.total_profits
    w = (1.0 - params.coverage, params.coverage)
    tn = (result.nonhaven.small_rate, result.nonhaven.large_rate)
    u = result.committed_rate if k > 0 else 0.0
    b = ((result.splitting.small_rate, result.splitting.large_rate)
         if m > 0 else (0.0, 0.0))

    g_n = 0.0
    g_committed = 0.0
    g_split = 0.0
    for seg in (0, 1):
        one = np.array([tn[seg]])
        g_n += w[seg] * float(nonhaven_segment_values(
            one, u, float(k), b[seg], float(m), lam, delta)[0])
        if k > 0:
            g_committed += w[seg] * float(haven_segment_values(
                np.array([u]), tn[seg], u, float(k - 1), b[seg], float(m), delta)[0])
        if m > 0:
            g_split += w[seg] * float(haven_segment_values(
                np.array([b[seg]]), tn[seg], u, float(k), b[seg], float(m - 1), delta)[0])
    return {
        "nonhaven": g_n * Pi,
        "haven_committed": lam * g_committed * Pi if k > 0 else None,
        "haven_splitting": lam * g_split * Pi if m > 0 else None,
    }


def _outcome_from_cell(regime: Regime, result: Stage2Result, haven_uniform: bool,
                       params: ModelParams) -> EquilibriumOutcome:
    if haven_uniform:
        haven = TaxSchedule.uniform(result.committed_rate)
    else:
        haven = result.splitting
    return outcome_from_schedules(regime, result.nonhaven, haven, params)


def stage1_spe(t_m: float, params: ModelParams,
               grid: GridSpec = GridSpec()) -> EquilibriumOutcome:
    """Subgame-perfect outcome of the full game at floor rate ``t_m``.

    Solves the relevant commitment cells and applies the deviation checks:
    while the non-haven's uniform rate stays interior the havens choose
    between committing and splitting; once the floor pins the non-haven, the
    non-haven chooses between committing and splitting against split havens.
    Ties go to the committing side.
    """
    if not 0 <= t_m <= 1:
        raise DomainError(f"t_m must lie in [0, 1], got {t_m}")
    H = params.havens
    half_step = grid.step / 2.0

    cell_us = stage2_nash(CommitmentProfile(True, 0), t_m, params, grid)
    nonhaven_interior = cell_us.nonhaven.large_rate > t_m + half_step

    if nonhaven_interior:
        cell_uu = stage2_nash(CommitmentProfile(True, H), t_m, params, grid)
        pay_uu = cell_payoffs(cell_uu, CommitmentProfile(True, H), params)
        pay_us = cell_payoffs(cell_us, CommitmentProfile(True, 0), params)
        if pay_uu["haven_committed"] >= pay_us["haven_splitting"]:
            haven_interior = cell_uu.committed_rate > t_m + half_step
            regime = Regime.R0 if haven_interior else Regime.R1
            outcome = _outcome_from_cell(regime, cell_uu, True, params)
        else:
            outcome = _outcome_from_cell(Regime.R2, cell_us, False, params)
    else:
        cell_ss = stage2_nash(CommitmentProfile(False, 0), t_m, params, grid)
        pay_us = cell_payoffs(cell_us, CommitmentProfile(True, 0), params)
        pay_ss = cell_payoffs(cell_ss, CommitmentProfile(False, 0), params)
        if pay_us["nonhaven"] >= pay_ss["nonhaven"]:
            outcome = _outcome_from_cell(Regime.R3, cell_us, False, params)
        else:
            outcome = _outcome_from_cell(Regime.R4, cell_ss, False, params)

    if params.coverage == 1.0:
        # the split/uniform distinction is weightless at full coverage
        remap = {Regime.R1: Regime.R1F, Regime.R2: Regime.R1F,
                 Regime.R3: Regime.R2F, Regime.R4: Regime.R2F}
        if outcome.regime in remap:
            outcome = outcome_from_schedules(
                remap[outcome.regime], outcome.nonhaven,
                TaxSchedule.uniform(outcome.haven.large_rate), params)
    return outcome


@dataclass(frozen=True)
class DecentralisedEquilibriumSet:
    """All belief-consistent first-stage outcomes when havens decide alone.

    commitment_gains[j] is the payoff advantage of committing for a haven
    expecting j+1 total committers (itself included), j = 0..havens-1.
    """

    equilibria: tuple
    commitment_gains: np.ndarray
    all_commit: EquilibriumOutcome
    all_split: EquilibriumOutcome


def stage1_decentralised(t_m: float, params: ModelParams,
                         grid: GridSpec = GridSpec(),
                         indifference_tol: float | None = None) -> DecentralisedEquilibriumSet:
    """Equilibrium set of the decentralised commitment game.

    Valid between the floor first binding on havens and the rate where it
    pins the non-haven (the window where the non-haven plays an interior
    uniform rate). ``indifference_tol`` defaults to 1e-9 * total profits.
    """
    from .equilibrium import regime_thresholds  # local: avoids cycle at import

    thr = regime_thresholds(params)
    if not thr.t_m0 <= t_m <= thr.t_m2:
        raise DomainError(
            f"decentralised analysis needs t_m in [{thr.t_m0}, {thr.t_m2}], got {t_m}")
    if indifference_tol is None:
        indifference_tol = 1e-9 * params.total_profits

    H = params.havens
    gains = np.empty(H)
    results = {}

    def solved(k):
        if k not in results:
            profile = CommitmentProfile(True, k)
            res = stage2_nash(profile, t_m, params, grid)
            results[k] = (res, cell_payoffs(res, profile, params))
        return results[k]

    for h_m in range(1, H + 1):
        _, pay_commit = solved(h_m)
        _, pay_split = solved(h_m - 1)
        gains[h_m - 1] = pay_commit["haven_committed"] - pay_split["haven_splitting"]

    res_commit, _ = solved(H)
    res_split, _ = solved(0)
    all_commit = _outcome_from_cell(Regime.R1, res_commit, True, params)
    all_split = _outcome_from_cell(Regime.R2, res_split, False, params)

    equilibria = []
    if gains[H - 1] >= 0:
        equilibria.append(("all_commit", H))
    if gains[0] < 0:
        equilibria.append(("all_split", 0))
    for h_m in range(1, H + 1):
        if abs(gains[h_m - 1]) < indifference_tol:
            equilibria.append(("interior", h_m))
    return DecentralisedEquilibriumSet(tuple(equilibria), gains, all_commit, all_split)
