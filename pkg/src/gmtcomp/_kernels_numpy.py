"""Vectorized numpy implementation of the oracle's payoff kernels.

Semantics must match ``_kernels_numba`` exactly; parity is enforced by tests.

Firms split shifted profits across haven rate classes at the true constrained
optimum: theta_c = (t_n - r_c - mu)+ / delta with the smallest mu >= 0 keeping
aggregate shifting at or below the firm's whole profit. The cap never binds at
equilibrium rate profiles but grid search probes rate pairs where it does.
"""

import numpy as np


def _thetas(d, counts, delta):
    """Water-filled shifting shares. d: (m, C) clamped differentials, counts: (C,)."""
    theta = d / delta
    total = d @ counts
    capped = total > delta
    if np.any(capped):
        dc = d[capped]
        order = np.argsort(-dc, axis=1)
        ds = np.take_along_axis(dc, order, axis=1)
        ns = counts[order]
        cum_n = np.cumsum(ns, axis=1)
        cum_nd = np.cumsum(ns * ds, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            mu_k = (cum_nd - delta) / cum_n
        nxt = np.concatenate([ds[:, 1:], np.full((len(ds), 1), -np.inf)], axis=1)
        ok = (mu_k < ds) & (mu_k >= nxt) & (cum_n > 0)
        k = np.argmax(ok, axis=1)
        mu = mu_k[np.arange(len(ds)), k]
        theta[capped] = np.maximum(0.0, dc - mu[:, None]) / delta
    return theta


def nonhaven_segment_values(cands, ra, na, rb, nb, lam, delta):
    """Per-unit non-haven objective on one segment, over candidate own rates.

    Haven rate classes (ra, na) and (rb, nb); counts may be zero.
    """
    cands = np.asarray(cands, dtype=np.float64)
    d = np.stack([np.maximum(0.0, cands - ra), np.maximum(0.0, cands - rb)], axis=1)
    counts = np.array([float(na), float(nb)])
    th = _thetas(d, counts, delta)
    total = th @ counts
    retained = 1.0 - total
    private = ((1.0 - cands) * retained
               + na * (1.0 - ra) * th[:, 0] + nb * (1.0 - rb) * th[:, 1]
               - delta * (na * th[:, 0] ** 2 + nb * th[:, 1] ** 2) / 2.0)
    return private + lam * cands * retained


def haven_segment_values(cands, tn, ra, na, rb, nb, delta):
    """One haven's own per-unit revenue rate*theta on one segment.

    The haven considers candidate own rates; the remaining havens sit in
    classes (ra, na) and (rb, nb) — counts exclude the haven itself.
    """
    cands = np.asarray(cands, dtype=np.float64)
    d = np.stack([
        np.maximum(0.0, tn - cands),
        np.full(cands.shape, max(0.0, tn - ra)),
        np.full(cands.shape, max(0.0, tn - rb)),
    ], axis=1)
    counts = np.array([1.0, float(na), float(nb)])
    th = _thetas(d, counts, delta)
    return cands * th[:, 0]
