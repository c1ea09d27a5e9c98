"""Numba scalar-loop implementation of the oracle's payoff kernels.

Mirrors ``_kernels_numpy`` value for value; see that module for semantics.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _mu_cap(d0, n0, d1, n1, d2, n2, delta):
    # smallest mu >= 0 with sum_c n_c * max(0, d_c - mu) == delta;
    # caller guarantees the uncapped sum exceeds delta.
    # sort the three (d, n) pairs descending by d
    if d0 < d1:
        d0, d1, n0, n1 = d1, d0, n1, n0
    if d1 < d2:
        d1, d2, n1, n2 = d2, d1, n2, n1
    if d0 < d1:
        d0, d1, n0, n1 = d1, d0, n1, n0
    cn = n0
    cnd = n0 * d0
    if cn > 0.0:
        mu = (cnd - delta) / cn
        if mu < d0 and mu >= d1:
            return mu
    cn += n1
    cnd += n1 * d1
    if cn > 0.0:
        mu = (cnd - delta) / cn
        if mu < d1 and mu >= d2:
            return mu
    cn += n2
    cnd += n2 * d2
    return (cnd - delta) / cn


@njit(cache=True)
def nonhaven_segment_values(cands, ra, na, rb, nb, lam, delta):
    out = np.empty(cands.size)
    for i in range(cands.size):
        tn = cands[i]
        da = tn - ra
        if da < 0.0:
            da = 0.0
        db = tn - rb
        if db < 0.0:
            db = 0.0
        if na * da + nb * db > delta:
            mu = _mu_cap(da, na, db, nb, 0.0, 0.0, delta)
            da = max(0.0, da - mu)
            db = max(0.0, db - mu)
        tha = da / delta
        thb = db / delta
        retained = 1.0 - na * tha - nb * thb
        private = ((1.0 - tn) * retained
                   + na * (1.0 - ra) * tha + nb * (1.0 - rb) * thb
                   - delta * (na * tha * tha + nb * thb * thb) / 2.0)
        out[i] = private + lam * tn * retained
    return out


@njit(cache=True)
def haven_segment_values(cands, tn, ra, na, rb, nb, delta):
    out = np.empty(cands.size)
    da_other = max(0.0, tn - ra)
    db_other = max(0.0, tn - rb)
    fixed = na * da_other + nb * db_other
    for i in range(cands.size):
        d_self = tn - cands[i]
        if d_self < 0.0:
            d_self = 0.0
        if d_self + fixed > delta:
            mu = _mu_cap(d_self, 1.0, da_other, na, db_other, nb, delta)
            d_self = max(0.0, d_self - mu)
        out[i] = cands[i] * d_self / delta
    return out
