"""Fused census kernel: walk an affine family of representations in
lexicographic coefficient order, rank each point's Hom systems, and tally
the resulting classification keys.

The odometer trick keeps each step cheap: advancing one point changes a
suffix of the coefficient digits by +1 mod p, so the packed systems are
updated by adding the corresponding direction rows instead of being
reassembled. Compiled with numba when available; orbits.py falls back to
a vectorized numpy path otherwise.
"""

from __future__ import annotations

import numpy as np

try:
    import numba
    from numba import njit, prange

    # workqueue is always present; probing TBB/OMP warns on version skew
    numba.config.THREADING_LAYER = "workqueue"
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional accelerator
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap

    prange = range


@njit(cache=True, nogil=True, parallel=True)
def _census_counts(
    total: int,
    n_stripes: int,
    p: int,
    inv: np.ndarray,
    weights: np.ndarray,
    K0: np.ndarray,
    L: np.ndarray,
    part_off: np.ndarray,
    part_rows: np.ndarray,
    part_cols: np.ndarray,
    key_size: int,
) -> np.ndarray:
    e = weights.shape[0]
    n_parts = part_rows.shape[0]
    stripe_len = (total + n_stripes - 1) // n_stripes
    counts = np.zeros((n_stripes, key_size), dtype=np.int64)
    max_rows = 0
    max_cols = 0
    for t in range(n_parts):
        if part_rows[t] > max_rows:
            max_rows = part_rows[t]
        if part_cols[t] > max_cols:
            max_cols = part_cols[t]
    for stripe in prange(n_stripes):
        start = stripe * stripe_len
        stop = min(total, start + stripe_len)
        if start >= stop:
            continue
        digits = np.empty(e, dtype=np.int64)
        rem = start
        for k in range(e):
            digits[k] = (rem // weights[k]) % p
        sys = K0.copy()
        for k in range(e):
            dk = digits[k]
            if dk:
                for m in range(sys.shape[0]):
                    sys[m] = (sys[m] + dk * L[k, m]) % p
        work = np.empty((max_rows, max_cols), dtype=np.int64)
        idx = start
        while idx < stop:
            key = 0
            for t in range(n_parts):
                rows = part_rows[t]
                cols = part_cols[t]
                off = part_off[t]
                if cols == 0:
                    hom = 0
                elif rows == 0:
                    hom = cols
                else:
                    for r in range(rows):
                        for c in range(cols):
                            work[r, c] = sys[off + r * cols + c]
                    rank = 0
                    for col in range(cols):
                        if rank == rows:
                            break
                        pr = -1
                        for r in range(rank, rows):
                            if work[r, col] != 0:
                                pr = r
                                break
                        if pr < 0:
                            continue
                        if pr != rank:
                            for c in range(col, cols):
                                tmp = work[rank, c]
                                work[rank, c] = work[pr, c]
                                work[pr, c] = tmp
                        f = inv[work[rank, col]]
                        for c in range(col, cols):
                            work[rank, c] = work[rank, c] * f % p
                        for r in range(rank + 1, rows):
                            v = work[r, col]
                            if v:
                                for c in range(col, cols):
                                    work[r, c] = (work[r, c] - v * work[rank, c]) % p
                        rank += 1
                    hom = cols - rank
                key = key * (cols + 1) + hom
            counts[stripe, key] += 1
            idx += 1
            if idx == stop:
                break
            # odometer: bump the last digit, propagate carries; each digit
            # change is +1 mod p, i.e. one row addition per changed digit
            k = e - 1
            while True:
                for m in range(sys.shape[0]):
                    sys[m] = (sys[m] + L[k, m]) % p
                digits[k] += 1
                if digits[k] == p:
                    digits[k] = 0
                    k -= 1
                else:
                    break
    return counts.sum(axis=0)


def census_counts(total, p, inv, weights, K0, L, part_off, part_rows, part_cols, key_size):
    """Tally classification keys over the whole affine family."""
    n_stripes = 1
    if HAVE_NUMBA and total >= 1 << 14:
        n_stripes = 64
    return _census_counts(
        int(total),
        int(n_stripes),
        int(p),
        np.ascontiguousarray(inv, dtype=np.int64),
        np.ascontiguousarray(weights, dtype=np.int64),
        np.ascontiguousarray(K0, dtype=np.int64),
        np.ascontiguousarray(L, dtype=np.int64),
        np.ascontiguousarray(part_off, dtype=np.int64),
        np.ascontiguousarray(part_rows, dtype=np.int64),
        np.ascontiguousarray(part_cols, dtype=np.int64),
        int(key_size),
    )
