"""Numba-compiled hot kernels.

Compiled with cache=True and without fastmath so results are stable
across processes, which the run-level determinism guarantees rely on.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def rbf_cross(A, B, inv_ls2, sv):
    n, m, d = A.shape[0], B.shape[0], A.shape[1]
    K = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            s = 0.0
            for k in range(d):
                diff = A[i, k] - B[j, k]
                s += diff * diff * inv_ls2[k]
            K[i, j] = sv * np.exp(-0.5 * s)
    return K


@njit(cache=True)
def rbf_gram(X, inv_ls2, sv):
    n, d = X.shape
    K = np.empty((n, n))
    for i in range(n):
        K[i, i] = sv
        for j in range(i + 1, n):
            s = 0.0
            for k in range(d):
                diff = X[i, k] - X[j, k]
                s += diff * diff * inv_ls2[k]
            v = sv * np.exp(-0.5 * s)
            K[i, j] = v
            K[j, i] = v
    return K


@njit(cache=True)
def nondominated_mask(F):
    n, m = F.shape
    mask = np.ones(n, dtype=np.bool_)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            # does j dominate i?
            leq = True
            lt = False
            for k in range(m):
                if F[j, k] > F[i, k]:
                    leq = False
                    break
                if F[j, k] < F[i, k]:
                    lt = True
            if leq and lt:
                mask[i] = False
                break
    return mask


@njit(cache=True)
def min_dist_mean(ref, approx):
    nr, m = ref.shape
    na = approx.shape[0]
    total = 0.0
    for i in range(nr):
        best = np.inf
        for j in range(na):
            s = 0.0
            for k in range(m):
                diff = ref[i, k] - approx[j, k]
                s += diff * diff
            if s < best:
                best = s
        total += np.sqrt(best)
    return total / nr


@njit(cache=True)
def front_ranks(F):
    # Deb's fast nondominated sort on an explicit n x n domination matrix.
    n, m = F.shape
    dom = np.zeros((n, n), dtype=np.bool_)
    count = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            leq = True
            lt = False
            for k in range(m):
                if F[i, k] > F[j, k]:
                    leq = False
                    break
                if F[i, k] < F[j, k]:
                    lt = True
            if leq and lt:
                dom[i, j] = True
                count[j] += 1
    ranks = np.full(n, -1, dtype=np.int64)
    current = np.empty(n, dtype=np.int64)
    ncur = 0
    for i in range(n):
        if count[i] == 0:
            current[ncur] = i
            ncur += 1
    rank = 0
    while ncur > 0:
        nxt = np.empty(n, dtype=np.int64)
        nnxt = 0
        for a in range(ncur):
            i = current[a]
            ranks[i] = rank
            for j in range(n):
                if dom[i, j]:
                    count[j] -= 1
                    if count[j] == 0:
                        nxt[nnxt] = j
                        nnxt += 1
        current = nxt
        ncur = nnxt
        rank += 1
    return ranks
