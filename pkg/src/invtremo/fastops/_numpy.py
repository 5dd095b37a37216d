"""Pure-numpy reference implementations of the hot kernels."""

import numpy as np


def rbf_cross(A, B, inv_ls2, sv):
    """Squared-exponential cross-covariance between row sets A and B.

    inv_ls2 holds 1/lengthscale^2 per input dimension; sv is the signal
    variance. Uses the (a-b)^2 = a^2 + b^2 - 2ab expansion so no
    (n, m, d) temporary is allocated.
    """
    As = A * np.sqrt(inv_ls2)
    Bs = B * np.sqrt(inv_ls2)
    sq = (
        np.sum(As * As, axis=1)[:, None]
        + np.sum(Bs * Bs, axis=1)[None, :]
        - 2.0 * As @ Bs.T
    )
    np.maximum(sq, 0.0, out=sq)
    return sv * np.exp(-0.5 * sq)


def rbf_gram(X, inv_ls2, sv):
    """Symmetric squared-exponential Gram matrix with exact unit diagonal."""
    K = rbf_cross(X, X, inv_ls2, sv)
    np.fill_diagonal(K, sv)
    return 0.5 * (K + K.T)


def nondominated_mask(F):
    """Boolean mask of rows of F not Pareto-dominated by any other row.

    Row a dominates row b when a <= b componentwise with at least one
    strict inequality.
    """
    n = F.shape[0]
    if n == 0:
        return np.zeros(0, dtype=bool)
    leq = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    dominates = leq & lt
    return ~np.any(dominates, axis=0)


def min_dist_mean(ref, approx):
    """Mean over rows of `ref` of the minimum Euclidean distance to `approx`."""
    sq = (
        np.sum(ref * ref, axis=1)[:, None]
        + np.sum(approx * approx, axis=1)[None, :]
        - 2.0 * ref @ approx.T
    )
    np.maximum(sq, 0.0, out=sq)
    return float(np.mean(np.sqrt(np.min(sq, axis=1))))


def front_ranks(F):
    """Nondominated-sorting front index per row (0 = first front)."""
    n = F.shape[0]
    ranks = np.full(n, -1, dtype=np.int64)
    remaining = np.arange(n)
    rank = 0
    while remaining.size:
        mask = nondominated_mask(F[remaining])
        ranks[remaining[mask]] = rank
        remaining = remaining[~mask]
        rank += 1
    return ranks
