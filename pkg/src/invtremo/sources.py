"""Source-dataset construction via an elitist evolutionary algorithm.

Runs rank-and-crowding survival (nondominated sort + crowding distance)
with simulated binary crossover and polynomial mutation to converge a
population on a source problem's front, then keeps a crowding-truncated
nondominated subset and converts it to (preference, solution) pairs.
"""

from __future__ import annotations

import numpy as np

from . import fastops
from .datasets import InverseDataset
from .decomposition import preference_from_objectives
from .problems import ObjectiveNormalizer, Problem

SBX_ETA = 20.0
MUTATION_ETA = 20.0
CROSSOVER_PROB = 0.9


def crowding_distance(F: np.ndarray) -> np.ndarray:
    """Per-point crowding distance within one front (larger = less crowded)."""
    n, m = F.shape
    if n <= 2:
        return np.full(n, np.inf)
    dist = np.zeros(n)
    for j in range(m):
        order = np.argsort(F[:, j], kind="stable")
        fj = F[order, j]
        span = fj[-1] - fj[0]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        if span > 0:
            dist[order[1:-1]] += (fj[2:] - fj[:-2]) / span
    return dist


def _rank_and_crowding(F: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ranks = fastops.front_ranks(F)
    crowd = np.empty(len(F))
    for r in np.unique(ranks):
        idx = np.nonzero(ranks == r)[0]
        crowd[idx] = crowding_distance(F[idx])
    return ranks, crowd


def _survival(X: np.ndarray, F: np.ndarray, n_keep: int) -> np.ndarray:
    """Indices of the n_keep survivors under rank-then-crowding order."""
    ranks, crowd = _rank_and_crowding(F)
    # sort by (rank asc, crowding desc); stable for determinism
    order = np.lexsort((-crowd, ranks))
    return order[:n_keep]


def _tournament(rng: np.random.Generator, ranks, crowd, n_parents: int) -> np.ndarray:
    n = len(ranks)
    a = rng.integers(0, n, size=n_parents)
    b = rng.integers(0, n, size=n_parents)
    better = (ranks[a] < ranks[b]) | ((ranks[a] == ranks[b]) & (crowd[a] >= crowd[b]))
    return np.where(better, a, b)


def sbx_crossover(rng, P1, P2, lower, upper, eta=SBX_ETA, prob=CROSSOVER_PROB):
    """Simulated binary crossover, vectorized over pairs and variables."""
    u = rng.random(P1.shape)
    beta = np.where(
        u <= 0.5,
        (2.0 * u) ** (1.0 / (eta + 1.0)),
        (0.5 / (1.0 - u)) ** (1.0 / (eta + 1.0)),
    )
    cross = rng.random(P1.shape) < 0.5
    beta = np.where(cross, beta, 1.0)
    do_pair = (rng.random((P1.shape[0], 1)) < prob)
    beta = np.where(do_pair, beta, 1.0)
    C1 = 0.5 * ((1 + beta) * P1 + (1 - beta) * P2)
    C2 = 0.5 * ((1 - beta) * P1 + (1 + beta) * P2)
    return np.clip(C1, lower, upper), np.clip(C2, lower, upper)


def polynomial_mutation(rng, X, lower, upper, eta=MUTATION_ETA, prob=None):
    """Polynomial mutation with per-variable probability (default 1/d)."""
    n, d = X.shape
    if prob is None:
        prob = 1.0 / d
    span = upper - lower
    u = rng.random((n, d))
    delta = np.where(
        u < 0.5,
        (2.0 * u) ** (1.0 / (eta + 1.0)) - 1.0,
        1.0 - (2.0 * (1.0 - u)) ** (1.0 / (eta + 1.0)),
    )
    mutate = rng.random((n, d)) < prob
    out = np.where(mutate, X + delta * span, X)
    return np.clip(out, lower, upper)


def generate_source_dataset(
    problem: Problem,
    pop_size: int = 100,
    generations: int = 500,
    keep: int = 100,
    seed: int = 0,
) -> InverseDataset:
    """Optimize the source problem and package its nondominated set.

    The kept solutions' objectives are normalized over the kept set itself
    before deriving preference vectors, so the dataset is self-contained.
    """
    if pop_size < keep:
        raise ValueError("pop_size must be >= keep")
    rng = np.random.default_rng(seed)
    lower, upper = problem.lower, problem.upper

    X = lower + (upper - lower) * rng.random((pop_size, problem.d))
    F = problem.evaluate_batch(X)
    for _ in range(generations):
        ranks, crowd = _rank_and_crowding(F)
        parents = _tournament(rng, ranks, crowd, pop_size)
        P = X[parents]
        C1, C2 = sbx_crossover(rng, P[0::2], P[1::2], lower, upper)
        children = np.vstack([C1, C2])
        children = polynomial_mutation(rng, children, lower, upper)
        FC = problem.evaluate_batch(children)
        X_all = np.vstack([X, children])
        F_all = np.vstack([F, FC])
        survivors = _survival(X_all, F_all, pop_size)
        X, F = X_all[survivors], F_all[survivors]

    nd = fastops.nondominated_mask(F)
    X_nd, F_nd = X[nd], F[nd]
    if len(X_nd) > keep:
        crowd = crowding_distance(F_nd)
        order = np.argsort(-crowd, kind="stable")
        X_nd, F_nd = X_nd[order[:keep]], F_nd[order[:keep]]

    norm = ObjectiveNormalizer(m=problem.m)
    norm.update(F_nd)
    W = preference_from_objectives(norm.normalize(F_nd))
    return InverseDataset(
        m=problem.m,
        d=problem.d,
        W=W,
        X=X_nd,
        lower=lower,
        upper=upper,
        nondominated=True,
        provenance={
            "problem": problem.id,
            "generator": "elitist-ea",
            "seed": seed,
            "pop_size": pop_size,
            "generations": generations,
            "keep": keep,
        },
    )
