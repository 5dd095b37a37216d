"""Simplex utilities: lattices, projection, validation, uniform sampling."""

from __future__ import annotations

from math import comb

import numpy as np


def das_dennis(m: int, divisions: int) -> np.ndarray:
    """All compositions of `divisions` into m parts, divided by `divisions`.

    Ordered with the first coordinate descending, so the (1, 0, ..., 0)
    vertex comes first. Shape (C(divisions + m - 1, m - 1), m).
    """
    if m == 1:
        return np.ones((1, 1))
    rows: list[list[float]] = []

    def rec(prefix: list[int], remaining: int, slots: int) -> None:
        if slots == 1:
            rows.append(prefix + [remaining])
            return
        for k in range(remaining, -1, -1):
            rec(prefix + [k], remaining - k, slots - 1)

    rec([], divisions, m)
    return np.asarray(rows, dtype=float) / divisions


def lattice_size(m: int, divisions: int) -> int:
    return comb(divisions + m - 1, m - 1)


def simplex_lattice(m: int, n: int) -> np.ndarray:
    """Exactly n well-spread lattice points on the (m-1)-simplex.

    Uses the smallest Das-Dennis lattice with at least n points and, when
    that lattice is larger, keeps an evenly strided subset.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    divisions = 1
    while lattice_size(m, divisions) < n:
        divisions += 1
    points = das_dennis(m, divisions)
    if len(points) == n:
        return points
    idx = np.floor(np.linspace(0, len(points) - 1, n)).astype(int)
    return points[idx]


def project_to_simplex(V: np.ndarray) -> np.ndarray:
    """Rowwise Euclidean projection onto the probability simplex."""
    V = np.atleast_2d(V)
    n, m = V.shape
    U = np.sort(V, axis=1)[:, ::-1]
    css = np.cumsum(U, axis=1) - 1.0
    ind = np.arange(1, m + 1)
    cond = U - css / ind > 0
    rho = m - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(n), rho - 1] / rho
    return np.maximum(V - theta[:, None], 0.0)


def on_simplex(W: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """Boolean mask of rows that are valid preference vectors within tol."""
    W = np.atleast_2d(W)
    nonneg = np.all(W >= -tol, axis=1)
    sums = np.abs(np.sum(W, axis=1) - 1.0) <= tol
    return nonneg & sums


def uniform_simplex(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    """n draws from the uniform (flat Dirichlet) distribution on the simplex."""
    return rng.dirichlet(np.ones(m), size=n)
