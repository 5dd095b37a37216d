"""Scalarization and preference-vector machinery.

The augmented Tchebycheff function turns normalized objectives plus a
preference vector into one scalar target; its inverse companion derives
the preference vector under which a given nondominated point is the
scalarized minimizer. Preference sets are spread over the simplex by
Riesz s-energy minimization, with the deterministic lattice available
as a fallback.
"""

from __future__ import annotations

import numpy as np

from .exceptions import SpecError
from .simplex import das_dennis, lattice_size, project_to_simplex, simplex_lattice

DEFAULT_ETA = 0.05


def augmented_tchebycheff(f_norm: np.ndarray, w: np.ndarray, eta: float = DEFAULT_ETA) -> np.ndarray:
    """max_i(w_i * f_i) + eta * sum_i(w_i * f_i), rowwise for 2-D f_norm."""
    f_norm = np.asarray(f_norm, dtype=float)
    w = np.asarray(w, dtype=float)
    if f_norm.shape[-1] != w.shape[0]:
        raise ValueError(
            f"objective count {f_norm.shape[-1]} does not match weight count {w.shape[0]}"
        )
    wf = f_norm * w
    if f_norm.ndim == 1:
        return float(np.max(wf) + eta * np.sum(wf))
    return np.max(wf, axis=1) + eta * np.sum(wf, axis=1)


def preference_from_objectives(f_norm: np.ndarray) -> np.ndarray:
    """Preference vector(s) whose scalarized minimum sits at the given point.

    c_i = (sum_v f_v) / f_i, renormalized onto the simplex. Inputs must be
    strictly positive (the normalizer's epsilon clamp guarantees this).
    """
    f_norm = np.asarray(f_norm, dtype=float)
    single = f_norm.ndim == 1
    F = np.atleast_2d(f_norm)
    if np.any(F <= 0.0):
        raise ValueError("preference derivation needs strictly positive objectives")
    c = np.sum(F, axis=1, keepdims=True) / F
    W = c / np.sum(c, axis=1, keepdims=True)
    return W[0] if single else W


def _riesz_energy_and_grad(W: np.ndarray, s: float) -> tuple[float, np.ndarray]:
    diff = W[:, None, :] - W[None, :, :]
    d2 = np.sum(diff * diff, axis=2)
    np.fill_diagonal(d2, np.inf)
    d2 = np.maximum(d2, 1e-18)
    inv = d2 ** (-s / 2.0)
    energy = 0.5 * float(np.sum(inv))
    coef = -s * d2 ** (-(s + 2.0) / 2.0)
    grad = np.sum(coef[:, :, None] * diff, axis=1)
    return energy, grad


def generate_preference_set(
    m: int,
    n: int,
    seed: int = 0,
    method: str = "energy",
    iterations: int = 400,
) -> np.ndarray:
    """n well-spread preference vectors on the simplex, vertices included.

    method="energy" refines a lattice initialization by projected gradient
    descent on the pairwise Riesz s-energy (s = m^2); method="lattice"
    returns the deterministic lattice directly. Deterministic per seed.
    """
    if n < m:
        raise SpecError(f"need at least m={m} preference vectors, got n={n}")
    if method == "lattice":
        return simplex_lattice(m, n)
    if method != "energy":
        raise SpecError(f"unknown preference method {method!r}")

    divisions = 1
    while lattice_size(m, divisions + 1) <= n:
        divisions += 1
    init = das_dennis(m, divisions)
    if len(init) < n:
        rng = np.random.default_rng(seed)
        fill = rng.dirichlet(np.ones(m), size=n - len(init))
        W = np.vstack([init, fill])
    else:
        W = init[:n]

    s = float(m * m)
    lr = 0.1 / n
    energy, grad = _riesz_energy_and_grad(W, s)
    for _ in range(iterations):
        step = grad / (np.linalg.norm(grad, axis=1, keepdims=True) + 1e-12)
        candidate = project_to_simplex(W - lr * step)
        cand_energy, cand_grad = _riesz_energy_and_grad(candidate, s)
        if cand_energy <= energy:
            W, energy, grad = candidate, cand_energy, cand_grad
            lr *= 1.1
        else:
            lr *= 0.5
            if lr < 1e-12:
                break
    # exact simplex invariant after the numerical updates
    W = np.maximum(W, 0.0)
    return W / np.sum(W, axis=1, keepdims=True)


def check_scalarized_minimizer(problem, pareto_x: np.ndarray, candidates) -> bool:
    """Scalarized-minimum check for a nondominated point.

    Derives the preference vector from the point's own objectives and tests
    that no candidate attains a lower plain (eta = 0) Tchebycheff value.
    Caller guarantees the point is nondominated among the candidates and the
    problem's objectives are already in (0, 1].
    """
    f_p = problem.evaluate(np.asarray(pareto_x, dtype=float))
    w = preference_from_objectives(f_p)
    own = augmented_tchebycheff(f_p, w, eta=0.0)
    for cand in candidates:
        f_c = problem.evaluate(np.asarray(cand, dtype=float))
        if augmented_tchebycheff(f_c, w, eta=0.0) < own - 1e-12:
            return False
    return True
