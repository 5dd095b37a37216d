"""Benchmark problems, analytic optimal fronts, and objective normalization.

The mDTLZ family modifies the four classic DTLZ shapes with two control
parameters: ``delta1`` reshapes the map from position variables to the
front (without changing the front itself) and ``delta2`` shifts the
optimal location of the distance variables to ``0.5 + delta2``. The
``inverted`` variants negate the objectives and flip ``(1 + g)`` to
``(1 - g)``, producing fronts in the negative orthant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import BoundsViolation, SpecError
from .simplex import simplex_lattice

FAMILIES = ("dtlz1", "dtlz2", "dtlz3", "dtlz4")


@dataclass(frozen=True)
class Problem:
    """Box-bounded deterministic vector-objective problem.

    The evaluator is batched: it maps an (n, d) array of in-bounds decision
    vectors to an (n, m) array of objective values, and must be pure
    (identical inputs give bit-identical outputs).
    """

    id: str
    d: int
    m: int
    lower: np.ndarray
    upper: np.ndarray
    evaluator: Callable[[np.ndarray], np.ndarray]
    spec: "MdtlzSpec | None" = None

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.shape != (self.d,) or upper.shape != (self.d,):
            raise SpecError(f"bounds must have shape ({self.d},)")
        if not np.all(lower < upper):
            j = int(np.argmin(upper - lower))
            raise SpecError(f"lower[{j}] >= upper[{j}]")

    def check_bounds(self, X: np.ndarray) -> None:
        X = np.atleast_2d(X)
        low = X < self.lower - 1e-12
        high = X > self.upper + 1e-12
        if low.any() or high.any():
            rows, cols = np.nonzero(low | high)
            raise BoundsViolation(
                f"decision variable {cols[0]} out of bounds "
                f"(value {X[rows[0], cols[0]]!r}) in row {rows[0]}"
            )

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Evaluate a single decision vector; raises on out-of-bounds input."""
        x = np.asarray(x, dtype=float)
        self.check_bounds(x)
        return self.evaluator(x[None, :])[0]

    def evaluate_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        self.check_bounds(X)
        return self.evaluator(X)


@dataclass(frozen=True)
class MdtlzSpec:
    """Parameters identifying one mDTLZ / inverted-mDTLZ instance."""

    family: str
    inverted: bool
    delta1: float
    delta2: float
    d: int
    m: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SpecError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.m < 2:
            raise SpecError("m must be >= 2")
        if self.d < self.m:
            raise SpecError("d must be >= m (at least one distance variable)")
        if not 0.0 < self.delta1 <= 1.0:
            raise SpecError("delta1 must lie in (0, 1]")
        if not 0.0 <= self.delta2 < 0.5:
            raise SpecError("delta2 must lie in [0, 0.5)")

    @property
    def id(self) -> str:
        inv = "inv-" if self.inverted else ""
        return (
            f"m{self.family}-{inv}{self.delta1:g}-{self.delta2:g}"
            f"-d{self.d}-m{self.m}"
        )

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "inverted": self.inverted,
            "delta1": self.delta1,
            "delta2": self.delta2,
            "d": self.d,
            "m": self.m,
        }

    @staticmethod
    def from_dict(obj: dict) -> "MdtlzSpec":
        try:
            return MdtlzSpec(
                family=str(obj["family"]).lower(),
                inverted=bool(obj["inverted"]),
                delta1=float(obj["delta1"]),
                delta2=float(obj["delta2"]),
                d=int(obj["d"]),
                m=int(obj["m"]),
            )
        except KeyError as err:
            raise SpecError(f"problem spec missing field {err}") from err


def _position_exponent(spec: MdtlzSpec) -> float:
    return 2.0 * spec.delta1 if spec.family == "dtlz4" else spec.delta1


def _distance_g(spec: MdtlzSpec, XII: np.ndarray) -> np.ndarray:
    """Distance function g; zero exactly when every x_II equals 0.5 + delta2."""
    z = XII - 0.5 - spec.delta2
    if spec.family == "dtlz1":
        k = XII.shape[1]
        return k + np.sum(z * z - np.cos(2.0 * np.pi * z), axis=1)
    if spec.family == "dtlz3":
        k = XII.shape[1]
        return 0.1 * k + np.sum(z * z - 0.1 * np.cos(2.0 * np.pi * z), axis=1)
    return np.sum(z * z, axis=1)


def _shape_terms(spec: MdtlzSpec, XI: np.ndarray) -> np.ndarray:
    """Front-shape factors per objective, before the (1 +/- g) scaling."""
    n, _ = XI.shape
    m = spec.m
    t = XI ** _position_exponent(spec)
    F = np.empty((n, m))
    if spec.family == "dtlz1":
        # cumulative products t1*...*tk, with cp[:, 0] = 1
        cp = np.cumprod(np.hstack([np.ones((n, 1)), t]), axis=1)
        F[:, 0] = 0.5 * cp[:, m - 1]
        for i in range(2, m + 1):
            F[:, i - 1] = 0.5 * cp[:, m - i] * (1.0 - t[:, m - i])
    else:
        theta = 0.5 * np.pi * t
        cos_cp = np.cumprod(np.hstack([np.ones((n, 1)), np.cos(theta)]), axis=1)
        F[:, 0] = cos_cp[:, m - 1]
        for i in range(2, m + 1):
            F[:, i - 1] = cos_cp[:, m - i] * np.sin(theta[:, m - i])
    return F


def make_mdtlz(spec: MdtlzSpec) -> Problem:
    """Build the Problem for an mDTLZ spec over the [0, 1]^d box."""
    m = spec.m

    def evaluator(X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        g = _distance_g(spec, X[:, m - 1 :])
        shape = _shape_terms(spec, X[:, : m - 1])
        if spec.inverted:
            return -shape * (1.0 - g)[:, None]
        return shape * (1.0 + g)[:, None]

    return Problem(
        id=spec.id,
        d=spec.d,
        m=spec.m,
        lower=np.zeros(spec.d),
        upper=np.ones(spec.d),
        evaluator=evaluator,
        spec=spec,
    )


def _invert_plane(U: np.ndarray, delta1: float) -> np.ndarray:
    """Position variables whose DTLZ1 shape terms equal U (rows on the simplex)."""
    n, m = U.shape
    T = np.empty((n, m - 1))
    prefix = np.ones(n)
    for k in range(m - 1):
        # shape term for objective m-k is prefix * (1 - t_k); term m-k holds u[m-1-k]
        u = U[:, m - 1 - k]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(prefix > 1e-300, 1.0 - u / prefix, 1.0)
        T[:, k] = np.clip(t, 0.0, 1.0)
        prefix = prefix * T[:, k]
    return T ** (1.0 / delta1)


def _invert_sphere(U: np.ndarray, exponent: float) -> np.ndarray:
    """Position variables whose trig shape terms equal U / ||U|| rowwise."""
    n, m = U.shape
    S = U / np.linalg.norm(U, axis=1, keepdims=True)
    T = np.empty((n, m - 1))
    radius = np.ones(n)
    for k in range(m - 1):
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(radius > 1e-300, S[:, m - 1 - k] / radius, 0.0)
        theta = np.arcsin(np.clip(s, 0.0, 1.0))
        T[:, k] = theta / (0.5 * np.pi)
        radius = radius * np.cos(theta)
    return T ** (1.0 / exponent)


def reference_front(spec: MdtlzSpec, n: int) -> tuple[np.ndarray, np.ndarray]:
    """n Pareto-optimal (x, f) pairs spread evenly over the front.

    A simplex lattice of objective-space directions is mapped through the
    family's inverse parameterization to recover position variables, and the
    distance variables are pinned to their optimum 0.5 + delta2 (g = 0).
    Returns (X, F) with F produced by the problem evaluator itself.
    """
    if n < 1:
        raise SpecError("n must be >= 1")
    U = simplex_lattice(spec.m, n)
    if spec.family == "dtlz1":
        XI = _invert_plane(U, spec.delta1)
    else:
        XI = _invert_sphere(U, _position_exponent(spec))
    XII = np.full((n, spec.d - spec.m + 1), 0.5 + spec.delta2)
    X = np.hstack([XI, XII])
    problem = make_mdtlz(spec)
    return X, problem.evaluate_batch(X)


@dataclass
class ObjectiveNormalizer:
    """Running ideal/nadir normalization of raw objectives onto (0, 1].

    Updated only between optimizer iterations from the evaluated archive;
    normalized components are clamped to [epsilon, 1]. An axis whose
    observed range collapses maps to 1 and sets the ``degenerate`` flag.
    """

    m: int
    epsilon: float = 1e-6
    ideal: np.ndarray | None = None
    nadir: np.ndarray | None = None
    n_seen: int = 0
    degenerate: bool = field(default=False)

    def update(self, F: np.ndarray) -> None:
        F = np.atleast_2d(np.asarray(F, dtype=float))
        if F.shape[1] != self.m:
            raise ValueError(f"expected {self.m} objectives, got {F.shape[1]}")
        lo = F.min(axis=0)
        hi = F.max(axis=0)
        if self.ideal is None:
            self.ideal, self.nadir = lo, hi
        else:
            self.ideal = np.minimum(self.ideal, lo)
            self.nadir = np.maximum(self.nadir, hi)
        self.n_seen += F.shape[0]

    def normalize(self, F: np.ndarray) -> np.ndarray:
        if self.n_seen < 2:
            raise ValueError("normalizer needs at least two archive points")
        F = np.asarray(F, dtype=float)
        single = F.ndim == 1
        F = np.atleast_2d(F)
        span = self.nadir - self.ideal
        flat = span <= 0.0
        if flat.any():
            self.degenerate = True
        safe = np.where(flat, 1.0, span)
        out = (F - self.ideal) / safe
        out[:, flat] = 1.0
        out = np.clip(out, self.epsilon, 1.0)
        return out[0] if single else out

    def state_dict(self) -> dict:
        return {
            "m": self.m,
            "epsilon": self.epsilon,
            "ideal": None if self.ideal is None else self.ideal.tolist(),
            "nadir": None if self.nadir is None else self.nadir.tolist(),
            "n_seen": self.n_seen,
            "degenerate": self.degenerate,
        }

    @staticmethod
    def from_state(obj: dict) -> "ObjectiveNormalizer":
        norm = ObjectiveNormalizer(m=int(obj["m"]), epsilon=float(obj["epsilon"]))
        if obj["ideal"] is not None:
            norm.ideal = np.asarray(obj["ideal"], dtype=float)
            norm.nadir = np.asarray(obj["nadir"], dtype=float)
        norm.n_seen = int(obj["n_seen"])
        norm.degenerate = bool(obj["degenerate"])
        return norm
