"""Powered distance functions and smooth reference functions.

``PowerDistance`` is ``f = (mu/p) d_Omega^p``. Its limiting subdifferential
is available in closed form from the projection onto ``Omega``:
``{0}`` on ``Omega`` and ``mu d^(p-2) (x - proj(x))`` off it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._util import TOL_SET, UsageError, as_point, as_points, check_fields
from .hull import min_norm_point
from .setlib import (AffineSubspace, Cardinality, ClosedSet, Singleton, Sphere, Union,
                     set_from_dict, set_to_dict)

__all__ = [
    "ConditioningWarning", "HullUndecidableError", "PowerDistance", "SubgradientSample",
    "Quadratic", "PowerNorm", "value", "limiting_subdiff", "clarke_min_norm",
    "clarke_subdiff", "eval_test_function", "function_from_dict", "function_to_dict",
]

# below this distance (p < 2) the factor d^(p-2) is numerically unreliable
ILL_CONDITIONED_DISTANCE = 1e-8


class ConditioningWarning(RuntimeWarning):
    pass


class HullUndecidableError(UsageError):
    """The witness list is a strict subset of the subdifferential and no
    analytic description of its convex hull is known."""


@dataclass(frozen=True)
class SubgradientSample:
    vectors: np.ndarray  # (k, N), k >= 1
    complete: bool

    def min_norm(self):
        return float(np.min(np.linalg.norm(self.vectors, axis=1)))


@dataclass(frozen=True, eq=False)
class PowerDistance:
    set: ClosedSet
    p: float = 2.0
    mu: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.p) and self.p > 1):
            raise UsageError("exponent p must be > 1")
        if not (np.isfinite(self.mu) and self.mu > 0):
            raise UsageError("mu must be > 0")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "mu", float(self.mu))

    @property
    def dim(self):
        return self.set.dim

    @property
    def q(self):
        return self.p / (self.p - 1.0)

    @property
    def loja_constant(self):
        """Tight constant of the global p-Lojasiewicz inequality
        ``f - inf f <= ||x*||^q / (q mu'^(q/p))`` satisfied by this function.

        Equals ``mu`` for ``p = 2``; in general ``mu (p-1)^(p-1)``.
        """
        return self.mu * (self.p - 1.0) ** (self.p - 1.0)

    def _from_distance(self, d):
        d = np.asarray(d, float)
        return np.where(d <= TOL_SET, 0.0, (self.mu / self.p) * d ** self.p)

    def __call__(self, x):
        return value(self, x)

    def values(self, X):
        return self._from_distance(self.set.distances(as_points(X, self.dim)))

    def scaled(self, alpha):
        return PowerDistance(self.set, self.p, alpha * self.mu)


def value(f: PowerDistance, x) -> float:
    """``(mu/p) d(x)^p``, exactly 0 on the set."""
    d = f.set.distance(as_point(x, f.dim))
    return 0.0 if d <= TOL_SET else (f.mu / f.p) * d ** f.p


def limiting_subdiff(f: PowerDistance, x) -> SubgradientSample:
    """Limiting subgradients of ``f`` at ``x``.

    Off the set there is one witness per projection representative; the
    sample is complete unless the projection is infinite (sphere centers),
    in which case the witnesses are the sphere's axis orbit.
    """
    x = as_point(x, f.dim)
    proj = f.set.project(x)
    d = proj.distance
    if d <= TOL_SET:
        return SubgradientSample(np.zeros((1, f.dim)), True)
    if f.p < 2.0 and d < ILL_CONDITIONED_DISTANCE:
        warnings.warn(f"distance {d:.3e} is tiny and p = {f.p} < 2; subgradients are "
                      "ill-conditioned", ConditioningWarning, stacklevel=2)
    vecs = f.mu * d ** (f.p - 2.0) * (x - proj.representatives)
    return SubgradientSample(vecs, proj.cardinality is not Cardinality.INFINITE)


def _full_sphere_orbit(s: ClosedSet, x) -> bool:
    """True when the nearest points of ``x`` include an entire sphere (N >= 2)."""
    if isinstance(s, Sphere):
        return s.dim >= 2 and float(np.linalg.norm(x - s.center)) == 0.0
    if isinstance(s, Union):
        return any(_full_sphere_orbit(m, x) for m, _ in s.tied_members(x))
    return False


def _hull_min_point(f: PowerDistance, x):
    x = as_point(x, f.dim)
    sample = limiting_subdiff(f, x)
    if sample.complete:
        return min_norm_point(sample.vectors)[0]
    if _full_sphere_orbit(f.set, x):
        # witnesses fill a sphere around 0, whose hull is the ball
        return np.zeros(f.dim)
    raise HullUndecidableError("hull undecidable: limiting witnesses at this point are "
                               "incomplete and no analytic hull is known")


def clarke_min_norm(f: PowerDistance, x):
    """Norm of the minimal element of the Clarke subdifferential at ``x``.

    Returns ``(min_norm, contains_zero)`` with ``contains_zero`` meaning
    ``min_norm <= 1e-9``.
    """
    m = float(np.linalg.norm(_hull_min_point(f, x)))
    return m, m <= 1e-9


def clarke_subdiff(f: PowerDistance, x) -> SubgradientSample:
    """Limiting witnesses plus the minimal-norm Clarke subgradient.

    The extra vector is the binding one for Lojasiewicz-type inequalities;
    the sample is never complete since the hull is a continuum in general.
    """
    x = as_point(x, f.dim)
    lim = limiting_subdiff(f, x)
    y = _hull_min_point(f, x)
    return SubgradientSample(np.vstack([lim.vectors, y[None, :]]), False)


# -- smooth reference functions -----------------------------------------------

@dataclass(frozen=True, eq=False)
class Quadratic:
    """``1/2 (x - b)^T A (x - b)`` with ``A`` symmetric positive semidefinite."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, float))
        b = as_point(self.b)
        if A.shape != (b.size, b.size) or not np.all(np.isfinite(A)):
            raise UsageError("quadratic needs a finite square A matching b")
        if np.max(np.abs(A - A.T)) > 1e-12:
            raise UsageError("quadratic matrix must be symmetric")
        if np.min(np.linalg.eigvalsh(A)) < -1e-12:
            raise UsageError("quadratic matrix must be positive semidefinite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def dim(self):
        return self.b.size

    def argmin(self) -> ClosedSet:
        w, U = np.linalg.eigh(self.A)
        null = U[:, w <= 1e-12 * max(1.0, float(np.max(np.abs(w))))].T
        if null.shape[0] == 0:
            return Singleton(self.b)
        return AffineSubspace(self.b, null)


@dataclass(frozen=True, eq=False)
class PowerNorm:
    """``(mu/p) ||x||^p`` on R^dim."""

    mu: float = 1.0
    p: float = 2.0
    dim: int = 2

    def __post_init__(self):
        if not (np.isfinite(self.p) and self.p > 1):
            raise UsageError("exponent p must be > 1")
        if not (np.isfinite(self.mu) and self.mu > 0):
            raise UsageError("mu must be > 0")
        if int(self.dim) < 1:
            raise UsageError("dimension must be >= 1")

    def argmin(self) -> ClosedSet:
        return Singleton(np.zeros(int(self.dim)))


def eval_test_function(g, x):
    """Exact ``(value, gradient)`` of a smooth reference function."""
    x = as_point(x, g.dim)
    if isinstance(g, Quadratic):
        r = x - g.b
        Ar = g.A @ r
        return 0.5 * float(r @ Ar), Ar
    if isinstance(g, PowerNorm):
        n = float(np.linalg.norm(x))
        if n == 0.0:
            return 0.0, np.zeros_like(x)
        return g.mu / g.p * n ** g.p, g.mu * n ** (g.p - 2.0) * x
    raise UsageError(f"not a smooth test function: {type(g).__name__}")


# -- JSON ---------------------------------------------------------------------

def function_from_dict(d):
    if not isinstance(d, dict) or "kind" not in d:
        raise UsageError("function description needs a 'kind' field")
    kind = d["kind"]
    try:
        if kind == "power_distance":
            check_fields(d, ["kind", "set"], ["mu", "p"])
            return PowerDistance(set_from_dict(d["set"]), float(d.get("p", 2.0)),
                                 float(d.get("mu", 1.0)))
        if kind == "quadratic":
            check_fields(d, ["kind", "A"], ["b"])
            A = np.atleast_2d(np.asarray(d["A"], float))
            return Quadratic(A, d.get("b", np.zeros(A.shape[0])))
        if kind == "power_norm":
            check_fields(d, ["kind"], ["mu", "p", "dim"])
            return PowerNorm(float(d.get("mu", 1.0)), float(d.get("p", 2.0)),
                             int(d.get("dim", 2)))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"invalid {kind!r} function: {exc}") from exc
    raise UsageError(f"unknown function kind {kind!r}")


def function_to_dict(g) -> dict:
    if isinstance(g, PowerDistance):
        return {"kind": "power_distance", "mu": g.mu, "p": g.p, "set": set_to_dict(g.set)}
    if isinstance(g, Quadratic):
        return {"kind": "quadratic", "A": g.A.tolist(), "b": g.b.tolist()}
    if isinstance(g, PowerNorm):
        return {"kind": "power_norm", "mu": g.mu, "p": g.p, "dim": g.dim}
    raise UsageError(f"cannot serialise {type(g).__name__}")
