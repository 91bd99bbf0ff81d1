"""Catalog of closed sets with exact distance and projection oracles.

Every set exposes ``dim``, ``distances`` (batched), ``distance`` and
``project``. Projections return *all* nearest points when there are finitely
many; sphere centers, where the nearest-point set is a whole sphere, return a
canonical orbit sample flagged ``Cardinality.INFINITE``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ._util import TOL_SET, UsageError, as_point, as_points, check_fields, lex_key
from .cubic import depressed_cubic_roots, real_roots

__all__ = [
    "Cardinality", "ProjectionResult", "ClosedSet", "Singleton", "PointCloud",
    "Sphere", "ParabolaGraph", "Box", "AffineSubspace", "Union",
    "distance", "project", "is_tied", "set_from_dict", "set_to_dict",
]


class Cardinality(enum.Enum):
    SINGLETON = "singleton"
    FINITE_COMPLETE = "finite_complete"
    INFINITE = "infinite"


def is_tied(sq_a, sq_b):
    """Two squared distances are tied when they differ by < 1e-12 (1 + d^2)."""
    return abs(sq_a - sq_b) < 1e-12 * (1.0 + min(sq_a, sq_b))


@dataclass(frozen=True)
class ProjectionResult:
    representatives: np.ndarray  # (k, N)
    cardinality: Cardinality
    distance: float

    @classmethod
    def finite(cls, reps, distance):
        reps = _dedupe(np.atleast_2d(np.asarray(reps, float)))
        card = Cardinality.SINGLETON if len(reps) == 1 else Cardinality.FINITE_COMPLETE
        return cls(reps, card, float(distance))


def _dedupe(reps, tol=1e-12):
    keep = []
    for r in reps:
        if not any(np.max(np.abs(r - k)) <= tol * (1.0 + np.max(np.abs(k))) for k in keep):
            keep.append(r)
    return np.array(keep)


class ClosedSet:
    """Base class for catalog sets. Subclasses implement ``dim``,
    ``distances`` and ``_project``."""

    dim: int

    def distances(self, X):
        raise NotImplementedError

    def distance(self, x):
        x = as_point(x, self.dim)
        return float(self.distances(x[None, :])[0])

    def project(self, x):
        return self._project(as_point(x, self.dim))

    def contains(self, x, tol=TOL_SET):
        return self.distance(x) <= tol

    def _project(self, x):
        raise NotImplementedError


def distance(s: ClosedSet, x) -> float:
    return s.distance(x)


def project(s: ClosedSet, x) -> ProjectionResult:
    return s.project(x)


@dataclass(frozen=True, eq=False)
class Singleton(ClosedSet):
    point: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", as_point(self.point))

    @property
    def dim(self):
        return self.point.size

    def distances(self, X):
        X = as_points(X, self.dim)
        return np.linalg.norm(X - self.point, axis=1)

    def _project(self, x):
        return ProjectionResult(self.point[None, :].copy(), Cardinality.SINGLETON,
                                float(np.linalg.norm(x - self.point)))


@dataclass(frozen=True, eq=False)
class PointCloud(ClosedSet):
    points: np.ndarray  # (k, N)

    def __post_init__(self):
        pts = np.asarray(self.points, float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or len(pts) == 0:
            raise UsageError("a point cloud needs at least one point")
        object.__setattr__(self, "points", as_points(pts))

    @property
    def dim(self):
        return self.points.shape[1]

    def distances(self, X):
        X = as_points(X, self.dim)
        sq = np.sum((X[:, None, :] - self.points[None, :, :]) ** 2, axis=2)
        return np.sqrt(np.min(sq, axis=1))

    def _project(self, x):
        sq = np.sum((self.points - x) ** 2, axis=1)
        best = float(np.min(sq))
        tied = [p for p, s in zip(self.points, sq) if is_tied(s, best)]
        return ProjectionResult.finite(tied, np.sqrt(best))


@dataclass(frozen=True, eq=False)
class Sphere(ClosedSet):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise UsageError("sphere radius must be positive")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self):
        return self.center.size

    def distances(self, X):
        X = as_points(X, self.dim)
        return np.abs(np.linalg.norm(X - self.center, axis=1) - self.radius)

    def orbit(self):
        """The 2N axis points ``center +/- radius e_i``."""
        reps = []
        for i in range(self.dim):
            for sign in (1.0, -1.0):
                e = np.zeros(self.dim)
                e[i] = sign * self.radius
                reps.append(self.center + e)
        return np.array(reps)

    def _project(self, x):
        v = x - self.center
        nv = float(np.linalg.norm(v))
        if nv == 0.0:
            if self.dim == 1:
                return ProjectionResult.finite(self.orbit(), self.radius)
            return ProjectionResult(self.orbit(), Cardinality.INFINITE, self.radius)
        w = self.center + (self.radius / nv) * v
        return ProjectionResult(w[None, :], Cardinality.SINGLETON, abs(nv - self.radius))


@dataclass(frozen=True, eq=False)
class ParabolaGraph(ClosedSet):
    """The curve ``{(t, a t^2) : t real}`` in the plane."""

    a: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.a) or self.a == 0:
            raise UsageError("parabola scale must be finite and nonzero")
        object.__setattr__(self, "a", float(self.a))

    dim = 2

    def _coeffs(self, x1, x2):
        # stationarity of (t - x1)^2 + (a t^2 - x2)^2, divided by 2 a^2
        a2 = 2.0 * self.a * self.a
        return (1.0 - 2.0 * self.a * x2) / a2, -x1 / a2

    def _sqdist(self, t, x1, x2):
        return (t - x1) ** 2 + (self.a * t * t - x2) ** 2

    def distances(self, X):
        X = as_points(X, 2)
        x1, x2 = X[:, 0], X[:, 1]
        P, Q = self._coeffs(x1, x2)
        roots = depressed_cubic_roots(P, Q)
        sq = self._sqdist(roots, x1[:, None], x2[:, None])
        return np.sqrt(np.nanmin(sq, axis=1))

    def distance(self, x):
        x = as_point(x, 2)
        x1, x2 = float(x[0]), float(x[1])
        return math.sqrt(min(self._sqdist(t, x1, x2)
                             for t in real_roots(*self._coeffs(x1, x2))))

    def _project(self, x):
        x1, x2 = float(x[0]), float(x[1])
        ts = real_roots(*self._coeffs(x1, x2))
        sq = [self._sqdist(float(t), x1, x2) for t in ts]
        best = min(sq)
        tied = [t for t, s in zip(ts, sq) if is_tied(s, best)]
        reps = [(t, self.a * t * t) for t in tied]
        return ProjectionResult.finite(reps, np.sqrt(best))


@dataclass(frozen=True, eq=False)
class Box(ClosedSet):
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo, hi = as_point(self.lower), as_point(self.upper, None)
        if lo.size != hi.size:
            raise UsageError("box bounds must have equal dimension")
        if np.any(lo > hi):
            raise UsageError("box needs lower <= upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self):
        return self.lower.size

    def distances(self, X):
        X = as_points(X, self.dim)
        return np.linalg.norm(X - np.clip(X, self.lower, self.upper), axis=1)

    def _project(self, x):
        w = np.clip(x, self.lower, self.upper)
        return ProjectionResult(w[None, :], Cardinality.SINGLETON, float(np.linalg.norm(x - w)))


@dataclass(frozen=True, eq=False)
class AffineSubspace(ClosedSet):
    """``anchor + span(basis)``; ``basis`` rows must be orthonormal (may be empty)."""

    anchor: np.ndarray
    basis: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    def __post_init__(self):
        anchor = as_point(self.anchor)
        B = np.asarray(self.basis, float)
        if B.size == 0:
            B = np.zeros((0, anchor.size))
        B = np.atleast_2d(B)
        if B.shape[1] != anchor.size or not np.all(np.isfinite(B)):
            raise UsageError("affine basis vectors must be finite and match the anchor dimension")
        if B.shape[0] and np.max(np.abs(B @ B.T - np.eye(B.shape[0]))) > 1e-10:
            raise UsageError("affine basis vectors must be orthonormal")
        object.__setattr__(self, "anchor", anchor)
        object.__setattr__(self, "basis", B)

    @property
    def dim(self):
        return self.anchor.size

    def _proj_many(self, X):
        V = X - self.anchor
        return self.anchor + (V @ self.basis.T) @ self.basis

    def distances(self, X):
        X = as_points(X, self.dim)
        return np.linalg.norm(X - self._proj_many(X), axis=1)

    def _project(self, x):
        w = self._proj_many(x[None, :])[0]
        return ProjectionResult(w[None, :], Cardinality.SINGLETON, float(np.linalg.norm(x - w)))


@dataclass(frozen=True, eq=False)
class Union(ClosedSet):
    members: tuple

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise UsageError("a union needs at least one member")
        dims = {m.dim for m in members}
        if len(dims) != 1:
            raise UsageError(f"union members disagree on dimension: {sorted(dims)}")
        object.__setattr__(self, "members", members)

    @property
    def dim(self):
        return self.members[0].dim

    def distances(self, X):
        X = as_points(X, self.dim)
        return np.min([m.distances(X) for m in self.members], axis=0)

    def distance(self, x):
        x = as_point(x, self.dim)
        return min(m.distance(x) for m in self.members)

    def tied_members(self, x):
        """Members attaining the union distance at ``x``, with their projections."""
        results = [(m, m.project(x)) for m in self.members]
        best = min(r.distance for _, r in results) ** 2
        return [(m, r) for m, r in results if is_tied(r.distance ** 2, best)]

    def _project(self, x):
        tied = self.tied_members(x)
        dist = min(r.distance for _, r in tied)
        reps = np.vstack([r.representatives for _, r in tied])
        if any(r.cardinality is Cardinality.INFINITE for _, r in tied):
            reps = _dedupe(reps)
            return ProjectionResult(reps, Cardinality.INFINITE, dist)
        return ProjectionResult.finite(reps, dist)


def sorted_lex(points):
    return np.array(sorted(points, key=lex_key))


# -- JSON ------------------------------------------------------------------

def set_from_dict(d) -> ClosedSet:
    """Build a catalog set from its JSON description; unknown fields are rejected."""
    if not isinstance(d, dict) or "variant" not in d:
        raise UsageError("set description needs a 'variant' field")
    v = d["variant"]
    try:
        if v == "singleton":
            check_fields(d, ["variant", "point"])
            return Singleton(d["point"])
        if v == "point_cloud":
            check_fields(d, ["variant", "points"])
            return PointCloud(d["points"])
        if v == "sphere":
            check_fields(d, ["variant", "center", "radius"])
            return Sphere(d["center"], float(d["radius"]))
        if v == "parabola":
            check_fields(d, ["variant"], ["a"])
            return ParabolaGraph(float(d.get("a", 1.0)))
        if v == "box":
            check_fields(d, ["variant", "lower", "upper"])
            return Box(d["lower"], d["upper"])
        if v == "affine":
            check_fields(d, ["variant", "anchor"], ["basis"])
            return AffineSubspace(d["anchor"], d.get("basis", []))
        if v == "union":
            check_fields(d, ["variant", "members"])
            if not isinstance(d["members"], list):
                raise UsageError("union members must be a list")
            return Union(tuple(set_from_dict(m) for m in d["members"]))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"invalid {v!r} set: {exc}") from exc
    raise UsageError(f"unknown set variant {v!r}")


def set_to_dict(s: ClosedSet) -> dict:
    if isinstance(s, Singleton):
        return {"variant": "singleton", "point": s.point.tolist()}
    if isinstance(s, PointCloud):
        return {"variant": "point_cloud", "points": s.points.tolist()}
    if isinstance(s, Sphere):
        return {"variant": "sphere", "center": s.center.tolist(), "radius": s.radius}
    if isinstance(s, ParabolaGraph):
        return {"variant": "parabola", "a": s.a}
    if isinstance(s, Box):
        return {"variant": "box", "lower": s.lower.tolist(), "upper": s.upper.tolist()}
    if isinstance(s, AffineSubspace):
        return {"variant": "affine", "anchor": s.anchor.tolist(), "basis": s.basis.tolist()}
    if isinstance(s, Union):
        return {"variant": "union", "members": [set_to_dict(m) for m in s.members]}
    raise UsageError(f"cannot serialise {type(s).__name__}")
