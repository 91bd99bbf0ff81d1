"""Sampling-based certification of Lojasiewicz-type inequalities.

A verdict of ``HOLDS`` means no sampled counterexample was found; it is
never a proof. Every report carries the number of samples it is based on
and the numerical tolerance it was judged with.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ._util import UsageError, as_point, check_fields, finite_or_none, lex_key
from .funclib import (PowerDistance, PowerNorm, Quadratic, SubgradientSample,
                      clarke_subdiff, eval_test_function, limiting_subdiff, value)
from .setlib import ClosedSet

__all__ = [
    "Verdict", "Property", "CertificationReport", "SamplingPlan", "SubgradientOracle",
    "oracle_for", "clarke_oracle", "loja_ratio", "estimate_constant",
    "conditioning_report", "submetric_report", "sandwich_report", "plan_from_dict",
]

CONSTANT_RTOL = 1e-6
INEQUALITY_TOL = 1e-9
DEFAULT_EXCLUSION = 1e-8


class Verdict(enum.Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Property:
    kind: str  # pl | p_lojasiewicz | conditioning | submetric | sandwich | finite_length
    p: Optional[float] = None

    def to_dict(self):
        d = {"kind": self.kind}
        if self.p is not None:
            d["p"] = self.p
        return d


@dataclass
class CertificationReport:
    property: Property
    estimated_constant: float
    claimed_constant: Optional[float]
    verdict: Verdict
    witness: Optional[np.ndarray]
    samples_used: int
    tolerance: float

    def to_dict(self):
        return {
            "property": self.property.to_dict(),
            "estimated_constant": finite_or_none(self.estimated_constant),
            "claimed_constant": None if self.claimed_constant is None
            else float(self.claimed_constant),
            "verdict": self.verdict.value,
            "witness": None if self.witness is None else [float(v) for v in self.witness],
            "samples_used": int(self.samples_used),
            "tolerance": self.tolerance,
        }


@dataclass(frozen=True)
class SamplingPlan:
    """Grid (``points_per_axis`` per axis, ascending, last axis outermost) or
    seeded uniform random samples inside ``bounds``."""

    bounds: tuple  # ((lo, hi), ...) per axis
    points_per_axis: Optional[int] = None
    count: Optional[int] = None
    seed: int = 0
    exclusion_radius: float = DEFAULT_EXCLUSION

    @classmethod
    def grid(cls, bounds, points_per_axis, exclusion_radius=DEFAULT_EXCLUSION):
        return cls(tuple(map(tuple, bounds)), points_per_axis=int(points_per_axis),
                   exclusion_radius=exclusion_radius)

    @classmethod
    def random(cls, bounds, count, seed=0, exclusion_radius=DEFAULT_EXCLUSION):
        return cls(tuple(map(tuple, bounds)), count=int(count), seed=int(seed),
                   exclusion_radius=exclusion_radius)

    def __post_init__(self):
        if (self.points_per_axis is None) == (self.count is None):
            raise UsageError("a plan is either a grid or a random sample")
        if any(len(b) != 2 or not b[0] <= b[1] for b in self.bounds):
            raise UsageError("bounds must be [lo, hi] pairs with lo <= hi")
        n = self.points_per_axis if self.count is None else self.count
        if n < 0:
            raise UsageError("sample counts must be nonnegative")
        if self.exclusion_radius < 0:
            raise UsageError("exclusion radius must be >= 0")

    @property
    def dim(self):
        return len(self.bounds)

    def points(self):
        lo = np.array([b[0] for b in self.bounds], float)
        hi = np.array([b[1] for b in self.bounds], float)
        if self.count is not None:
            rng = np.random.default_rng(self.seed)
            return lo + (hi - lo) * rng.random((self.count, self.dim))
        n = self.points_per_axis
        axes = [np.linspace(a, b, n) for a, b in zip(lo, hi)]
        mesh = np.meshgrid(*axes[::-1], indexing="ij")
        return np.stack([m.ravel() for m in mesh[::-1]], axis=1)


@dataclass(frozen=True)
class SubgradientOracle:
    """Subgradient access to ``f`` plus its known infimum and, optionally, argmin."""

    value: Callable
    subdiff: Callable
    inf: float = 0.0
    argmin: Optional[ClosedSet] = None

    def __post_init__(self):
        if not math.isfinite(self.inf):
            raise UsageError("inf f must be finite")
        if self.argmin is not None:
            probe = np.zeros(self.argmin.dim)
            for w in self.argmin.project(probe).representatives:
                if abs(self.value(w) - self.inf) > 1e-8 * (1.0 + abs(self.inf)):
                    raise UsageError("argmin descriptor is not in the zero level set of f - inf f")

    def gap(self, x):
        return self.value(x) - self.inf

    def scaled(self, alpha):
        """Oracle for ``alpha f`` (alpha > 0)."""
        if alpha <= 0:
            raise UsageError("scaling factor must be positive")
        sub = self.subdiff
        return SubgradientOracle(
            lambda x: alpha * self.value(x),
            lambda x: (lambda s: SubgradientSample(alpha * s.vectors, s.complete))(sub(x)),
            alpha * self.inf, self.argmin)


def oracle_for(g) -> SubgradientOracle:
    """Limiting-subgradient oracle for a catalog function."""
    if isinstance(g, PowerDistance):
        return SubgradientOracle(lambda x: value(g, x), lambda x: limiting_subdiff(g, x),
                                 0.0, g.set)
    if isinstance(g, (Quadratic, PowerNorm)):
        def sub(x):
            return SubgradientSample(eval_test_function(g, x)[1][None, :], True)
        return SubgradientOracle(lambda x: eval_test_function(g, x)[0], sub, 0.0, g.argmin())
    raise UsageError(f"no oracle for {type(g).__name__}")


def clarke_oracle(f: PowerDistance) -> SubgradientOracle:
    """Oracle whose witnesses include the minimal-norm Clarke subgradient."""
    return SubgradientOracle(lambda x: value(f, x), lambda x: clarke_subdiff(f, x), 0.0, f.set)


def _conjugate(p):
    if not p > 1:
        raise UsageError("exponent p must be > 1")
    return p / (p - 1.0)


def loja_ratio(oracle: SubgradientOracle, p, x):
    """Largest constant for which the global p-Lojasiewicz inequality
    ``f(x) - inf f <= ||x*||^q / (q mu^(q/p))`` holds at ``x`` for all witnesses.

    ``+inf`` when the gap is zero, ``0`` when a zero witness meets a positive gap.
    """
    q = _conjugate(p)
    x = as_point(x)
    gap = oracle.gap(x)
    sample = oracle.subdiff(x)
    if len(sample.vectors) == 0:
        raise RuntimeError("empty subgradient sample; the limiting subdifferential is never empty")
    if gap <= 0.0:
        return math.inf
    n = sample.min_norm()
    if n == 0.0:
        return 0.0
    return (n ** q / (q * gap)) ** (p / q)


def _included(oracle, X, plan):
    if plan.exclusion_radius <= 0:
        return X
    if oracle.argmin is not None:
        d = oracle.argmin.distances(X)
        return X[d >= plan.exclusion_radius]
    return X


def _argmin_lex(scores, X):
    best = min(range(len(scores)), key=lambda i: (scores[i], lex_key(X[i])))
    return best


def _empty_report(prop, claimed, tol):
    return CertificationReport(prop, math.nan, claimed, Verdict.INCONCLUSIVE, None, 0, tol)


def _prop_for(p):
    return Property("pl") if p == 2 else Property("p_lojasiewicz", float(p))


def estimate_constant(oracle: SubgradientOracle, p, plan: SamplingPlan, claimed=None,
                      rtol=CONSTANT_RTOL) -> CertificationReport:
    """Infimum of :func:`loja_ratio` over the plan, compared with ``claimed``."""
    prop = _prop_for(p)
    X = _included(oracle, plan.points(), plan)
    if len(X) == 0:
        return _empty_report(prop, claimed, rtol)
    ratios = [loja_ratio(oracle, p, x) for x in X]
    i = _argmin_lex(ratios, X)
    est = ratios[i]
    if claimed is None:
        ok = est > 0.0
    else:
        ok = est >= claimed * (1.0 - rtol)
    verdict = Verdict.HOLDS if ok else Verdict.VIOLATED
    return CertificationReport(prop, est, claimed, verdict, X[i].copy(), len(X), rtol)


def _growth_report(prop, X, lhs, rhs, ratios, scale, claimed, tol):
    """Shared reduction: per-sample check ``lhs <= rhs + tol * scale``."""
    excess = lhs - rhs - tol * scale
    violating = np.flatnonzero(excess > 0.0)
    if len(violating):
        i = violating[_argmin_lex(ratios[violating], X[violating])]
        verdict = Verdict.VIOLATED
    else:
        i = _argmin_lex(ratios, X)
        verdict = Verdict.HOLDS
    est = float(np.min(ratios))
    return CertificationReport(prop, est, claimed, verdict, X[i].copy(), len(X), tol)


def _require_argmin(oracle):
    if oracle.argmin is None:
        raise UsageError("this report needs the argmin set of f")


def conditioning_report(oracle: SubgradientOracle, p, claimed, plan: SamplingPlan,
                        tol=INEQUALITY_TOL) -> CertificationReport:
    """Check ``(mu/p) d_argmin(x)^p <= f(x) - inf f`` on the plan.

    The estimate is ``inf p (f - inf f) / d_argmin^p`` over included samples.
    """
    _require_argmin(oracle)
    prop = Property("conditioning", float(p))
    X = _included(oracle, plan.points(), plan)
    if len(X) == 0:
        return _empty_report(prop, claimed, tol)
    d = oracle.argmin.distances(X)
    vals = np.array([oracle.value(x) for x in X])
    gaps = vals - oracle.inf
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(d > 0, p * gaps / d ** p, np.inf)
    lhs = claimed / p * d ** p
    return _growth_report(prop, X, lhs, gaps, ratios, 1.0 + np.abs(vals), claimed, tol)


def submetric_report(oracle: SubgradientOracle, p, claimed, plan: SamplingPlan,
                     tol=INEQUALITY_TOL) -> CertificationReport:
    """Check ``mu d_argmin(x)^(p-1) <= ||x*||`` for the minimal-norm witness."""
    _require_argmin(oracle)
    prop = Property("submetric", float(p))
    X = _included(oracle, plan.points(), plan)
    if len(X) == 0:
        return _empty_report(prop, claimed, tol)
    d = oracle.argmin.distances(X)
    norms = np.array([oracle.subdiff(x).min_norm() for x in X])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(d > 0, norms / d ** (p - 1.0), np.inf)
    lhs = claimed * d ** (p - 1.0)
    return _growth_report(prop, X, lhs, norms, ratios, 1.0 + norms, claimed, tol)


def sandwich_report(oracle: SubgradientOracle, mu, L, plan: SamplingPlan,
                    tol=INEQUALITY_TOL) -> CertificationReport:
    """Check ``(mu/2) d^2 <= f - inf f <= (L/2) d^2`` where f is differentiable.

    Samples with more than one (or an incomplete set of) subgradient
    witnesses are skipped. The estimate is the lower constant
    ``inf 2 (f - inf f) / d^2``.
    """
    _require_argmin(oracle)
    if not (mu > 0 and L >= mu):
        raise UsageError("sandwich needs L >= mu > 0")
    prop = Property("sandwich")
    X = _included(oracle, plan.points(), plan)
    smooth = []
    for x in X:
        s = oracle.subdiff(x)
        smooth.append(s.complete and len(s.vectors) == 1)
    X = X[np.array(smooth, bool)] if len(X) else X
    if len(X) == 0:
        return _empty_report(prop, mu, tol)
    d = oracle.argmin.distances(X)
    vals = np.array([oracle.value(x) for x in X])
    gaps = vals - oracle.inf
    scale = 1.0 + np.abs(vals)
    low_excess = mu / 2 * d ** 2 - gaps - tol * scale
    up_excess = gaps - L / 2 * d ** 2 - tol * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        lower = np.where(d > 0, 2 * gaps / d ** 2, np.inf)
        # normalised slack of each side; < 1 means that side fails
        score = np.minimum(lower / mu, np.where(gaps > 0, L * d ** 2 / (2 * gaps), np.inf))
    violating = np.flatnonzero((low_excess > 0) | (up_excess > 0))
    if len(violating):
        i = violating[_argmin_lex(score[violating], X[violating])]
        verdict = Verdict.VIOLATED
    else:
        i = _argmin_lex(score, X)
        verdict = Verdict.HOLDS
    return CertificationReport(prop, float(np.min(lower)), mu, verdict, X[i].copy(),
                               len(X), tol)


def plan_from_dict(d) -> SamplingPlan:
    if not isinstance(d, dict) or "mode" not in d:
        raise UsageError("plan needs a 'mode' field")
    try:
        if d["mode"] == "grid":
            check_fields(d, ["mode", "bounds", "points_per_axis"], ["exclusion_radius"])
            return SamplingPlan.grid(d["bounds"], d["points_per_axis"],
                                     float(d.get("exclusion_radius", DEFAULT_EXCLUSION)))
        if d["mode"] == "random":
            check_fields(d, ["mode", "bounds", "count"], ["seed", "exclusion_radius"])
            return SamplingPlan.random(d["bounds"], d["count"], d.get("seed", 0),
                                       float(d.get("exclusion_radius", DEFAULT_EXCLUSION)))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(f"invalid plan: {exc}") from exc
    raise UsageError(f"unknown plan mode {d['mode']!r}")
