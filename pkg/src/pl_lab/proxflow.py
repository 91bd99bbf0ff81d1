"""Proximal-point sequences for powered distances and their length certificates.

For ``f = (mu/p) d_Omega^p`` the proximal objective ``f(u) + 1/2 ||u - x||^2``
is minimised on a segment from ``x`` to one of its projections: if ``u`` is at
distance ``s`` from ``Omega`` then ``||u - x|| >= d(x) - s``, and the segment
point at distance ``s`` attains that bound. The 1-D problem in the segment
parameter is strictly convex, so prox minimisers correspond one-to-one with
projection witnesses.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ._util import TOL_SET, UsageError, as_point, lex_key
from .certify import CertificationReport, Property, Verdict
from .funclib import PowerDistance, value

__all__ = [
    "Desingularizer", "ProxTrace", "FiniteLengthBounds", "prox_step", "prox_sequence",
    "finite_length_bounds", "finite_length_certificate", "audit_prox_step",
    "trace_to_csv", "trace_to_dict",
]

CONVERGED_GAP = 1e-10
CERT_TOL = 1e-8


@dataclass(frozen=True)
class Desingularizer:
    """``phi(t) = p / (q^(1/q) mu^(1/p)) t^(1/p)`` for a p-Lojasiewicz constant mu."""

    p: float
    mu: float

    def __post_init__(self):
        if not self.p > 1 or not self.mu > 0:
            raise UsageError("desingularizer needs p > 1 and mu > 0")

    @property
    def q(self):
        return self.p / (self.p - 1.0)

    def __call__(self, t):
        p, q = self.p, self.q
        return p / (q ** (1.0 / q) * self.mu ** (1.0 / p)) * np.asarray(t, float) ** (1.0 / p)

    def derivative(self, t):
        q = self.q
        return 1.0 / (q ** (1.0 / q) * self.mu ** (1.0 / self.p)) * np.asarray(t, float) ** (-1.0 / q)

    def inverse(self, s):
        p = self.p
        return self.mu / p / (p - 1.0) ** (p - 1.0) * np.asarray(s, float) ** p


@dataclass
class ProxTrace:
    iterates: np.ndarray  # (K+1, N)
    gaps: np.ndarray      # (K+1,)
    steps: np.ndarray     # (K,)
    converged: bool

    @property
    def total_length(self):
        return float(np.sum(self.steps))

    @property
    def limit(self):
        return self.iterates[-1]


def _segment_theta(f: PowerDistance, d):
    """Minimiser of (mu/p)(1-t)^p d^p + t^2 d^2 / 2 over t in [0, 1]."""
    if f.p == 2.0:
        return f.mu / (1.0 + f.mu)
    c = f.mu * d ** (f.p - 2.0)

    def g(t):
        return t - c * (1.0 - t) ** (f.p - 1.0)

    return brentq(g, 0.0, 1.0, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=500)


def _prox_objective(f, u, x):
    return value(f, u) + 0.5 * float(np.sum((u - x) ** 2))


def prox_step(f: PowerDistance, x):
    """All minimisers of ``f(u) + 1/2 ||u - x||^2`` (lexicographically sorted)
    and the minimal objective value.

    When the projection of ``x`` is infinite (sphere centers) the minimisers
    returned are those along the projection's canonical representatives.
    """
    x = as_point(x, f.dim)
    proj = f.set.project(x)
    d = proj.distance
    if d <= TOL_SET:
        return x[None, :].copy(), 0.0
    theta = _segment_theta(f, d)
    cands = x + theta * (proj.representatives - x)
    objs = np.array([_prox_objective(f, u, x) for u in cands])
    best = float(np.min(objs))
    keep = cands[objs <= best + 1e-12 * (1.0 + abs(best))]
    keep = np.array(sorted(keep, key=lex_key))
    return keep, best


def prox_sequence(f: PowerDistance, x0, max_iter=200, tol=1e-12) -> ProxTrace:
    """Proximal-point iterates from ``x0``.

    Stops at a point of ``Omega``, when a step is shorter than ``tol``, or
    after ``max_iter`` steps. ``converged`` means the final gap is <= 1e-10.
    """
    if max_iter < 1 or not tol > 0:
        raise UsageError("prox_sequence needs max_iter >= 1 and tol > 0")
    x = as_point(x0, f.dim)
    iterates = [x]
    gaps = [value(f, x)]
    steps = []
    for _ in range(max_iter):
        if f.set.distance(x) <= TOL_SET:
            break
        nxt = prox_step(f, x)[0][0]
        step = float(np.linalg.norm(nxt - x))
        iterates.append(nxt)
        gaps.append(value(f, nxt))
        steps.append(step)
        x = nxt
        if step < tol:
            break
    return ProxTrace(np.array(iterates), np.array(gaps), np.array(steps),
                     bool(gaps[-1] <= CONVERGED_GAP))


@dataclass(frozen=True)
class FiniteLengthBounds:
    """Left- and right-hand sides of the finite-length inequalities at ``x0``."""

    phi_gap0: float            # phi(f(x0) - inf f)
    total_length: float        # sum of steps; must be <= phi_gap0
    displacement: float        # ||x0 - limit||; must be <= phi_gap0
    growth_lhs: float          # phi^-1(d_argmin(x0)) = (mu/p)/(p-1)^(p-1) d^p
    gap0: float                # must be >= growth_lhs
    telescoping_slack: np.ndarray  # phi(gap_k) - phi(gap_{k+1}) - step_k, each >= 0

    def slacks(self):
        return {
            "length": self.phi_gap0 - self.total_length,
            "displacement": self.phi_gap0 - self.displacement,
            "growth": self.gap0 - self.growth_lhs,
            "telescoping": float(np.min(self.telescoping_slack, initial=0.0)),
        }


def finite_length_bounds(trace: ProxTrace, f: PowerDistance, x0, mu=None):
    """Evaluate the desingularizer bounds; ``mu`` defaults to ``f.loja_constant``."""
    x0 = as_point(x0, f.dim)
    phi = Desingularizer(f.p, f.loja_constant if mu is None else mu)
    gap0 = value(f, x0)
    phis = phi(trace.gaps)
    return FiniteLengthBounds(
        phi_gap0=float(phi(gap0)),
        total_length=trace.total_length,
        displacement=float(np.linalg.norm(x0 - trace.limit)),
        growth_lhs=float(phi.inverse(f.set.distance(x0))),
        gap0=gap0,
        telescoping_slack=phis[:-1] - phis[1:] - trace.steps,
    )


def finite_length_certificate(trace: ProxTrace, f: PowerDistance, x0, mu=None,
                              tol=CERT_TOL) -> CertificationReport:
    """Certify the length, displacement and growth bounds for a prox trace.

    ``estimated_constant`` is the tightest ratio lhs/rhs over the three main
    bounds (1 means equality, > 1 a violation); ``claimed_constant`` is the
    Lojasiewicz constant defining the desingularizer. Each check allows an
    absolute slack of ``tol * (1 + phi(gap0))``.
    """
    mu_used = f.loja_constant if mu is None else float(mu)
    prop = Property("finite_length", f.p)
    x0 = as_point(x0, f.dim)
    if not trace.converged:
        return CertificationReport(prop, math.nan, mu_used, Verdict.INCONCLUSIVE, x0, 0, tol)
    b = finite_length_bounds(trace, f, x0, mu_used)
    slack_tol = tol * (1.0 + b.phi_gap0)

    def ratio(lhs, rhs):
        if rhs > 0:
            return lhs / rhs
        return 1.0 if lhs <= slack_tol else math.inf

    tight = max(ratio(b.total_length, b.phi_gap0), ratio(b.displacement, b.phi_gap0),
                ratio(b.growth_lhs, b.gap0))
    ok = all(v >= -slack_tol for v in b.slacks().values())
    verdict = Verdict.HOLDS if ok else Verdict.VIOLATED
    return CertificationReport(prop, tight, mu_used, verdict, x0,
                               3 + len(trace.steps), tol)


def audit_prox_step(f: PowerDistance, x, n_probes=10_000, rng=None):
    """Compare ``prox_step`` against random probes in the ball of radius 2 d(x).

    Returns ``(ok, margin)`` where ``margin`` is the smallest probe objective
    minus the prox objective; ``ok`` allows a relative slack of 1e-12.
    """
    x = as_point(x, f.dim)
    rng = np.random.default_rng(rng)
    _, best = prox_step(f, x)
    radius = 2.0 * f.set.distance(x)
    if radius == 0.0:
        return True, 0.0
    n = f.dim
    dirs = rng.standard_normal((n_probes, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = radius * rng.random(n_probes) ** (1.0 / n)
    U = x + dirs * radii[:, None]
    objs = f.values(U) + 0.5 * np.sum((U - x) ** 2, axis=1)
    margin = float(np.min(objs) - best)
    return margin >= -1e-12 * (1.0 + abs(best)), margin


def trace_to_csv(trace: ProxTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n = trace.iterates.shape[1]
    w.writerow(["k"] + [f"x{i + 1}" for i in range(n)] + ["gap", "step"])
    for k, (x, g) in enumerate(zip(trace.iterates, trace.gaps)):
        step = repr(float(trace.steps[k])) if k < len(trace.steps) else ""
        w.writerow([k] + [repr(float(v)) for v in x] + [repr(float(g)), step])
    return buf.getvalue()


def trace_to_dict(trace: ProxTrace) -> dict:
    return {
        "iterates": trace.iterates.tolist(),
        "gaps": trace.gaps.tolist(),
        "steps": trace.steps.tolist(),
        "total_length": trace.total_length,
        "limit": trace.limit.tolist(),
        "converged": trace.converged,
    }
