"""Real roots of depressed cubics ``t**3 + P*t + Q = 0``.

The closed forms (Cardano for one real root, the trigonometric form for
three) are evaluated in a cancellation-free way and polished with a few
guarded Newton steps. The scalar entry point additionally checks residuals
and falls back to bisection on the monotone pieces of the cubic.
"""

import math

import numpy as np

_NEWTON_STEPS = 4


def _residual(t, P, Q):
    return (t * t + P) * t + Q


def _polish(t, P, Q):
    for _ in range(_NEWTON_STEPS):
        g = _residual(t, P, Q)
        dg = 3.0 * t * t + P
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            cand = t - g / dg
        better = np.isfinite(cand) & (np.abs(_residual(cand, P, Q)) < np.abs(g))
        t = np.where(better, cand, t)
    return t


def depressed_cubic_roots(P, Q):
    """Vectorised real roots of ``t**3 + P t + Q``.

    Parameters
    ----------
    P, Q : array_like
        Coefficients, broadcast together to shape ``(n,)``.

    Returns
    -------
    roots : ndarray, shape (n, 3)
        Real roots, ``nan`` in the slots of complex roots. Repeated roots
        appear repeatedly.
    """
    P, Q = np.broadcast_arrays(np.atleast_1d(np.asarray(P, float)),
                               np.atleast_1d(np.asarray(Q, float)))
    n = P.shape[0]
    roots = np.full((n, 3), np.nan)

    disc = (Q / 2.0) ** 2 + (P / 3.0) ** 3
    one = disc > 0.0

    if np.any(one):
        p1, q1 = P[one], Q[one]
        s = -q1 / 2.0
        # pick the sign that avoids cancellation; |w| >= sqrt(disc) > 0
        w = s + np.copysign(np.sqrt(disc[one]), s)
        u = np.cbrt(w)
        roots[one, 0] = u - p1 / (3.0 * u)

    three = ~one
    if np.any(three):
        p3, q3 = P[three], Q[three]
        m = 2.0 * np.sqrt(np.maximum(-p3 / 3.0, 0.0))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            arg = np.where(p3 < 0.0, (3.0 * q3 / (2.0 * p3)) * np.sqrt(-3.0 / p3), 0.0)
        theta = np.arccos(np.clip(arg, -1.0, 1.0)) / 3.0
        for k in range(3):
            roots[three, k] = m * np.cos(theta - 2.0 * np.pi * k / 3.0)

    finite = np.isfinite(roots)
    Pb = np.broadcast_to(P[:, None], roots.shape)
    Qb = np.broadcast_to(Q[:, None], roots.shape)
    roots[finite] = _polish(roots[finite], Pb[finite], Qb[finite])
    return roots


def _bisect(lo, hi, P, Q, iters=200):
    glo = _residual(lo, P, Q)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        gm = _residual(mid, P, Q)
        if gm == 0.0:
            return mid
        if (gm < 0.0) == (glo < 0.0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _bracketed_roots(P, Q):
    bound = 1.0 + max(abs(P), abs(Q))
    knots = [-bound]
    if P < 0.0:
        c = np.sqrt(-P / 3.0)
        knots += [-c, c]
    knots.append(bound)
    found = []
    for a, b in zip(knots[:-1], knots[1:]):
        ga, gb = _residual(a, P, Q), _residual(b, P, Q)
        if ga == 0.0:
            found.append(a)
        elif gb == 0.0:
            found.append(b)
        elif (ga < 0.0) != (gb < 0.0):
            found.append(_bisect(a, b, P, Q))
    # a double root at a critical point shows up as a touching extremum
    if P < 0.0:
        c = np.sqrt(-P / 3.0)
        for t in (-c, c):
            if abs(_residual(t, P, Q)) <= 1e-14 * (1.0 + abs(Q)):
                found.append(t)
    return found


def _scalar_closed_form(P, Q):
    """Scalar twin of :func:`depressed_cubic_roots` built on ``math``."""
    disc = (Q / 2.0) ** 2 + (P / 3.0) ** 3
    if disc > 0.0:
        s = -Q / 2.0
        w = s + math.copysign(math.sqrt(disc), s)
        u = math.copysign(abs(w) ** (1.0 / 3.0), w)
        roots = [u - P / (3.0 * u)]
    else:
        m = 2.0 * math.sqrt(max(-P / 3.0, 0.0))
        arg = (3.0 * Q / (2.0 * P)) * math.sqrt(-3.0 / P) if P < 0.0 else 0.0
        theta = math.acos(min(1.0, max(-1.0, arg))) / 3.0
        roots = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)]
    out = []
    for t in roots:
        for _ in range(_NEWTON_STEPS):
            g = _residual(t, P, Q)
            dg = 3.0 * t * t + P
            if dg == 0.0:
                break
            cand = t - g / dg
            if not math.isfinite(cand) or abs(_residual(cand, P, Q)) >= abs(g):
                break
            t = cand
        out.append(t)
    return out


def real_roots(P, Q, rtol=1e-12):
    """Sorted distinct real roots of ``t**3 + P t + Q`` for scalar P, Q.

    Closed-form roots are accepted when their residual is within
    ``rtol`` of the scale of the polynomial's terms; otherwise the roots are
    recomputed by bisection on the monotone pieces.
    """
    P, Q = float(P), float(Q)
    try:
        cand = [t for t in _scalar_closed_form(P, Q) if math.isfinite(t)]
    except (OverflowError, ZeroDivisionError):
        cand = []
    ok = bool(cand) and all(
        abs(_residual(t, P, Q)) <= rtol * max(1.0, abs(t) ** 3, abs(P * t), abs(Q))
        for t in cand)
    roots = cand if ok else [float(t) for t in _bracketed_roots(P, Q)]
    roots.sort()
    out = []
    for t in roots:
        if not out or abs(t - out[-1]) > 1e-9 * (1.0 + abs(t)):
            out.append(float(t))
    return np.array(out)
