"""Minimum-norm point of the convex hull of finitely many vectors."""

import numpy as np

from ._util import UsageError


def _segment_min_norm(a, b):
    d = b - a
    dd = float(d @ d)
    if dd == 0.0:
        return a.copy(), np.array([1.0, 0.0])
    lam = float(np.clip(-(a @ d) / dd, 0.0, 1.0))
    return a + lam * d, np.array([1.0 - lam, lam])


def _affine_min(V):
    """Weights ``w`` (sum 1) minimising ``||w @ V||`` over the affine hull of rows."""
    k = len(V)
    G = V @ V.T
    K = np.zeros((k + 1, k + 1))
    K[:k, :k] = G
    K[:k, k] = 1.0
    K[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
    return sol[:k]


def min_norm_point(vectors, tol=1e-12, max_iter=1000):
    """Nearest point to the origin in ``conv(vectors)`` (Wolfe's algorithm).

    Parameters
    ----------
    vectors : array_like, shape (k, N)
        Hull generators, ``k >= 1``.
    tol : float
        Stop once the Frank-Wolfe duality gap ``||y||^2 - min_i <y, v_i>``
        drops below ``tol * max(1, max_i ||v_i||^2)``.

    Returns
    -------
    point : ndarray, shape (N,)
    weights : ndarray, shape (k,)
        Convex weights with ``weights @ vectors == point``.
    """
    V = np.atleast_2d(np.asarray(vectors, float))
    k = len(V)
    if k == 0:
        raise UsageError("convex hull of an empty set")
    if k == 1:
        return V[0].copy(), np.ones(1)
    if k == 2:
        return _segment_min_norm(V[0], V[1])

    scale = max(1.0, float(np.max(np.sum(V * V, axis=1))))
    eps = 1e-14
    start = int(np.argmin(np.sum(V * V, axis=1)))
    S = [start]
    lam = np.array([1.0])

    for _ in range(max_iter):
        y = lam @ V[S]
        dots = V @ y
        j = int(np.argmin(dots))
        if float(y @ y) - float(dots[j]) <= tol * scale or j in S:
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        while True:
            alpha = _affine_min(V[S])
            if np.all(alpha > eps):
                lam = alpha
                break
            neg = alpha <= eps
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = np.where(neg, lam / (lam - alpha), np.inf)
            theta = float(np.min(ratios[neg & (lam - alpha > 0)], initial=1.0))
            lam = lam + theta * (alpha - lam)
            keep = lam > eps
            S = [s for s, kp in zip(S, keep) if kp]
            lam = lam[keep]
            lam = lam / lam.sum()

    weights = np.zeros(k)
    weights[S] = lam
    return weights @ V, weights
