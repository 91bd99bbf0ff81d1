import numpy as np
import pytest

from pl_lab.setlib import (AffineSubspace, Box, ParabolaGraph, PointCloud, Singleton, Sphere,
                           Union)


def catalog():
    """One planar instance of every catalog variant."""
    s = np.sqrt(0.5)
    return {
        "singleton": Singleton([0.3, -0.2]),
        "point_cloud": PointCloud([[-1.0, 0.0], [1.0, 0.0], [0.0, 1.5], [0.5, -1.2]]),
        "sphere": Sphere([0.0, 0.0], 1.0),
        "parabola": ParabolaGraph(1.0),
        "box": Box([-0.5, -1.0], [0.5, 0.25]),
        "affine": AffineSubspace([0.2, 0.1], [[s, s]]),
        "union": Union((Sphere([0.5, 0.0], 0.75), Singleton([-1.5, 1.0]),
                        ParabolaGraph(-0.5))),
    }


CATALOG_NAMES = list(catalog())


@pytest.fixture(params=CATALOG_NAMES)
def catalog_set(request):
    return request.param, catalog()[request.param]


def discretize(s, n=200_000, span=6.0):
    """Dense point sample of a catalog set restricted to a bounded window.

    Independent of the projection code: only the parametrisation of each
    variant is used.
    """
    if isinstance(s, Singleton):
        return s.point[None, :]
    if isinstance(s, PointCloud):
        return s.points
    if isinstance(s, Sphere):
        th = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
        return s.center + s.radius * np.stack([np.cos(th), np.sin(th)], axis=1)
    if isinstance(s, ParabolaGraph):
        t = np.linspace(-span, span, n)
        return np.stack([t, s.a * t * t], axis=1)
    if isinstance(s, Box):
        m = int(np.sqrt(n))
        g1 = np.linspace(s.lower[0], s.upper[0], m)
        g2 = np.linspace(s.lower[1], s.upper[1], m)
        G = np.stack(np.meshgrid(g1, g2), axis=-1).reshape(-1, 2)
        return G
    if isinstance(s, AffineSubspace):
        t = np.linspace(-span, span, n)
        return s.anchor + t[:, None] * s.basis[0]
    if isinstance(s, Union):
        return np.vstack([discretize(m, n, span) for m in s.members])
    raise TypeError(s)


def brute_distance(cloud, x):
    return float(np.sqrt(np.min(np.sum((cloud - x) ** 2, axis=1))))


def brute_box_distance(box, x, m=400):
    """Two-stage grid search over the solid box: coarse, then a fine grid in
    the window that can contain the nearest point."""
    g1 = np.linspace(box.lower[0], box.upper[0], m)
    g2 = np.linspace(box.lower[1], box.upper[1], m)
    G = np.stack(np.meshgrid(g1, g2), axis=-1).reshape(-1, 2)
    coarse = brute_distance(G, x)
    r = coarse + 1e-12
    lo = np.maximum(box.lower, x - r)
    hi = np.minimum(box.upper, x + r)
    f1 = np.linspace(lo[0], hi[0], m)
    f2 = np.linspace(lo[1], hi[1], m)
    F = np.stack(np.meshgrid(f1, f2), axis=-1).reshape(-1, 2)
    return min(coarse, brute_distance(F, x))


def random_points(n, seed, lo=-2.0, hi=2.0, dim=2):
    return np.random.default_rng(seed).uniform(lo, hi, size=(n, dim))


def central_difference(fun, x, h=1e-5):
    g = np.zeros_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (fun(x + e) - fun(x - e)) / (2 * h)
    return g


def stable_projection(s, x, h=1e-5):
    """True when x has a single nearest point and the nearest-point map does
    not jump anywhere on the central-difference stencil around x."""
    r = s.project(x)
    if len(r.representatives) != 1:
        return False
    w = r.representatives[0]
    for i in range(len(x)):
        for sgn in (1.0, -1.0):
            e = np.zeros_like(x)
            e[i] = sgn * h
            rr = s.project(x + e)
            if len(rr.representatives) != 1 or np.linalg.norm(rr.representatives[0] - w) > 1e-3:
                return False
    return True
