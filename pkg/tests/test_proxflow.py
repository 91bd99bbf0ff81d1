import csv
import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pl_lab.certify import Verdict
from pl_lab.funclib import PowerDistance, value
from pl_lab.proxflow import (Desingularizer, audit_prox_step, finite_length_bounds,
                             finite_length_certificate, prox_sequence, prox_step, trace_to_csv)
from pl_lab.setlib import AffineSubspace, Box, ParabolaGraph, PointCloud, Singleton, Sphere

from conftest import random_points

CIRCLE = Sphere([0.0, 0.0], 1.0)


def brute_prox_2d(f, x, half=1.5, n=1201):
    g1 = np.linspace(x[0] - half, x[0] + half, n)
    g2 = np.linspace(x[1] - half, x[1] + half, n)
    U = np.stack(np.meshgrid(g1, g2), axis=-1).reshape(-1, 2)
    obj = f.values(U) + 0.5 * np.sum((U - x) ** 2, axis=1)
    i = int(np.argmin(obj))
    return U[i], float(obj[i])


def test_prox_step_circle():
    f = PowerDistance(CIRCLE, 2, 1)
    u, obj = prox_step(f, [2.0, 0.0])
    np.testing.assert_allclose(u, [[1.5, 0.0]])
    assert obj == pytest.approx(0.25)
    ub, ob = brute_prox_2d(f, np.array([2.0, 0.0]))
    np.testing.assert_allclose(ub, [1.5, 0.0], atol=3e-3)
    assert obj <= ob + 1e-12


def test_prox_step_fixed_point():
    f = PowerDistance(CIRCLE, 3, 2)
    u, obj = prox_step(f, [0.0, 1.0])
    np.testing.assert_array_equal(u, [[0.0, 1.0]])
    assert obj == 0.0


def test_prox_step_singleton_line():
    f = PowerDistance(Singleton([0.0]), 2, 1)
    u, _ = prox_step(f, [4.0])
    assert u[0, 0] == 2.0
    t = np.linspace(-1, 5, 600_001)
    assert t[np.argmin(0.5 * t ** 2 + 0.5 * (t - 4) ** 2)] == pytest.approx(2.0, abs=1e-5)


@pytest.mark.parametrize("p", [1.3, 1.5, 3.0, 4.0])
def test_prox_step_general_p_matches_1d_brute_force(p):
    f = PowerDistance(Singleton([0.0]), p, 0.8)
    u, obj = prox_step(f, [1.7])
    t = np.linspace(-0.5, 2.0, 2_500_001)
    o = 0.8 / p * np.abs(t) ** p + 0.5 * (t - 1.7) ** 2
    assert u[0, 0] == pytest.approx(t[np.argmin(o)], abs=2e-6)
    assert obj <= o.min() + 1e-12


def test_prox_step_multivalued():
    f = PowerDistance(PointCloud([[-1.0], [1.0]]), 2, 1)
    u, _ = prox_step(f, [0.0])
    np.testing.assert_allclose(u.ravel(), [-0.5, 0.5])


def test_sequence_singleton_halves():
    f = PowerDistance(Singleton([0.0]), 2, 1)
    tr = prox_sequence(f, [1.0])
    np.testing.assert_array_equal(tr.iterates[:5].ravel(), [1, 0.5, 0.25, 0.125, 0.0625])
    assert tr.converged
    assert tr.total_length == pytest.approx(1.0, abs=1e-9)
    assert abs(tr.limit[0]) < 1e-9


def test_sequence_from_argmin_is_constant():
    f = PowerDistance(CIRCLE, 2, 1)
    tr = prox_sequence(f, [1.0, 0.0])
    assert len(tr.iterates) == 1 and tr.total_length == 0.0 and tr.converged
    c = finite_length_certificate(tr, f, [1.0, 0.0])
    assert c.verdict is Verdict.HOLDS


def test_sequence_circle():
    f = PowerDistance(CIRCLE, 2, 1)
    tr = prox_sequence(f, [2.0, 0.0])
    np.testing.assert_allclose(tr.limit, [1.0, 0.0], atol=1e-9)
    assert tr.total_length == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_array_equal(tr.iterates[:, 1], 0.0)


def test_not_converged_is_inconclusive():
    f = PowerDistance(CIRCLE, 3, 1)
    tr = prox_sequence(f, [3.0, 0.0], max_iter=5)
    assert not tr.converged
    assert finite_length_certificate(tr, f, [3.0, 0.0]).verdict is Verdict.INCONCLUSIVE


@pytest.mark.parametrize("s", [CIRCLE, ParabolaGraph(1.0), PointCloud([[-1, 0], [1, 0], [0, 2]])])
@pytest.mark.parametrize("mu", [0.3, 1.0, 20.0])
def test_descent_and_step_law(s, mu):
    f = PowerDistance(s, 2, mu)
    for x0 in random_points(10, 21):
        tr = prox_sequence(f, x0)
        assert np.all(np.diff(tr.gaps) < 0)
        for k in range(len(tr.steps)):
            d = s.distance(tr.iterates[k])
            if d < 1e-6:
                break
            assert tr.steps[k] == pytest.approx(mu / (1 + mu) * d, rel=1e-9)
            assert s.distance(tr.iterates[k + 1]) == pytest.approx(d / (1 + mu), rel=1e-9)


@pytest.mark.parametrize("s", [Singleton([0.2, -0.4]), Box([-0.5, -1.0], [0.5, 0.25]),
                               AffineSubspace([0.2, 0.1], [[0.6, 0.8]])])
@pytest.mark.parametrize("mu", [0.5, 1.0, 7.0])
def test_tightness_on_convex_sets(s, mu):
    f = PowerDistance(s, 2, mu)
    for x0 in random_points(10, 22):
        if s.distance(x0) < 1e-3:
            continue
        tr = prox_sequence(f, x0)
        b = finite_length_bounds(tr, f, x0)
        assert b.displacement == pytest.approx(b.phi_gap0, abs=1e-9)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_certificate_general_p(p):
    f = PowerDistance(CIRCLE, p, 1.0)
    tr = prox_sequence(f, [2.5, 0.5], max_iter=5000, tol=1e-14)
    assert tr.converged
    c = finite_length_certificate(tr, f, [2.5, 0.5])
    assert c.verdict is Verdict.HOLDS
    assert c.claimed_constant == pytest.approx(f.loja_constant)


def test_certificate_with_too_large_mu_is_violated():
    f = PowerDistance(CIRCLE, 2, 1.0)
    tr = prox_sequence(f, [2.0, 0.0])
    assert finite_length_certificate(tr, f, [2.0, 0.0], mu=4.0).verdict is Verdict.VIOLATED


def test_certificate_singleton_is_tight():
    f = PowerDistance(Singleton([0.0]), 2, 1)
    tr = prox_sequence(f, [1.0])
    c = finite_length_certificate(tr, f, [1.0])
    assert c.verdict is Verdict.HOLDS
    assert c.estimated_constant == pytest.approx(1.0, abs=1e-9)
    assert Desingularizer(2, 1)(0.5) == pytest.approx(1.0)


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-8, 1e8), st.sampled_from([1.5, 2.0, 3.0, 4.0]), st.floats(0.01, 100))
def test_phi_round_trip(t, p, mu):
    phi = Desingularizer(p, mu)
    assert phi.inverse(phi(t)) == pytest.approx(t, rel=1e-12)


def test_phi_derivative_and_shape():
    phi = Desingularizer(3.0, 2.0)
    t = np.array([0.3, 1.0, 5.0])
    h = 1e-6
    np.testing.assert_allclose(phi.derivative(t), (phi(t + h) - phi(t - h)) / (2 * h), rtol=1e-6)
    assert phi(0.0) == 0.0
    assert np.all(np.diff(phi(np.linspace(0, 10, 50))) > 0)


@pytest.mark.parametrize("s", [CIRCLE, ParabolaGraph(1.0), PointCloud([[-1, 0], [1, 0]])])
def test_prox_audit(s):
    f = PowerDistance(s, 2, 1)
    rng = np.random.default_rng(5)
    for x in random_points(20, 23):
        ok, margin = audit_prox_step(f, x, 2000, rng)
        assert ok, margin


def test_trace_csv():
    f = PowerDistance(Singleton([0.0]), 2, 1)
    tr = prox_sequence(f, [1.0])
    rows = list(csv.reader(io.StringIO(trace_to_csv(tr))))
    assert rows[0] == ["k", "x1", "gap", "step"]
    assert rows[1] == ["0", "1.0", "0.5", "0.5"]
    assert rows[-1][-1] == ""
    assert len(rows) == len(tr.iterates) + 1
    assert float(rows[2][2]) == value(f, [0.5])
