import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonrad.greens import (
    WaveContext,
    default_degree,
    dyadic_green,
    expansion_j0,
    expansion_scalar_green,
    farfield_projector,
    grad_scalar_green,
    green_profile,
    j0_profile,
    projector_angles,
    scalar_green,
)

S2 = math.sqrt(2.0)
G_00 = np.diag([1.0, 1.0, 0.0])
G_PI4 = np.array([
    [3 / 4, -1 / 4, -S2 / 4],
    [-1 / 4, 3 / 4, -S2 / 4],
    [-S2 / 4, -S2 / 4, 1 / 2],
])


def unit(v):
    v = np.asarray(v, float)
    return v / np.linalg.norm(v)


def test_context_defaults():
    ctx = WaveContext(1.0, 1.0)
    assert ctx.N == default_degree(1.0, 1.0) == 1 + 4 + 10
    assert WaveContext(math.pi, 1.0).N == 4 + 6 + 10
    with pytest.raises(ValueError):
        WaveContext(0.0, 1.0)
    with pytest.raises(ValueError):
        WaveContext(1.0, 1.0, N=-1)


def test_scalar_green_examples():
    x = np.array([1.0, 0.0, 0.0])
    y = np.zeros(3)
    assert scalar_green(x, y, WaveContext(2 * math.pi, 1.0)) == pytest.approx(1 / (4 * math.pi), rel=1e-14)
    assert scalar_green(x, y, WaveContext(math.pi, 1.0)) == pytest.approx(-1 / (4 * math.pi), rel=1e-14)
    val = scalar_green(np.array([0.0, 2.0, 0.0]), y, WaveContext(1.0, 1.0))
    assert val == pytest.approx(cmath.exp(2j) / (8 * math.pi), rel=1e-15)


def test_scalar_green_singular():
    with pytest.raises(ValueError):
        scalar_green(np.ones(3), np.ones(3), WaveContext(1.0, 1.0))


def test_grad_green_fd():
    ctx = WaveContext(1.0, 1.0)
    x = np.array([2.0, 0.0, 0.0])
    y = np.zeros(3)
    h = 1e-5
    fd = np.array([(scalar_green(x + h * e, y, ctx) - scalar_green(x - h * e, y, ctx)) / (2 * h) for e in np.eye(3)])
    assert np.max(np.abs(grad_scalar_green(x, y, ctx) - fd)) <= 1e-7


def test_profile_derivatives_fd():
    rho = np.array([0.7, 1.5, 3.2])
    F = green_profile(rho, 1.3, order=3)
    h = 1e-5
    for k in range(3):
        p = green_profile(rho + h, 1.3, order=3)[k]
        m = green_profile(rho - h, 1.3, order=3)[k]
        assert np.max(np.abs(F[k + 1] - (p - m) / (2 * h)) / np.abs(F[k + 1])) < 1e-8


def test_j0_profile_fd_and_origin():
    rho = np.array([0.0, 1e-6, 0.2, 0.49, 0.51, 2.0, 7.0])
    f0, f1, f2 = j0_profile(rho, 1.7)
    assert f0[0] == 1.0 and f1[0] == 0.0
    assert f2[0] == pytest.approx(-1.7**2 / 3, rel=1e-14)
    h = 1e-5
    r = rho[2:]
    p, m = j0_profile(r + h, 1.7), j0_profile(r - h, 1.7)
    assert np.max(np.abs(f1[2:] - (p[0] - m[0]) / (2 * h))) < 1e-9
    assert np.max(np.abs(f2[2:] - (p[1] - m[1]) / (2 * h))) < 1e-9


def test_dyadic_g11_example():
    ctx = WaveContext(1.0, 1.0)
    r = 3.0
    g = cmath.exp(1j * r) / (4 * math.pi * r)
    ref = (1j * r - 1) / r**2 * (-2) * g
    G = dyadic_green(np.array([3.0, 0.0, 0.0]), np.zeros(3), ctx)
    assert G[0, 0] == pytest.approx(ref, rel=1e-14)
    assert G[1, 1] == pytest.approx(g + (1j * r - 1) / r**2 * g, rel=1e-14)


def _nested_fd_dyadic(x, y, ctx):
    h = np.finfo(float).eps ** 0.25 * max(1.0, np.linalg.norm(x - y))
    E = np.eye(3)
    H = np.empty((3, 3), dtype=complex)
    for a in range(3):
        for b in range(3):
            H[a, b] = (
                scalar_green(x + h * E[a] + h * E[b], y, ctx) - scalar_green(x + h * E[a] - h * E[b], y, ctx)
                - scalar_green(x - h * E[a] + h * E[b], y, ctx) + scalar_green(x - h * E[a] - h * E[b], y, ctx)
            ) / (4 * h * h)
    return scalar_green(x, y, ctx) * np.eye(3) + H / ctx.kappa**2


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3), st.floats(1.0, 4.0), st.floats(0.5, 3.0))
def test_dyadic_matches_nested_fd(d, dist, kappa):
    ctx = WaveContext(kappa, 1.0)
    v = np.asarray(d)
    if np.linalg.norm(v) < 1e-3:
        return
    y = np.array([0.1, -0.2, 0.3])
    x = y + dist * unit(v)
    G = dyadic_green(x, y, ctx)
    ref = _nested_fd_dyadic(x, y, ctx)
    assert np.max(np.abs(G - ref)) <= 1e-5 * np.max(np.abs(ref))


def test_dyadic_symmetric_and_reciprocal():
    ctx = WaveContext(1.4, 1.0)
    x, y = np.array([1.0, 2.0, -0.5]), np.array([0.2, 0.1, 0.3])
    G = dyadic_green(x, y, ctx)
    assert np.allclose(G, G.T, atol=1e-16)
    assert np.allclose(G, dyadic_green(y, x, ctx), atol=1e-16)


def test_helmholtz_residual_sixth_order():
    ctx = WaveContext(1.2, 1.0)
    y = np.zeros(3)
    c = np.array([-49 / 18, 3 / 2, -3 / 20, 1 / 90])
    h = 1e-2
    for x in (np.array([1.0, 0.5, 0.3]), np.array([0.0, 0.0, 2.5]), np.array([-1.0, 2.0, 1.0])):
        g0 = scalar_green(x, y, ctx)
        lap = 3 * c[0] * g0
        for e in np.eye(3):
            for k in (1, 2, 3):
                lap += c[k] * (scalar_green(x + k * h * e, y, ctx) + scalar_green(x - k * h * e, y, ctx))
        lap /= h * h
        assert abs(lap + ctx.kappa**2 * g0) <= 1e-4 * abs(g0)


# ---------------------------------------------------------------- projector


def test_projector_displayed_matrices():
    assert np.array_equal(projector_angles(0.0, 0.0), G_00)
    assert np.allclose(projector_angles(math.pi / 4, math.pi / 4), G_PI4, rtol=0, atol=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, math.pi), st.floats(0, 2 * math.pi))
def test_projector_laws(theta, phi):
    P = projector_angles(theta, phi)
    xh = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
    assert np.max(np.abs(P @ P - P)) < 1e-12
    assert np.max(np.abs(P - P.T)) < 1e-12
    assert np.max(np.abs(P @ xh)) < 1e-12
    assert np.linalg.matrix_rank(P, tol=1e-10) == 2


def test_stacked_system_full_rank():
    A = np.vstack([projector_angles(0, 0), projector_angles(math.pi / 4, math.pi / 4)])
    assert np.linalg.matrix_rank(A) == 3
    assert np.linalg.svd(A, compute_uv=False).min() > 0.1
    # only v = 0 is annihilated by both
    v, *_ = np.linalg.lstsq(A, np.zeros(6), rcond=None)
    assert np.all(v == 0)


def test_projector_rejects_non_unit():
    with pytest.raises(ValueError):
        farfield_projector([1.0, 1.0, 0.0])


# ---------------------------------------------------------------- expansions


def test_expansion_j0_origin():
    ctx = WaveContext(1.5, 1.0)
    x = np.array([0.3, -1.2, 0.8])
    y = np.zeros(3)
    ref = math.sin(1.5 * np.linalg.norm(x)) / (1.5 * np.linalg.norm(x))
    assert expansion_j0(x, y, ctx, N=5) == pytest.approx(ref, rel=1e-14)


def test_expansion_j0_example():
    ctx = WaveContext(2.0, 1.0)
    x, y = np.array([2.0, 0.0, 0.0]), np.array([0.0, 0.5, 0.0])
    arg = 2 * math.sqrt(4.25)
    assert expansion_j0(x, y, ctx, N=40) == pytest.approx(math.sin(arg) / arg, abs=1e-13)


def test_expansion_requires_ordering():
    ctx = WaveContext(1.0, 1.0)
    with pytest.raises(ValueError):
        expansion_scalar_green(np.array([0.5, 0, 0]), np.array([1.0, 0, 0]), ctx)


def test_expansion_green_converges():
    ctx = WaveContext(1.0, 1.0)
    x, y = np.array([0.0, 2.0, 0.0]), np.array([0.3, 0.2, -0.4])
    ref = scalar_green(x, y, ctx)
    errs = [abs(expansion_scalar_green(x, y, ctx, N=N) - ref) / abs(ref) for N in range(4, 30, 3)]
    # empirical monotone decay once N exceeds e k |y| / 2
    above = [e for e in errs if e > 1e-14]
    assert all(b <= a for a, b in zip(above, above[1:]))
    assert errs[-1] < 1e-12
