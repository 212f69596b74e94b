import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from nonrad.quadrature import BallRule, build_ball_rule, build_sphere_rule, default_counts, integrate
from nonrad.specialfuncs import sph_harmonic, sph_jn_all


def _angles(p):
    r = np.linalg.norm(p, axis=-1)
    return r, np.arccos(np.clip(p[:, 2] / r, -1, 1)), np.arctan2(p[:, 1], p[:, 0])


def test_ball_volume():
    rule = build_ball_rule(1.0, 8, 6, 12)
    assert integrate(rule, lambda y: np.ones(len(y))).real == pytest.approx(4 * math.pi / 3, rel=1e-14)


def test_y10_mean_zero():
    rule = build_ball_rule(1.0, 8, 6, 12)

    def f(y):
        _, th, ph = _angles(y)
        return sph_harmonic(1, 0, th, ph)

    assert abs(integrate(rule, f)) < 1e-15


def test_j0_ball_integral():
    exact = 4 * math.pi * (math.sin(1) - math.cos(1))
    oracle = 4 * math.pi * quad(lambda r: math.sin(r) / r * r * r, 0, 1, epsabs=1e-14)[0]
    assert oracle == pytest.approx(exact, rel=1e-13)
    rule = build_ball_rule(1.0, 16, 8, 16)
    val = integrate(rule, lambda y: sph_jn_all(0, np.linalg.norm(y, axis=1))[0])
    assert val.real == pytest.approx(exact, rel=1e-13)
    assert val.real == pytest.approx(3.7845972369939314, rel=1e-13)


def test_sphere_area():
    rule = build_sphere_rule(1.0, 4, 8)
    assert integrate(rule, lambda y: np.ones(len(y))).real == pytest.approx(4 * math.pi, rel=1e-14)
    rule2 = build_sphere_rule(2.5, 4, 8)
    assert integrate(rule2, lambda y: np.ones(len(y))).real == pytest.approx(4 * math.pi * 6.25, rel=1e-14)


def test_sphere_normals_are_unit_outward():
    rule = build_sphere_rule(1.7, 5, 10)
    assert np.allclose(np.linalg.norm(rule.normals, axis=1), 1.0)
    assert np.allclose(rule.nodes, 1.7 * rule.normals)


def test_azimuth_grid_starts_at_zero():
    rule = build_ball_rule(1.0, 3, 3, 7)
    assert rule.phi[0] == 0.0
    assert np.allclose(np.diff(rule.phi), 2 * math.pi / 7)


@settings(max_examples=15, deadline=None)
@given(n=st.integers(0, 10), data=st.data(), kappa=st.floats(0.5, 3.0))
def test_degree_exactness(n, data, kappa):
    m = data.draw(st.integers(-n, n))
    rule = build_ball_rule(1.0, 32, 24, 48)

    def f(y):
        r, th, ph = _angles(y)
        Y = sph_harmonic(n, m, th, ph)
        return sph_jn_all(n, kappa * r)[n] * Y * np.conj(Y)

    radial = quad(lambda r: sph_jn_all(n, kappa * r)[n] * r * r, 0, 1, epsabs=1e-15, epsrel=1e-13)[0]
    val = integrate(rule, f)
    assert abs(val - radial) <= 1e-10 * max(abs(radial), 1e-12)


def test_refinement_converged():
    rule = build_ball_rule(1.0, 20, 16, 32)

    def f(y):
        return np.exp(1j * 1.3 * y[:, 0]) * np.cos(y[:, 2]) * (1 + y[:, 1] ** 2)

    a = integrate(rule, f)
    b = integrate(rule.refined(), f)
    assert abs(a - b) <= 1e-10 * abs(b)


def test_permutation_invariance():
    rule = build_ball_rule(1.0, 10, 8, 16)
    rng = np.random.default_rng(7)
    perm = rng.permutation(len(rule.weights))
    shuffled = BallRule(rule.radius, rule.r, rule.r_weights, rule.theta, rule.theta_weights,
                        rule.phi, rule.phi_weights, rule.nodes[perm], rule.weights[perm])

    def f(y):
        return np.exp(1j * y @ np.array([0.3, -1.1, 0.7])) * (1 + y[:, 0])

    assert integrate(rule, f) == integrate(shuffled, f)


def test_vector_integrand():
    rule = build_ball_rule(1.0, 6, 6, 12)
    out = integrate(rule, lambda y: np.stack([np.ones(len(y)), y[:, 0] ** 2], axis=1))
    assert out.shape == (2,)
    assert out[1].real == pytest.approx(4 * math.pi / 15, rel=1e-13)


def test_default_counts():
    assert default_counts(1.0, 1.0, 20) == (18, 28, 48)
    assert default_counts(math.pi, 1.0, 19) == (23, 27, 46)


@pytest.mark.parametrize("counts", [(0, 4, 4), (4, 2.5, 4), (4, 4, -1)])
def test_bad_counts(counts):
    with pytest.raises(ValueError):
        build_ball_rule(1.0, *counts)


def test_bad_radius():
    with pytest.raises(ValueError):
        build_sphere_rule(0.0, 4, 4)
    with pytest.raises(ValueError):
        build_ball_rule(-1.0, 4, 4, 4)
