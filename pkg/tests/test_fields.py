import csv
import io
import math

import numpy as np
import pytest

from nonrad import _kernels
from nonrad.classify import default_points
from nonrad.fields import (
    ProximityError,
    _apply_kernel,
    asymptotic_amplitude,
    cube_directions,
    farfield_csv,
    farfield_direct,
    farfield_series,
    field_curl,
    field_direct,
    field_jacobian,
    field_scan_csv,
    field_series,
    fourier_source_transform,
    nearfield_U,
    nearfield_V,
    nearfield_rule,
    silver_muller_residual,
    sphere_directions,
    surface_field,
    surface_rule,
)
from nonrad.greens import WaveContext, dyadic_green, farfield_projector
from nonrad.multipole import coeff_table
from nonrad.quadrature import build_sphere_rule
from nonrad.sources import curl_source, dipole_ball_source, source_rule, source_scale, zero_source

CTX1 = WaveContext(1.0, 1.0)


def exterior_points(rng, n, rmin, rmax):
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * rng.uniform(rmin, rmax, n)[:, None]


@pytest.fixture(scope="module")
def dipole():
    return dipole_ball_source(CTX1, p=(0.3, -0.5, 1.0), rho=0.5)


@pytest.fixture(scope="module")
def dipole_surface(dipole):
    surf = surface_rule(CTX1)
    return surf, surface_field(dipole, CTX1, surf, nearfield_rule(dipole, CTX1, surf.radius))


# ---------------------------------------------------------------- zero source


def test_zero_source_fields():
    src = zero_source(CTX1)
    x = exterior_points(np.random.default_rng(0), 5, 1.5, 3)
    xi = cube_directions()[:4]
    surf = surface_rule(CTX1)
    assert np.all(field_direct(src, CTX1, None, x) == 0)
    assert np.all(farfield_direct(src, CTX1, None, xi) == 0)
    assert np.all(fourier_source_transform(src, CTX1, None, xi) == 0)
    assert np.all(nearfield_U(src, CTX1, surf, xi) == 0)
    assert np.all(nearfield_V(src, CTX1, surf, xi) == 0)
    t = coeff_table(src, CTX1)
    assert np.all(field_series(t, CTX1, x) == 0)
    assert np.all(farfield_series(t, xi, variant="beta") == 0)


# ---------------------------------------------------------------- direct field


def test_direct_matches_pointwise_dyadic(dipole):
    rule = source_rule(dipole, CTX1, counts=(12, 8, 12))
    x = np.array([1.2, -0.7, 1.9])
    ref = sum(w * dyadic_green(x, y, CTX1) @ dipole.J(y) for y, w in zip(rule.nodes, rule.weights))
    assert np.allclose(field_direct(dipole, CTX1, rule, x), ref, rtol=1e-13, atol=1e-17)


def test_series_matches_direct_at_two_R(dipole):
    x = 2.0 * cube_directions()
    E_direct = field_direct(dipole, CTX1, None, x)
    E_series = field_series(coeff_table(dipole, CTX1.with_degree(20)), CTX1, x)
    assert np.max(np.linalg.norm(E_direct, axis=1)) > 1e-3
    assert np.max(np.abs(E_series - E_direct)) <= 1e-6 * np.max(np.abs(E_direct))


@pytest.mark.parametrize("make", [dipole_ball_source, curl_source])
def test_series_vs_direct_random(make):
    src = make(CTX1, p=(0.1, 0.4, 1.0))
    x = exterior_points(np.random.default_rng(3), 20, 1.1, 4.0)
    E_d = field_direct(src, CTX1, None, x)
    E_s = field_series(coeff_table(src, CTX1), CTX1, x)
    assert np.max(np.linalg.norm(E_s - E_d, axis=1) / np.linalg.norm(E_d, axis=1)) <= 1e-6


def test_proximity_guard(dipole):
    with pytest.raises(ProximityError):
        field_direct(dipole, CTX1, None, np.array([0.52, 0.0, 0.0]))
    field_direct(dipole, CTX1, None, np.array([0.56, 0.0, 0.0]))
    with pytest.raises(ValueError):
        field_series(coeff_table(dipole, CTX1), CTX1, np.array([0.9, 0.0, 0.0]))


def test_compiled_and_numpy_kernels_agree(dipole, monkeypatch):
    if not _kernels.available:
        pytest.skip("numba unavailable")
    rule = source_rule(dipole, CTX1)
    wJ = rule.weights[:, None] * dipole.J(rule.nodes)
    x = exterior_points(np.random.default_rng(5), 7, 0.8, 3.0)
    Ec, Dc = _apply_kernel(x, rule.nodes, wJ, 1.0, True, backend="compiled")
    En, Dn = _apply_kernel(x, rule.nodes, wJ, 1.0, True, backend="numpy")
    assert np.max(np.abs(Ec - En)) <= 1e-13 * np.max(np.abs(En))
    assert np.max(np.abs(Dc - Dn)) <= 1e-13 * np.max(np.abs(Dn))
    monkeypatch.setenv("NONRAD_THREADS", "3")
    E3, D3 = _apply_kernel(x, rule.nodes, wJ, 1.0, True, backend="numpy")
    assert np.array_equal(E3, En) and np.array_equal(D3, Dn)
    with pytest.raises(ValueError):
        _apply_kernel(x, rule.nodes, wJ, 1.0, False, backend="gpu")


def test_analytic_jacobian_vs_fd(dipole):
    x = exterior_points(np.random.default_rng(6), 6, 0.8, 2.5)
    E1, D1 = field_jacobian(dipole, CTX1, None, x)
    E2, D2 = field_jacobian(dipole, CTX1, None, x, method="fd")
    assert np.array_equal(E1, E2) or np.allclose(E1, E2, rtol=1e-14)
    assert np.max(np.abs(D1 - D2)) <= 1e-8 * np.max(np.abs(D1))
    with pytest.raises(ValueError):
        field_jacobian(dipole, CTX1, None, x, method="spectral")


@pytest.mark.parametrize("kind", ["curlcurl", "gradient", "bessel_pair", "bessel_single", "dipole_ball"])
def test_exterior_divergence_free(builtin, kind):
    ctx, src = builtin[kind]
    x = default_points(ctx.R)
    E, D = field_jacobian(src, ctx, None, x)
    div = np.trace(D, axis1=1, axis2=2)
    scale = max(np.max(np.linalg.norm(E, axis=1)), source_scale(src) * 1e-8)
    assert np.max(np.abs(div)) <= 1e-5 * scale


def test_exterior_divergence_fd_oracle(dipole):
    x = 1.5 * cube_directions()[:6]
    _, D = field_jacobian(dipole, CTX1, None, x, method="fd")
    E = field_direct(dipole, CTX1, None, x)
    assert np.max(np.abs(np.trace(D, axis1=1, axis2=2))) <= 1e-5 * np.max(np.abs(E))


def test_exterior_maxwell_equation(dipole):
    # curl curl E = k^2 E outside the support
    x = np.array([[1.3, 0.2, -0.4], [0.0, 1.6, 0.9]])
    h = 1e-3
    cc = []
    for e in np.eye(3):
        cp = field_curl(dipole, CTX1, None, x + h * e)
        cm = field_curl(dipole, CTX1, None, x - h * e)
        cc.append((cp - cm) / (2 * h))
    Dc = np.stack(cc, axis=-1)  # d curl_l / d x_k
    curlcurl = np.stack([Dc[:, 2, 1] - Dc[:, 1, 2], Dc[:, 0, 2] - Dc[:, 2, 0], Dc[:, 1, 0] - Dc[:, 0, 1]], axis=-1)
    E = field_direct(dipole, CTX1, None, x)
    assert np.max(np.abs(curlcurl - E)) <= 1e-5 * np.max(np.abs(E))


# ---------------------------------------------------------------- far field


def test_farfield_transversal(dipole):
    dirs = sphere_directions(50)
    Einf = farfield_direct(dipole, CTX1, None, dirs)
    dots = np.abs(np.einsum("ka,ka->k", Einf, dirs))
    assert np.all(dots <= 1e-12 * np.linalg.norm(Einf, axis=1))


def test_farfield_series_variants_agree(dipole):
    dirs = sphere_directions(30)
    t = coeff_table(dipole, CTX1)
    ref = farfield_direct(dipole, CTX1, None, dirs)
    for variant in ("eta", "projector", "beta"):
        out = farfield_series(t, dirs, variant=variant)
        assert np.max(np.abs(out - ref)) <= 1e-10 * np.max(np.abs(ref)), variant
    with pytest.raises(ValueError):
        farfield_series(t, dirs, variant="gamma")


def test_farfield_equals_fourier_on_sphere(dipole):
    dirs = sphere_directions(20)
    Einf = farfield_direct(dipole, CTX1, None, dirs)
    Jhat = fourier_source_transform(dipole, CTX1, None, CTX1.kappa * dirs)
    # grad div J contributes only along xi, so the transverse parts coincide and Jcal^ is transverse
    assert np.max(np.abs(Einf - Jhat)) <= 1e-10 * np.max(np.abs(Einf))
    proj = np.einsum("kab,kb->ka", farfield_projector(dirs), Jhat)
    assert np.max(np.abs(proj - Jhat)) <= 1e-10 * np.max(np.abs(Jhat))


def test_curlcurl_farfield_vanishes(builtin, tables):
    ctx, src = builtin["curlcurl"]
    t, scale = tables["curlcurl"]
    dirs = sphere_directions(26)
    for variant in ("eta", "projector"):
        assert np.max(np.abs(farfield_series(t, dirs, variant=variant))) <= 1e-6 * scale


def test_asymptotic_amplitude_converges(dipole):
    xh = np.array([0.6, 0.0, 0.8])
    Einf = farfield_direct(dipole, CTX1, None, xh)
    errs = [np.linalg.norm(asymptotic_amplitude(dipole, CTX1, None, r * xh) - Einf) for r in (50, 100, 200, 400)]
    ratios = np.array(errs[1:]) / np.array(errs[:-1])
    assert np.all(np.abs(ratios - 0.5) <= 0.1)


def test_fourier_xi_checked(dipole):
    with pytest.raises(ValueError):
        fourier_source_transform(dipole, CTX1, None, np.array([2.0, 0.0, 0.0]))


# ---------------------------------------------------------------- near field


def test_surface_rule_defaults():
    surf = surface_rule(CTX1)
    assert surf.radius == 1.25
    with pytest.raises(ValueError):
        surface_rule(CTX1, 1.0)


def test_rotational_surface_field_matches_direct(dipole, dipole_surface):
    surf, sf = dipole_surface
    rule = nearfield_rule(dipole, CTX1, surf.radius)
    idx = np.arange(0, len(surf.nodes), 37)
    E, D = field_jacobian(dipole, CTX1, rule, surf.nodes[idx])
    assert np.max(np.abs(sf.E[idx] - E)) <= 1e-12 * np.max(np.abs(E))
    assert np.max(np.abs(sf.D[idx] - D)) <= 1e-12 * np.max(np.abs(D))


def test_surface_field_direct_fallback(dipole):
    # an azimuth count that does not divide the source grid forces the pair sum
    surf = build_sphere_rule(1.25, 10, 7)
    rule = source_rule(dipole, CTX1, counts=(40, 12, 24))
    sf = surface_field(dipole, CTX1, surf, rule)
    E, D = field_jacobian(dipole, CTX1, rule, surf.nodes)
    assert np.array_equal(sf.E, E) and np.array_equal(sf.D, D)


def test_near_field_identities(dipole, dipole_surface):
    surf, sf = dipole_surface
    xi = CTX1.kappa * cube_directions()[:12]
    Jhat = fourier_source_transform(dipole, CTX1, None, xi)
    U = nearfield_U(dipole, CTX1, surf, xi, cache=sf)
    V = nearfield_V(dipole, CTX1, surf, xi, cache=sf)
    norms = np.linalg.norm(Jhat, axis=1)
    assert np.all(np.linalg.norm(U - Jhat, axis=1) <= 1e-6 * norms)
    assert np.all(np.linalg.norm(V - Jhat, axis=1) <= 1e-6 * norms)


def test_near_field_independent_of_radius(dipole):
    xi = np.array([[0.0, 0.6, 0.8]])
    vals = []
    for Rp in (1.25, 1.6):
        surf = surface_rule(CTX1, Rp)
        vals.append(nearfield_V(dipole, CTX1, surf, xi, rule=nearfield_rule(dipole, CTX1, Rp)))
    assert np.max(np.abs(vals[0] - vals[1])) <= 1e-7 * np.max(np.abs(vals[0]))


def test_silver_muller_decay(dipole):
    r1 = silver_muller_residual(dipole, CTX1, None, 20.0)
    r2 = silver_muller_residual(dipole, CTX1, None, 40.0)
    assert 0.3 <= r2 / r1 <= 0.7
    with pytest.raises(ProximityError):
        silver_muller_residual(dipole, CTX1, None, 0.5)


def test_direction_sets():
    assert cube_directions().shape == (26, 3)
    assert np.allclose(np.linalg.norm(sphere_directions(40), axis=1), 1.0)
    assert len({tuple(np.round(v, 12)) for v in cube_directions()}) == 26


# ---------------------------------------------------------------- CSV


def test_field_scan_csv_schema(dipole):
    x = 2.0 * cube_directions()[:3]
    E = field_direct(dipole, CTX1, None, x)
    rows = list(csv.reader(io.StringIO(field_scan_csv(x, E, "direct"))))
    assert rows[0] == ["x1", "x2", "x3", "ReE1", "ImE1", "ReE2", "ImE2", "ReE3", "ImE3", "method"]
    assert len(rows) == 4 and rows[1][-1] == "direct"
    vals = np.array([float(v) for v in rows[1][3:9]])
    assert np.array_equal(vals[::2] + 1j * vals[1::2], E[0])


def test_farfield_csv_schema():
    E = np.array([[1 + 2j, -0.0 + 0j, 3j]])
    text = farfield_csv([0.5], [math.pi], E)
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["theta", "phi", "ReE1", "ImE1", "ReE2", "ImE2", "ReE3", "ImE3"]
    assert rows[1][3] == "2" and rows[1][4] == "0"
    assert float(rows[1][1]) == math.pi


def test_direct_refines_near_support(builtin, tables):
    # the Bessel pair fills the whole ball and radiates nothing, so |E| is pure quadrature error
    ctx, src = builtin["bessel_pair"]
    _, scale = tables["bessel_pair"]
    d = np.array([1.0, 0.3, 0.2]) / np.linalg.norm([1.0, 0.3, 0.2])
    x = np.array([1.06 * d, 1.2 * d, 2.0 * d])
    coarse = np.linalg.norm(field_direct(src, ctx, source_rule(src, ctx), x), axis=1) / scale
    auto = np.linalg.norm(field_direct(src, ctx, None, x), axis=1) / scale
    assert coarse[0] > 1e-6
    assert np.all(auto <= 1e-9)
    E, D = field_jacobian(src, ctx, None, x)
    assert np.array_equal(E, field_direct(src, ctx, None, x))
