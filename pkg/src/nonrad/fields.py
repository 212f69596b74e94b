"""
Radiated fields of a source: direct quadrature, multipole series, far-field
patterns, the Fourier transform on the wavenumber sphere, the near-field
functionals U and V and the Silver-Muller residual.

Far-field normalisation
-----------------------
Far-field patterns here are normalised like the Fourier transform of the
modified source,

    E_inf(xhat) = Ghat(xhat) int exp(-i k xhat.y) J(y) dy,

so ``E_inf(xhat) = Jcal^(k xhat)``.  The radiated field then behaves as
``E(x) ~ exp(i k|x|) / (4 pi |x|) E_inf(xhat)``; see
:func:`asymptotic_amplitude`.
"""

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .greens import farfield_projector
from .quadrature import build_sphere_rule
from .sources import eval_jcal, source_rule
from .specialfuncs import sph_harmonics_all, sph_jn_all, sph_yn_all

__all__ = [
    "FieldSample",
    "FarFieldSample",
    "ProximityError",
    "field_direct",
    "field_jacobian",
    "field_curl",
    "field_series",
    "farfield_direct",
    "farfield_series",
    "asymptotic_amplitude",
    "fourier_source_transform",
    "surface_rule",
    "nearfield_rule",
    "SurfaceField",
    "surface_field",
    "nearfield_U",
    "nearfield_V",
    "silver_muller_residual",
    "sphere_directions",
    "cube_directions",
    "field_scan_csv",
    "farfield_csv",
]

_CHUNK = 1 << 20  # source-observation pairs per kernel block


class ProximityError(ValueError):
    """Observation point too close to the source support."""


@dataclass(frozen=True)
class FieldSample:
    point: np.ndarray
    E: np.ndarray
    method: str


@dataclass(frozen=True)
class FarFieldSample:
    direction: np.ndarray
    E_inf: np.ndarray


# ---------------------------------------------------------------------------
# direct quadrature


def _as_points(x):
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    return np.atleast_2d(x), single


def _check_proximity(src, ctx, x, delta):
    delta = 0.05 * ctx.R if delta is None else delta
    dist = np.linalg.norm(x, axis=-1) - src.support_radius
    if np.any(dist < delta):
        raise ProximityError(
            f"observation point within {delta:g} of the source support "
            f"(min distance {dist.min():.3g})"
        )


def _near_factor(src, xs):
    # angular refinement of the default rule by relative gap to the support:
    # the kernel becomes nearly singular in the source angles as the gap closes
    rho = src.support_radius
    gap = (np.linalg.norm(xs, axis=-1) - rho) / rho if rho > 0 else np.full(len(xs), np.inf)
    return np.where(gap >= 0.3, 1, np.where(gap >= 0.15, 2, 4))


def _by_rule(src, ctx, rule, xs, evaluate):
    """Run ``evaluate(rule, points)``; without a rule, group points by refinement."""
    if rule is not None:
        return evaluate(rule, xs)
    factor = _near_factor(src, xs)
    out = None
    for f in np.unique(factor):
        idx = np.flatnonzero(factor == f)
        part = evaluate(source_rule(src, ctx, angular_factor=int(f)), xs[idx])
        if out is None:
            out = tuple(np.zeros((len(xs),) + a.shape[1:], dtype=a.dtype) for a in part)
        for a, b in zip(out, part):
            a[idx] = b
    return out


def _weighted_source(src, rule):
    wJ = rule.weights[:, None] * src.J(rule.nodes)
    keep = np.any(wJ != 0, axis=1)
    return rule.nodes[keep], wJ[keep]


def _kernel_block(xs, y, wJ, kappa, jacobian):
    k2 = kappa**-2
    d = [xs[:, None, a] - y[None, :, a] for a in range(3)]
    rho = np.sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2])
    inv = 1.0 / rho
    n = [c * inv for c in d]
    a = 1j * kappa - inv
    F = np.exp(1j * kappa * rho) * (inv / (4.0 * np.pi))
    F1 = F * a
    F2 = F * (a * a + inv * inv)
    B = F1 * inv
    A = F2 - B
    nJ = n[0] * wJ[:, 0] + n[1] * wJ[:, 1] + n[2] * wJ[:, 2]
    # G J = (F + k^-2 B) J + k^-2 A n (n.J)
    AnJ = A * nJ
    E = (F + k2 * B) @ wJ + k2 * np.stack([(AnJ * c).sum(axis=1) for c in n], axis=-1)
    if not jacobian:
        return E, None
    # d_k E_l = (F' + k^-2 B') n_k J_l + k^-2 [(A' - 2A/rho) n_l n_k (n.J)
    #           + (A/rho)(n_l J_k + delta_lk (n.J))]
    F3 = F * (a**3 + 3.0 * a * inv * inv - 2.0 * inv**3)
    Ar = A * inv
    A1 = F3 - F2 * inv + F1 * inv * inv
    B1 = F2 * inv - F1 * inv * inv
    c1 = F1 + k2 * B1
    q = k2 * (A1 - 2.0 * Ar) * nJ
    c3 = k2 * Ar
    D = np.empty((xs.shape[0], 3, 3), dtype=complex)
    for c in range(3):
        D[:, :, c] = (c1 * n[c]) @ wJ
    for l in range(3):
        D[:, l, :] += (c3 * n[l]) @ wJ
        for c in range(l, 3):
            v = (q * n[l] * n[c]).sum(axis=1)
            D[:, l, c] += v
            if c != l:
                D[:, c, l] += v
    diag = (c3 * nJ).sum(axis=1)
    for l in range(3):
        D[:, l, l] += diag
    return E, D


def _threads():
    try:
        return max(1, int(os.environ.get("NONRAD_THREADS", "1")))
    except ValueError:
        return 1


def _apply_kernel_numpy(x, y, wJ, kappa, jacobian):
    K = x.shape[0]
    step = max(1, _CHUNK // max(1, y.shape[0]))
    blocks = [(s, x[s: s + step]) for s in range(0, K, step)]
    E = np.zeros((K, 3), dtype=complex)
    D = np.zeros((K, 3, 3), dtype=complex) if jacobian else None

    def work(block):
        return block[0], _kernel_block(block[1], y, wJ, kappa, jacobian)

    # each block owns its output rows, so results do not depend on the thread count
    nthreads = _threads()
    if nthreads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(nthreads) as pool:
            results = list(pool.map(work, blocks))
    else:
        results = [work(b) for b in blocks]
    for s, (e, dd) in results:
        E[s: s + e.shape[0]] = e
        if jacobian:
            D[s: s + e.shape[0]] = dd
    return E, D


def _apply_kernel(x, y, wJ, kappa, jacobian, backend=None):
    """sum_y G(x, y) wJ(y), and optionally its x-Jacobian."""
    backend = backend or ("compiled" if _kernels.available else "numpy")
    x = np.ascontiguousarray(x, dtype=float)
    if backend == "compiled":
        y = np.ascontiguousarray(y, dtype=float)
        wJ = np.ascontiguousarray(wJ, dtype=complex)
        if jacobian:
            return _kernels.field_and_jacobian(x, y, wJ, float(kappa))
        return _kernels.field_only(x, y, wJ, float(kappa)), None
    if backend != "numpy":
        raise ValueError("backend must be 'compiled' or 'numpy'")
    return _apply_kernel_numpy(x, y, wJ, kappa, jacobian)


def field_direct(src, ctx, rule=None, x=None, delta=None):
    """
    E(x) = int G(x, y) J(y) dy by ball quadrature.

    Parameters
    ----------
    src : SourceSpec
    ctx : WaveContext
    rule : BallRule, optional
        Defaults to the source's rule.
    x : array_like, shape (3,) or (K, 3)
    delta : float, optional
        Minimum distance to the support ball, default 0.05 R.

    Returns
    -------
    ndarray, shape (3,) or (K, 3)

    Notes
    -----
    Without an explicit rule, points within 0.3 support radii of the support
    use the source rule with doubled angular counts, and within 0.15 with
    quadrupled counts.
    """
    xs, single = _as_points(x)
    _check_proximity(src, ctx, xs, delta)

    def evaluate(r, pts):
        y, wJ = _weighted_source(src, r)
        return _apply_kernel(pts, y, wJ, ctx.kappa, jacobian=False)[:1]

    (E,) = _by_rule(src, ctx, rule, xs, evaluate)
    return E[0] if single else E


def _fd_jacobian(src, ctx, rule, xs, delta):
    h = 1e-4 * ctx.R

    def central(step):
        cols = []
        for k in range(3):
            e = np.zeros(3)
            e[k] = step
            pts = np.concatenate([xs + e, xs - e])
            vals = field_direct(src, ctx, rule, pts, delta=delta)
            cols.append((vals[: len(xs)] - vals[len(xs):]) / (2.0 * step))
        return np.stack(cols, axis=-1)

    return (4.0 * central(0.5 * h) - central(h)) / 3.0


def field_jacobian(src, ctx, rule=None, x=None, method="analytic", delta=None):
    """
    Jacobian D[..., l, k] = d E_l / d x_k of the direct field.

    ``method="analytic"`` differentiates the kernel in closed form;
    ``method="fd"`` uses Richardson-extrapolated central differences of
    :func:`field_direct` with step 1e-4 R.

    Returns
    -------
    E, D : field values (K, 3) and Jacobians (K, 3, 3) (leading axis dropped
        for a single point)
    """
    xs, single = _as_points(x)
    _check_proximity(src, ctx, xs, delta)
    if method not in ("analytic", "fd"):
        raise ValueError("method must be 'analytic' or 'fd'")

    def evaluate(r, pts):
        if method == "analytic":
            y, wJ = _weighted_source(src, r)
            return _apply_kernel(pts, y, wJ, ctx.kappa, jacobian=True)
        return field_direct(src, ctx, r, pts, delta=delta), _fd_jacobian(src, ctx, r, pts, delta)

    E, D = _by_rule(src, ctx, rule, xs, evaluate)
    return (E[0], D[0]) if single else (E, D)


def _curl(D):
    return np.stack(
        [D[..., 2, 1] - D[..., 1, 2], D[..., 0, 2] - D[..., 2, 0], D[..., 1, 0] - D[..., 0, 1]],
        axis=-1,
    )


def field_curl(src, ctx, rule=None, x=None, method="analytic"):
    """curl E at the given exterior points."""
    _, D = field_jacobian(src, ctx, rule, x, method=method)
    return _curl(D)


# ---------------------------------------------------------------------------
# series


def field_series(coeffs, ctx, x):
    """
    E(x) = i k sum_{n,m} h_n(k|x|) Y_n^m(xhat) beta_n^m for |x| > R.
    """
    xs, single = _as_points(x)
    r = np.linalg.norm(xs, axis=-1)
    if np.any(r <= ctx.R):
        raise ValueError("the multipole series needs |x| > R")
    N = coeffs.N
    theta = np.arccos(np.clip(xs[:, 2] / r, -1.0, 1.0))
    phi = np.arctan2(xs[:, 1], xs[:, 0])
    kr = ctx.kappa * r
    h = sph_jn_all(N, kr) + 1j * sph_yn_all(N, kr)
    Y = sph_harmonics_all(N, theta, phi)
    radial = np.repeat(h, [2 * n + 1 for n in range(N + 1)], axis=0)
    E = 1j * ctx.kappa * np.einsum("lk,lk,la->ka", radial, Y, coeffs.beta)
    return E[0] if single else E


# ---------------------------------------------------------------------------
# far field and Fourier transform


def farfield_direct(src, ctx, rule=None, xhat=None):
    """E_inf(xhat) = Ghat(xhat) int exp(-i k xhat.y) J(y) dy."""
    xh, single = _as_points(xhat)
    P = farfield_projector(xh)
    rule = rule or source_rule(src, ctx)
    phase = np.exp(-1j * ctx.kappa * (xh @ rule.nodes.T))
    Jhat = (phase * rule.weights) @ src.J(rule.nodes)
    out = np.einsum("kab,kb->ka", P, Jhat)
    return out[0] if single else out


def farfield_series(coeffs, xhat, variant="eta"):
    """
    Far-field pattern from multipole coefficients.

    variant
        ``"eta"``: 4 pi sum (-i)^n (alpha + eta) Y_n^m(xhat)  (needs eta);
        ``"projector"``: Ghat(xhat) 4 pi sum (-i)^n alpha Y_n^m(xhat);
        ``"beta"``: 4 pi sum (-i)^n beta Y_n^m(xhat).
    """
    xh, single = _as_points(xhat)
    P = farfield_projector(xh)
    N = coeffs.N
    if variant == "eta":
        if coeffs.eta is None:
            raise ValueError("eta coefficients are not available for this source")
        c = coeffs.alpha + coeffs.eta
    elif variant == "projector":
        c = coeffs.alpha
    elif variant == "beta":
        c = coeffs.beta
    else:
        raise ValueError("variant must be 'eta', 'projector' or 'beta'")
    r = np.linalg.norm(xh, axis=-1)
    theta = np.arccos(np.clip(xh[:, 2] / r, -1.0, 1.0))
    phi = np.arctan2(xh[:, 1], xh[:, 0])
    Y = sph_harmonics_all(N, theta, phi)
    ph = np.repeat([(-1j) ** n for n in range(N + 1)], [2 * n + 1 for n in range(N + 1)])
    out = 4.0 * np.pi * np.einsum("l,lk,la->ka", ph, Y, c)
    if variant == "projector":
        out = np.einsum("kab,kb->ka", P, out)
    return out[0] if single else out


def asymptotic_amplitude(src, ctx, rule, x):
    """4 pi |x| exp(-i k |x|) E(x), which tends to E_inf(xhat)."""
    xs, single = _as_points(x)
    r = np.linalg.norm(xs, axis=-1)
    E = field_direct(src, ctx, rule, xs)
    out = (4.0 * np.pi * r * np.exp(-1j * ctx.kappa * r))[:, None] * E
    return out[0] if single else out


def _check_xi(ctx, xi):
    if np.any(np.abs(np.linalg.norm(xi, axis=-1) - ctx.kappa) > 1e-10):
        raise ValueError("xi must lie on the wavenumber sphere |xi| = kappa")


def fourier_source_transform(src, ctx, rule=None, xi=None):
    """Jcal^(xi) = int Jcal(y) exp(-i xi.y) dy for |xi| = kappa."""
    xis, single = _as_points(xi)
    _check_xi(ctx, xis)
    rule = rule or source_rule(src, ctx)
    vals = eval_jcal(src, rule.nodes)
    phase = np.exp(-1j * (xis @ rule.nodes.T))
    out = (phase * rule.weights) @ vals
    return out[0] if single else out


# ---------------------------------------------------------------------------
# near-field functionals


def surface_rule(ctx, Rprime=None, counts=None):
    """Sphere rule of radius R' (default 1.25 R) sized for degree N."""
    Rprime = 1.25 * ctx.R if Rprime is None else Rprime
    if Rprime <= ctx.R:
        raise ValueError("the evaluation sphere must enclose the ball: R' > R")
    if counts is None:
        # azimuthal grid matches the default ball rule so surface sums can use FFTs
        counts = (ctx.N + int(math.ceil(2.0 * ctx.kappa * Rprime)) + 8, 2 * ctx.N + 8)
    return build_sphere_rule(Rprime, *counts)


def nearfield_rule(src, ctx, Rprime=None, factor=1):
    """
    Source rule for fields on the sphere of radius R' (default 1.25 R).

    When the support comes within 0.4 R' of the sphere the kernel is close
    to singular in the source angles, so both angular counts are doubled.
    """
    Rprime = 1.25 * ctx.R if Rprime is None else Rprime
    angular = 2 if src.support_radius > 0.6 * Rprime else 1
    return source_rule(src, ctx, factor=factor, angular_factor=angular)


@dataclass(frozen=True)
class SurfaceField:
    surface: object
    E: np.ndarray
    D: np.ndarray


def _kernel_tensors(x0, y, kappa):
    """G[m, l, b] and dG[m, l, b, c] = d_c G_lb for one observation point."""
    k2 = kappa**-2
    d = x0 - y
    rho = np.linalg.norm(d, axis=-1)
    inv = 1.0 / rho
    n = d * inv[:, None]
    a = 1j * kappa - inv
    F = np.exp(1j * kappa * rho) * (inv / (4.0 * np.pi))
    F1 = F * a
    F2 = F * (a * a + inv * inv)
    F3 = F * (a**3 + 3.0 * a * inv * inv - 2.0 * inv**3)
    B = F1 * inv
    A = F2 - B
    Ar = A * inv
    A1 = F3 - F2 * inv + F1 * inv * inv
    B1 = F2 * inv - F1 * inv * inv
    eye = np.eye(3)
    nn = n[:, :, None] * n[:, None, :]
    G = (F + k2 * B)[:, None, None] * eye + (k2 * A)[:, None, None] * nn
    nnn = nn[:, :, :, None] * n[:, None, None, :]
    dG = (
        ((F1 + k2 * B1)[:, None, None, None] * eye[None, :, :, None]) * n[:, None, None, :]
        + (k2 * (A1 - 2.0 * Ar))[:, None, None, None] * nnn
        + (k2 * Ar)[:, None, None, None]
        * (eye[None, :, None, :] * n[:, None, :, None] + eye[None, None, :, :] * n[:, :, None, None])
    )
    return G, dG


def _rotations(phi):
    c, s = np.cos(phi), np.sin(phi)
    Rm = np.zeros(phi.shape + (3, 3))
    Rm[..., 0, 0] = c
    Rm[..., 0, 1] = -s
    Rm[..., 1, 0] = s
    Rm[..., 1, 1] = c
    Rm[..., 2, 2] = 1.0
    return Rm


def _rotational_compatible(surface, rule):
    P, S = rule.phi.size, surface.phi.size
    return P % S == 0 and np.allclose(surface.phi, rule.phi[:: P // S], atol=1e-14)


def _surface_field_rotational(src, ctx, surface, rule):
    # x_k = Rot(phi_k) x0 and the source grid is invariant under Rot(phi_k), so
    # E(x_k) = Rot_k sum_j G(x0, y_j) Rot_j W(j + k) with W the source in
    # cylindrical components: a cyclic correlation in the azimuthal index.
    npz = rule.phi.size
    ys = rule.nodes.reshape(-1, npz, 3)
    W = (rule.weights[:, None] * src.J(rule.nodes)).reshape(-1, npz, 3)
    keep = np.any(W != 0, axis=(1, 2))
    ys, W = ys[keep], W[keep]
    Rphi = _rotations(rule.phi)  # (j, 3, 3)
    Wc = np.einsum("jba,Qjb->Qja", Rphi, W)  # Rot_j^T J
    FW = np.fft.fft(Wc, axis=1)
    stride = npz // surface.phi.size
    Et = np.empty((surface.theta.size, surface.phi.size, 3), dtype=complex)
    Dt = np.empty((surface.theta.size, surface.phi.size, 3, 3), dtype=complex)
    ys = np.ascontiguousarray(ys)
    cphi, sphi = np.cos(rule.phi), np.sin(rule.phi)
    for t, th in enumerate(surface.theta):
        x0 = surface.radius * np.array([np.sin(th), 0.0, np.cos(th)])
        if _kernels.available:
            KG, KD = _kernels.rotated_kernels(x0, ys, cphi, sphi, float(ctx.kappa))
        else:  # pragma: no cover
            G, dG = _kernel_tensors(x0, ys.reshape(-1, 3), ctx.kappa)
            KG = np.einsum("Qjlb,jbe->Qjle", G.reshape(ys.shape[:2] + (3, 3)), Rphi)
            KD = np.einsum("Qjlbc,jbe->Qjlce", dG.reshape(ys.shape[:2] + (3, 3, 3)), Rphi)
        AG = npz * np.fft.ifft(KG, axis=1)
        AD = npz * np.fft.ifft(KD, axis=1)
        CG, CD = _kernels.freq_contract(AG, AD, FW)
        # surface azimuth k sits `stride` source steps further round
        Et[t] = np.fft.ifft(CG, axis=0)[::stride]
        Dt[t] = np.fft.ifft(CD, axis=0)[::stride]
    Rk = _rotations(surface.phi)
    E = np.einsum("kab,tkb->tka", Rk, Et)
    D = np.einsum("kab,tkbc,kdc->tkad", Rk, Dt, Rk)
    return E.reshape(-1, 3), D.reshape(-1, 3, 3)


def surface_field(src, ctx, surface, rule=None, method="analytic"):
    """
    E and its Jacobian on the nodes of a sphere rule (reusable across xi).

    When the sphere rule and the ball rule share their azimuthal grid the
    sums are reduced with FFTs over the azimuthal index; otherwise every
    node pair is summed directly.
    """
    if surface.radius <= ctx.R:
        raise ValueError("the evaluation sphere must enclose the ball: R' > R")
    rule = rule or nearfield_rule(src, ctx)
    if method == "analytic" and _rotational_compatible(surface, rule):
        _check_proximity(src, ctx, surface.nodes, None)
        E, D = _surface_field_rotational(src, ctx, surface, rule)
    else:
        E, D = field_jacobian(src, ctx, rule, surface.nodes, method=method)
    return SurfaceField(surface, E, D)


def _surface_data(src, ctx, surface, rule, cache):
    if cache is not None:
        return cache
    return surface_field(src, ctx, surface, rule)


def nearfield_U(src, ctx, surface, xi, rule=None, cache=None):
    """
    U(xi) = int_S [n x curl E + i xi x (n x E) - i xi (n.E)] exp(-i xi.y) ds.

    Equals Jcal^(xi) for |xi| = kappa whenever S encloses the support.
    """
    xis, single = _as_points(xi)
    _check_xi(ctx, xis)
    sf = _surface_data(src, ctx, surface, rule, cache)
    n, E = surface.normals, sf.E
    ncurl = np.cross(n, _curl(sf.D))
    nxE = np.cross(n, E)
    nE = np.einsum("sa,sa->s", n, E)
    phase = np.exp(-1j * (xis @ surface.nodes.T)) * surface.weights
    t1 = phase @ ncurl
    t2 = 1j * np.cross(xis, phase @ nxE)
    t3 = -1j * xis * (phase @ nE)[:, None]
    out = t1 + t2 + t3
    return out[0] if single else out


def nearfield_V(src, ctx, surface, xi, rule=None, cache=None):
    """
    V(xi) = -int_S [(i xi.n) E + (grad E) n] exp(-i xi.y) ds.

    Equals Jcal^(xi) for |xi| = kappa whenever S encloses the support.
    """
    xis, single = _as_points(xi)
    _check_xi(ctx, xis)
    sf = _surface_data(src, ctx, surface, rule, cache)
    n = surface.normals
    dn = np.einsum("slk,sk->sl", sf.D, n)
    phase = np.exp(-1j * (xis @ surface.nodes.T)) * surface.weights
    xin = xis @ n.T  # (K, S)
    out = -(1j * (phase * xin) @ sf.E + phase @ dn)
    return out[0] if single else out


# ---------------------------------------------------------------------------
# radiation condition


def sphere_directions(n_dirs):
    """Quasi-uniform unit vectors on a Fibonacci lattice."""
    if n_dirs < 1:
        raise ValueError("need at least one direction")
    i = np.arange(n_dirs) + 0.5
    z = 1.0 - 2.0 * i / n_dirs
    phi = math.pi * (1.0 + 5.0**0.5) * i
    s = np.sqrt(1.0 - z * z)
    return np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=-1)


def cube_directions():
    """The 26 unit vectors through the vertices, edge and face midpoints of a cube."""
    pts = [(a, b, c) for a in (-1, 0, 1) for b in (-1, 0, 1) for c in (-1, 0, 1) if (a, b, c) != (0, 0, 0)]
    pts = np.array(pts, dtype=float)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def silver_muller_residual(src, ctx, rule=None, r=None, n_dirs=26, method="analytic"):
    """max over directions of |curl E(x) x x - i k |x| E(x)| on |x| = r."""
    if r is None or r <= src.support_radius + 0.05 * ctx.R:
        raise ProximityError("radius must exceed the support by at least 0.05 R")
    x = r * sphere_directions(n_dirs)
    E, D = field_jacobian(src, ctx, rule, x, method=method)
    res = np.cross(_curl(D), x) - 1j * ctx.kappa * r * E
    return float(np.max(np.linalg.norm(res, axis=-1)))


# ---------------------------------------------------------------------------
# CSV


def _fmt(v):
    return format(float(v) + 0.0, ".17g")  # no negative zeros


def field_scan_csv(points, E, method):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x1", "x2", "x3", "ReE1", "ImE1", "ReE2", "ImE2", "ReE3", "ImE3", "method"])
    for p, e in zip(np.atleast_2d(points), np.atleast_2d(E)):
        row = [_fmt(c) for c in p]
        for c in e:
            row += [_fmt(c.real), _fmt(c.imag)]
        w.writerow(row + [method])
    return buf.getvalue()


def farfield_csv(theta, phi, E_inf):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["theta", "phi", "ReE1", "ImE1", "ReE2", "ImE2", "ReE3", "ImE3"])
    for t, p, e in zip(np.ravel(theta), np.ravel(phi), np.atleast_2d(E_inf)):
        row = [_fmt(t), _fmt(p)]
        for c in e:
            row += [_fmt(c.real), _fmt(c.imag)]
        w.writerow(row)
    return buf.getvalue()

