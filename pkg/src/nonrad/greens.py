"""
Scalar and dyadic Green's kernels of the time-harmonic Maxwell system.

    g(x, y) = exp(i k |x-y|) / (4 pi |x-y|)
    G(x, y) = (I + k^-2 grad grad) g(x, y)

All kernels are written in terms of a radial profile F(rho), rho = |x - y|,
and the unit vector n = (x - y) / rho, using

    d_i F           = F' n_i
    d_i d_j F       = A n_i n_j + B delta_ij,    A = F'' - F'/rho,  B = F'/rho
    d_k d_i d_j F   = A' n_i n_j n_k + (A/rho)(delta_ik n_j + delta_jk n_i
                      - 2 n_i n_j n_k) + B' n_k delta_ij

with derivatives taken in x.  Functions broadcast over leading axes of the
point arrays.
"""

import math
from dataclasses import dataclass

import numpy as np

from .specialfuncs import lm_index, sph_harmonics_all, sph_jn_all, sph_yn_all

__all__ = [
    "WaveContext",
    "default_degree",
    "scalar_green",
    "grad_scalar_green",
    "dyadic_green",
    "farfield_projector",
    "projector_angles",
    "expansion_scalar_green",
    "expansion_j0",
    "green_profile",
    "j0_profile",
    "radial_hessian",
]


def default_degree(kappa, R):
    """Truncation degree ceil(kR) + ceil(4 (kR)^(1/3)) + 10."""
    kr = kappa * R
    return int(math.ceil(kr) + math.ceil(4.0 * kr ** (1.0 / 3.0)) + 10)


@dataclass(frozen=True)
class WaveContext:
    """
    Wavenumber, support-ball radius, truncation degree and threshold.

    ``N`` defaults to :func:`default_degree` when left as None.
    """

    kappa: float
    R: float
    N: int = None
    tol: float = 1e-8

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if not self.R > 0:
            raise ValueError("R must be positive")
        if self.N is None:
            object.__setattr__(self, "N", default_degree(self.kappa, self.R))
        if int(self.N) != self.N or self.N < 0:
            raise ValueError("N must be a non-negative integer")
        object.__setattr__(self, "N", int(self.N))
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    def with_degree(self, N):
        return WaveContext(self.kappa, self.R, N, self.tol)


def _separation(x, y):
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    rho = np.linalg.norm(d, axis=-1)
    if np.any(rho == 0.0):
        raise ValueError("Green's kernels are singular at coincident points")
    return d, rho


def green_profile(rho, kappa, order=1):
    """
    g as a function of rho and its first ``order`` rho-derivatives.

    Returns a list [F, F', F'', F'''][: order + 1].
    """
    a = 1j * kappa - 1.0 / rho
    F = np.exp(1j * kappa * rho) / (4.0 * np.pi * rho)
    out = [F, F * a]
    if order >= 2:
        out.append(F * (a * a + 1.0 / rho**2))
    if order >= 3:
        out.append(F * (a**3 + 3.0 * a / rho**2 - 2.0 / rho**3))
    return out[: order + 1]


def j0_profile(rho, kappa):
    """j_0(k rho) with its first two rho-derivatives."""
    x = np.asarray(kappa * rho, dtype=float)
    small = x < 0.5
    xs = np.where(small, 1.0, x)
    s, c = np.sin(xs), np.cos(xs)
    j0 = s / xs
    j1 = s / xs**2 - c / xs
    if np.any(small):
        # closed form for j_1 cancels badly near 0; recur there instead
        jj = sph_jn_all(1, x[small])
        j0[small], j1[small] = jj[0], jj[1]
    with np.errstate(divide="ignore", invalid="ignore"):
        d2 = np.where(x > 1e-4, -j0 + 2.0 * j1 / np.where(x > 1e-4, x, 1.0), -1.0 / 3.0 + x * x / 10.0)
    return j0, -kappa * j1, kappa**2 * d2


def radial_hessian(n, rho, F1, F2):
    """Hessian A n n^T + B I of a radial profile, shape (..., 3, 3)."""
    A = F2 - F1 / rho
    B = F1 / rho
    return A[..., None, None] * n[..., :, None] * n[..., None, :] + B[..., None, None] * np.eye(3)


def scalar_green(x, y, ctx):
    """g(x, y) = exp(i k |x-y|) / (4 pi |x-y|)."""
    _, rho = _separation(x, y)
    res = np.exp(1j * ctx.kappa * rho) / (4.0 * np.pi * rho)
    return res if res.ndim else complex(res)


def grad_scalar_green(x, y, ctx):
    """
    Gradient of g in x, ``(x-y)/|x-y| (i k - 1/|x-y|) g``.

    The gradient in y is the negative of this.
    """
    d, rho = _separation(x, y)
    F, F1 = green_profile(rho, ctx.kappa, 1)
    return (F1 / rho)[..., None] * d


def dyadic_green(x, y, ctx):
    """
    Dyadic Green's tensor, shape (..., 3, 3).

    ``[(I - n n^T) + (i k rho - 1)/(k rho)^2 (I - 3 n n^T)] g``
    """
    d, rho = _separation(x, y)
    k = ctx.kappa
    n = d / rho[..., None]
    g = np.asarray(np.exp(1j * k * rho) / (4.0 * np.pi * rho))
    nn = n[..., :, None] * n[..., None, :]
    eye = np.eye(3)
    c = np.asarray((1j * k * rho - 1.0) / (k * rho) ** 2)
    return ((eye - nn) + c[..., None, None] * (eye - 3.0 * nn)) * g[..., None, None]


def farfield_projector(xhat):
    """Transverse projector I - xhat xhat^T for a unit vector ``xhat``."""
    xhat = np.asarray(xhat, dtype=float)
    if xhat.shape[-1] != 3:
        raise ValueError("xhat must be a 3-vector")
    if np.any(np.abs(np.linalg.norm(xhat, axis=-1) - 1.0) > 1e-12):
        raise ValueError("xhat must be a unit vector")
    return np.eye(3) - xhat[..., :, None] * xhat[..., None, :]


def projector_angles(theta, phi):
    """Projector for the direction with polar angle theta, azimuth phi."""
    xhat = np.array([math.sin(theta) * math.cos(phi),
                     math.sin(theta) * math.sin(phi),
                     math.cos(theta)])
    return farfield_projector(xhat / np.linalg.norm(xhat))


def _angles(p):
    r = np.linalg.norm(p, axis=-1)
    safe = np.where(r > 0, r, 1.0)
    theta = np.arccos(np.clip(p[..., 2] / safe, -1.0, 1.0))
    phi = np.arctan2(p[..., 1], p[..., 0])
    return r, theta, phi


def _expansion(x, y, N, kappa, outgoing):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    rx, tx, px = _angles(x)
    ry, ty, py = _angles(y)
    if np.any(rx <= ry):
        raise ValueError("the separable expansion needs |x| > |y|")
    jx = sph_jn_all(N, kappa * rx)
    radial_x = jx + 1j * sph_yn_all(N, kappa * rx) if outgoing else jx
    jy = sph_jn_all(N, kappa * ry)
    Yx = sph_harmonics_all(N, tx, px)
    Yy = sph_harmonics_all(N, ty, py)
    total = np.zeros(np.broadcast(rx, ry).shape, dtype=complex)
    for n in range(N + 1):
        sl = slice(lm_index(n, -n), lm_index(n, n) + 1)
        angular = np.sum(Yx[sl] * np.conj(Yy[sl]), axis=0)
        total = total + radial_x[n] * jy[n] * angular
    return total


def expansion_scalar_green(x, y, ctx, N=None):
    """
    Addition-theorem expansion of g truncated at degree N (default ctx.N).

    ``i k sum_n sum_m h_n(k|x|) Y_n^m(xhat) j_n(k|y|) conj(Y_n^m(yhat))``,
    valid for |x| > |y|.
    """
    N = ctx.N if N is None else N
    res = 1j * ctx.kappa * _expansion(x, y, N, ctx.kappa, outgoing=True)
    return res if res.ndim else complex(res)


def expansion_j0(x, y, ctx, N=None):
    """
    Expansion of j_0(k|x-y|) truncated at degree N (default ctx.N).

    ``4 pi sum_n sum_m j_n(k|x|) Y_n^m(xhat) j_n(k|y|) conj(Y_n^m(yhat))``,
    kept to |x| > |y| as in the outgoing case.
    """
    N = ctx.N if N is None else N
    res = 4.0 * np.pi * _expansion(x, y, N, ctx.kappa, outgoing=False)
    return res if res.ndim else complex(res)
