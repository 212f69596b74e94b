"""
Product Gauss-Legendre rules on balls and spheres.

A ball rule is Gauss-Legendre in r (with the r^2 Jacobian in the weights),
Gauss-Legendre in cos(theta) and the trapezoid rule in phi.  The tensor
structure is kept on the rule so that integrands separating in
(r, theta, phi) can be reduced axis by axis.
"""

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BallRule",
    "SphereRule",
    "build_ball_rule",
    "build_sphere_rule",
    "default_counts",
    "integrate",
]


def _gauss_legendre(n, a, b):
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def _angular(n_polar, n_azim):
    ct, wt = np.polynomial.legendre.leggauss(n_polar)
    # descending cos => ascending theta
    ct, wt = ct[::-1], wt[::-1]
    theta = np.arccos(ct)
    phi = 2.0 * np.pi * np.arange(n_azim) / n_azim
    wphi = np.full(n_azim, 2.0 * np.pi / n_azim)
    return theta, wt, phi, wphi


def _directions(theta, phi):
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    return np.stack(
        [np.outer(st, cp), np.outer(st, sp), np.outer(ct, np.ones_like(phi))], axis=-1
    )


def _check_counts(*counts):
    for c in counts:
        if int(c) != c or c < 1:
            raise ValueError(f"quadrature counts must be integers >= 1, got {c!r}")


@dataclass(frozen=True)
class SphereRule:
    """Product rule on the sphere of radius ``radius`` centred at the origin."""

    radius: float
    theta: np.ndarray
    theta_weights: np.ndarray
    phi: np.ndarray
    phi_weights: np.ndarray
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    normals: np.ndarray = field(repr=False)

    @property
    def shape(self):
        return (self.theta.size, self.phi.size)


@dataclass(frozen=True)
class BallRule:
    """
    Product rule on the ball of radius ``radius``.

    ``nodes`` and ``weights`` are flattened in C order over the grid axes
    (r, theta, phi); ``shape`` gives the grid shape.
    """

    radius: float
    r: np.ndarray
    r_weights: np.ndarray  # includes r**2
    theta: np.ndarray
    theta_weights: np.ndarray
    phi: np.ndarray
    phi_weights: np.ndarray
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def shape(self):
        return (self.r.size, self.theta.size, self.phi.size)

    def refined(self, factor=2):
        """Same ball, every count multiplied by ``factor``."""
        n_r, n_t, n_p = self.shape
        return build_ball_rule(self.radius, factor * n_r, factor * n_t, factor * n_p)


def build_sphere_rule(Rp, n_polar, n_azim):
    """
    Gauss-Legendre x trapezoid rule on the sphere of radius ``Rp``.

    Exact for Y_n^m with n <= min(2*n_polar - 1, n_azim - 1) when the
    integrand's azimuthal order stays below n_azim.
    """
    _check_counts(n_polar, n_azim)
    if not Rp > 0:
        raise ValueError("sphere radius must be positive")
    theta, wt, phi, wphi = _angular(int(n_polar), int(n_azim))
    dirs = _directions(theta, phi).reshape(-1, 3)
    w = (Rp**2 * np.outer(wt, wphi)).ravel()
    return SphereRule(
        radius=float(Rp),
        theta=theta,
        theta_weights=wt,
        phi=phi,
        phi_weights=wphi,
        nodes=Rp * dirs,
        weights=w,
        normals=dirs,
    )


def build_ball_rule(R, n_r, n_polar, n_azim):
    """
    Tensor-product rule on the ball B_R.

    Parameters
    ----------
    R : float
        Ball radius.
    n_r, n_polar, n_azim : int
        Radial Gauss-Legendre nodes, Gauss-Legendre nodes in cos(theta),
        and equispaced azimuthal nodes.

    Notes
    -----
    Integrands r^p Y_n^m are integrated exactly for p <= 2*n_r - 3 (the
    r^2 Jacobian uses two of the 2*n_r - 1 available degrees) and
    n <= min(n_polar - 1, (n_azim - 1) // 2).
    """
    _check_counts(n_r, n_polar, n_azim)
    if not R > 0:
        raise ValueError("ball radius must be positive")
    r, wr = _gauss_legendre(int(n_r), 0.0, float(R))
    wr = wr * r * r
    theta, wt, phi, wphi = _angular(int(n_polar), int(n_azim))
    dirs = _directions(theta, phi)
    nodes = (r[:, None, None, None] * dirs[None]).reshape(-1, 3)
    weights = (wr[:, None, None] * wt[None, :, None] * wphi[None, None, :]).ravel()
    return BallRule(
        radius=float(R),
        r=r,
        r_weights=wr,
        theta=theta,
        theta_weights=wt,
        phi=phi,
        phi_weights=wphi,
        nodes=nodes,
        weights=weights,
    )


def default_counts(kappa, R, N):
    """Default (n_r, n_polar, n_azim) for wavenumber, radius and degree N."""
    return (
        int(math.ceil(2.0 * kappa * R)) + 16,
        int(N) + 8,
        2 * int(N) + 8,
    )


def _exact_sum(values, weights):
    # math.fsum is correctly rounded, hence independent of node order
    prod = values * weights.reshape((-1,) + (1,) * (values.ndim - 1))
    flat = prod.reshape(prod.shape[0], -1)
    out = np.empty(flat.shape[1], dtype=complex)
    for k in range(flat.shape[1]):
        col = flat[:, k]
        out[k] = complex(math.fsum(col.real), math.fsum(col.imag))
    return out.reshape(prod.shape[1:])


def integrate(rule, f):
    """
    Apply a quadrature rule.

    Parameters
    ----------
    rule : BallRule or SphereRule
    f : callable
        Vectorised integrand: takes the (M, 3) node array and returns an
        array of shape (M,) or (M, k).

    Returns
    -------
    complex or ndarray of complex
        ``sum_i w_i f(node_i)``, correctly rounded per component, so the
        result does not depend on node order.
    """
    vals = np.asarray(f(rule.nodes))
    if vals.shape[0] != rule.weights.size:
        raise ValueError("integrand returned the wrong number of values")
    if not np.all(np.isfinite(vals)):
        raise ValueError("integrand is not finite at every quadrature node")
    res = _exact_sum(vals.astype(complex), rule.weights)
    return complex(res) if res.ndim == 0 else res
