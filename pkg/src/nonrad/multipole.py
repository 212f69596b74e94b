"""
Multipole coefficients of a source against spherical wave functions.

With u_n^m(y) = j_n(k|y|) conj(Y_n^m(yhat)):

    alpha = int u J
    gamma = k^-2 int (grad grad u) J
    zeta  = -k^-2 int (grad u) div J
    eta   = k^-2 int u grad div J

and beta = alpha + (gamma | zeta | eta), the pairing chosen by the source's
regularity class.  The exterior field is
``E(x) = i k sum h_n(k|x|) Y_n^m(xhat) beta_n^m``.

All coefficients up to degree N are computed together on the tensor grid
of a :class:`~nonrad.quadrature.BallRule`: the azimuthal sums become
discrete Fourier projections and the (r, theta) sums small contractions.
Hessians and gradients of u are analytic, written in the local spherical
frame (rhat, thetahat, phihat).
"""

import csv
import io
import logging
from dataclasses import dataclass

import numpy as np

from .quadrature import BallRule
from .sources import (
    InsufficientRegularity,
    Regularity,
    eval_div,
    eval_graddiv,
    source_rule,
    source_scale,
)
from .specialfuncs import legendre_table, lm_index, sph_jn_all, sph_jn_derivs

__all__ = [
    "MultipoleCoeffs",
    "coeff_alpha",
    "coeff_gamma",
    "coeff_zeta",
    "coeff_eta",
    "coeff_table",
    "wave_function",
    "PAIRING",
]

log = logging.getLogger(__name__)

PAIRING = {
    Regularity.L2: "gamma",
    Regularity.HDIV_ZERO_TRACE: "zeta",
    Regularity.HDIV_GRAD: "eta",
    Regularity.DIVERGENCE_FREE: None,
}


# ---------------------------------------------------------------------------
# grid engine


class _Grid:
    """Radial, polar and azimuthal tables of a ball rule up to degree N."""

    def __init__(self, rule: BallRule, kappa, N):
        if not isinstance(rule, BallRule):
            raise TypeError("coefficients need a BallRule")
        self.rule, self.kappa, self.N = rule, float(kappa), int(N)
        r, th, ph = rule.r, rule.theta, rule.phi
        self.n_r, self.n_t, self.n_p = rule.shape
        x = kappa * r
        j, dj, d2j = sph_jn_derivs(N, x)
        wr = rule.r_weights
        # radial factors with the radial weight folded in, shape (n, r)
        self.j = j * wr
        self.jp = kappa * dj * wr
        self.jpp = kappa**2 * d2j * wr
        self.j_r = j / r * wr
        self.jp_r = kappa * dj / r * wr
        self.j_r2 = j / r**2 * wr

        P, dP, d2P = legendre_table(N, th, derivs=2)
        ms = np.arange(-N, N + 1)
        absm = np.abs(ms)
        wt = rule.theta_weights
        # angular factors indexed (n, m, t) with signed m
        self.P = P[:, absm, :] * wt
        self.dP = dP[:, absm, :] * wt
        self.d2P = d2P[:, absm, :] * wt
        self.s = np.sin(th)
        self.c = np.cos(th)
        self.ms = ms
        self._im = (-1j * ms)[None, :, None]

        # e^{-i m phi} b_s(phi) with b = (1, cos, sin), trapezoid weights included
        emp = np.exp(-1j * np.outer(ms, ph)) * rule.phi_weights
        self.proj = np.stack([emp, emp * np.cos(ph), emp * np.sin(ph)])  # (s, m, p)

        # Cartesian components of (rhat, thetahat, phihat) as sum_s C[i, a, s](t) b_s
        s, c = self.s, self.c
        z = np.zeros_like(s)
        o = np.ones_like(s)
        self.C = np.array(
            [
                [[z, s, z], [z, z, s], [c, z, z]],
                [[z, c, z], [z, z, c], [-s, z, z]],
                [[z, z, -o], [z, o, z], [z, z, z]],
            ]
        )  # (i, a, s, t)

        dirs = rule.nodes.reshape(self.n_r, self.n_t, self.n_p, 3) / r[:, None, None, None]
        st, ct = s[:, None], c[:, None]
        sp, cp = np.sin(ph)[None, :], np.cos(ph)[None, :]
        self.frame = np.stack(
            [
                dirs[0],
                np.stack([ct * cp, ct * sp, -st * np.ones_like(cp)], axis=-1),
                np.stack([-sp * np.ones_like(st), cp * np.ones_like(st), 0.0 * st * cp], axis=-1),
            ]
        )  # (i, t, p, 3)

    def _grid(self, vals, comps):
        return np.asarray(vals, dtype=complex).reshape((self.n_r, self.n_t, self.n_p) + comps)

    def moment(self, vec):
        """sum w j_n P e^{-im phi} V_a for a vector field sampled at the nodes."""
        V = self._grid(vec, (3,))
        F = np.einsum("mp,rtpa->amrt", self.proj[0], V, optimize=True)
        return np.einsum("nr,nmt,amrt->nma", self.j, self.P, F, optimize=True)

    def _frame_proj(self, vec):
        V = self._grid(vec, (3,))
        d = np.einsum("itpa,rtpa->irtp", self.frame, V, optimize=True)
        return np.einsum("smp,irtp->ismrt", self.proj, d, optimize=True)

    def hessian_moment(self, vec):
        """sum w (grad grad u) V, u = j_n conj(Y_n^m)."""
        F = self._frame_proj(vec)  # (j, s, m, r, t)
        im, s, cot = self._im, self.s, self.c / self.s
        P, dP, d2P = self.P, self.dP, self.d2P
        a_r = self.jp_r - self.j_r2
        m2 = (self.ms**2)[None, :, None]
        # H_ij = sum_k R_k(n, r) A_k(n, m, t)
        terms = {
            (0, 0): [(self.jpp, P)],
            (0, 1): [(a_r, dP)],
            (0, 2): [(a_r, im * P / s)],
            (1, 1): [(self.j_r2, d2P), (self.jp_r, P)],
            (1, 2): [(self.j_r2, im * (dP - cot * P) / s)],
            (2, 2): [(self.j_r2, -m2 * P / s**2 + cot * dP), (self.jp_r, P)],
        }
        out = np.zeros((self.N + 1, self.ms.size, 3), dtype=complex)
        for (i, j), parts in terms.items():
            pairs = [(i, j)] if i == j else [(i, j), (j, i)]
            for R, A in parts:
                for a, b in pairs:
                    # sum over r, t, s of R A C[a] F[b]
                    T = np.einsum("nr,smrt->nsmt", R, F[b], optimize=True)
                    out += np.einsum("nmt,xst,nsmt->nmx", A, self.C[a], T, optimize=True)
        return out

    def gradient_moment(self, scal):
        """sum w (grad u) f for a scalar field f sampled at the nodes."""
        f = self._grid(scal, ())
        D = np.einsum("smp,rtp->smrt", self.proj, f, optimize=True)
        parts = [
            (0, self.jp, self.P),
            (1, self.j_r, self.dP),
            (2, self.j_r, self._im * self.P / self.s),
        ]
        out = np.zeros((self.N + 1, self.ms.size, 3), dtype=complex)
        for i, R, A in parts:
            T = np.einsum("nr,smrt->nsmt", R, D, optimize=True)
            out += np.einsum("nmt,xst,nsmt->nmx", A, self.C[i], T, optimize=True)
        return out

    def flatten(self, table):
        """(n, signed m, 3) -> flat lm layout ((N+1)^2, 3)."""
        N = self.N
        out = np.zeros(((N + 1) ** 2, 3), dtype=complex)
        for n in range(N + 1):
            out[lm_index(n, -n): lm_index(n, n) + 1] = table[n, N - n: N + n + 1]
        return out


def wave_function(n, m, y, kappa):
    """u_n^m(y) = j_n(k|y|) conj(Y_n^m(yhat)), pointwise."""
    y = np.asarray(y, dtype=float)
    r = np.linalg.norm(y, axis=-1)
    safe = np.where(r > 0, r, 1.0)
    theta = np.arccos(np.clip(y[..., 2] / safe, -1.0, 1.0))
    phi = np.arctan2(y[..., 1], y[..., 0])
    Pn = legendre_table(n, theta)[n, abs(m)]
    return sph_jn_all(n, kappa * r)[n] * Pn * np.exp(-1j * m * phi)


def _fd_hessian_u(n, m, y, kappa, h):
    # nested central differences with one Richardson step
    def hess(step):
        H = np.empty(y.shape[:-1] + (3, 3), dtype=complex)
        for a in range(3):
            for b in range(a, 3):
                ea = np.zeros(3)
                eb = np.zeros(3)
                ea[a] = step
                eb[b] = step
                val = (
                    wave_function(n, m, y + ea + eb, kappa)
                    - wave_function(n, m, y + ea - eb, kappa)
                    - wave_function(n, m, y - ea + eb, kappa)
                    + wave_function(n, m, y - ea - eb, kappa)
                ) / (4.0 * step * step)
                H[..., a, b] = H[..., b, a] = val
        return H

    return (4.0 * hess(0.5 * h) - hess(h)) / 3.0


# ---------------------------------------------------------------------------
# public API


def _check_nm(ctx, n, m):
    if not 0 <= n <= ctx.N or abs(m) > n:
        raise ValueError(f"need 0 <= n <= N={ctx.N} and |m| <= n, got ({n}, {m})")


def _single(table_fn, src, ctx, rule, n, m):
    _check_nm(ctx, n, m)
    rule = rule or source_rule(src, ctx)
    g = _Grid(rule, ctx.kappa, n)
    return g.flatten(table_fn(g, src))[lm_index(n, m)]


def _alpha(g, src):
    return g.moment(src.J(g.rule.nodes))


def _gamma(g, src):
    return g.hessian_moment(src.J(g.rule.nodes)) / g.kappa**2


def _zeta(g, src):
    if src.regularity not in (Regularity.HDIV_ZERO_TRACE, Regularity.DIVERGENCE_FREE,
                              Regularity.HDIV_GRAD):
        raise InsufficientRegularity(f"zeta needs an H(div) source, {src.name!r} is {src.regularity.value}")
    if src.regularity is Regularity.DIVERGENCE_FREE:
        return np.zeros((g.N + 1, g.ms.size, 3), dtype=complex)
    return -g.gradient_moment(eval_div(src, g.rule.nodes)) / g.kappa**2


def _eta(g, src):
    if src.regularity not in (Regularity.HDIV_GRAD, Regularity.DIVERGENCE_FREE):
        raise InsufficientRegularity(f"eta needs an H(div; grad) source, {src.name!r} is {src.regularity.value}")
    if src.regularity is Regularity.DIVERGENCE_FREE:
        return np.zeros((g.N + 1, g.ms.size, 3), dtype=complex)
    return g.moment(eval_graddiv(src, g.rule.nodes)) / g.kappa**2


def coeff_alpha(src, ctx, rule, n, m):
    """alpha_n^m = int j_n(k|y|) conj(Y_n^m(yhat)) J(y) dy."""
    return _single(_alpha, src, ctx, rule, n, m)


def coeff_gamma(src, ctx, rule, n, m, method="analytic"):
    """
    gamma_n^m = k^-2 int (grad grad u_n^m) J dy.

    ``method="fd"`` uses nested central differences of u_n^m (step 1e-4 R,
    one Richardson step) instead of the analytic Hessian; it is much
    slower and is kept as a cross-check.
    """
    if method == "analytic":
        return _single(_gamma, src, ctx, rule, n, m)
    if method != "fd":
        raise ValueError("method must be 'analytic' or 'fd'")
    _check_nm(ctx, n, m)
    rule = rule or source_rule(src, ctx)
    y = rule.nodes
    H = _fd_hessian_u(n, m, y, ctx.kappa, 1e-4 * ctx.R)
    HJ = np.einsum("kab,kb->ka", H, src.J(y))
    return (rule.weights @ HJ) / ctx.kappa**2


def coeff_zeta(src, ctx, rule, n, m):
    """zeta_n^m = -k^-2 int (grad u_n^m) div J dy."""
    return _single(_zeta, src, ctx, rule, n, m)


def coeff_eta(src, ctx, rule, n, m):
    """eta_n^m = k^-2 int u_n^m grad div J dy."""
    return _single(_eta, src, ctx, rule, n, m)


@dataclass(frozen=True)
class MultipoleCoeffs:
    """
    Coefficient table up to degree N in the flat lm layout.

    Each family is an array of shape ((N+1)^2, 3) or None when the
    source's regularity does not admit it.  ``pairing`` names the family
    added to alpha to form beta (None: beta = alpha).
    """

    N: int
    kappa: float
    R: float
    alpha: np.ndarray
    beta: np.ndarray
    pairing: str
    source_scale: float
    regularity: Regularity
    gamma: np.ndarray = None
    zeta: np.ndarray = None
    eta: np.ndarray = None

    def get(self, family, n, m):
        arr = getattr(self, family)
        if arr is None:
            raise KeyError(f"{family} not computed for this source")
        return arr[lm_index(n, m)]

    def family(self, name):
        return getattr(self, name)

    def max_abs(self, family="beta", nmax=None):
        arr = getattr(self, family)
        if nmax is not None:
            arr = arr[: (nmax + 1) ** 2]
        return float(np.max(np.linalg.norm(arr, axis=-1)))

    def relative(self, family="beta", nmax=None):
        return self.max_abs(family, nmax) / max(self.source_scale, np.finfo(float).tiny)

    def pairing_spread(self):
        """Largest entrywise spread among the alpha + (gamma|zeta|eta) sums computed."""
        sums = [self.alpha + getattr(self, f) for f in ("gamma", "zeta", "eta") if getattr(self, f) is not None]
        if len(sums) < 2:
            return 0.0
        return max(float(np.max(np.abs(a - b))) for a in sums for b in sums)

    def to_csv(self):
        # with no pairing (beta = alpha) alpha fills the middle block, keeping the schema fixed
        fam = self.pairing or "alpha"
        head = ["n", "m"]
        for name in ("alpha", fam, "beta"):
            label = name.capitalize()
            for k in (1, 2, 3):
                head += [f"Re{label}{k}", f"Im{label}{k}"]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(head)
        mid = getattr(self, fam)
        for n in range(self.N + 1):
            for m in range(-n, n + 1):
                i = lm_index(n, m)
                row = [n, m]
                for arr in (self.alpha, mid, self.beta):
                    for k in range(3):
                        row += [_fmt(arr[i, k].real), _fmt(arr[i, k].imag)]
                w.writerow(row)
        return buf.getvalue()


def _fmt(v):
    return format(float(v) + 0.0, ".17g")  # no negative zeros


def coeff_table(src, ctx, rule=None, families=None):
    """
    Every coefficient family admitted by the source's regularity, n <= ctx.N.

    Parameters
    ----------
    src : SourceSpec
    ctx : WaveContext
    rule : BallRule, optional
        Defaults to :func:`~nonrad.sources.source_rule`.
    families : iterable of str, optional
        Restrict the secondary families; the pairing family is always kept.
    """
    rule = rule or source_rule(src, ctx)
    g = _Grid(rule, ctx.kappa, ctx.N)
    reg = src.regularity
    wanted = {"gamma"}
    if reg in (Regularity.HDIV_ZERO_TRACE, Regularity.HDIV_GRAD, Regularity.DIVERGENCE_FREE):
        wanted.add("zeta")
    if reg in (Regularity.HDIV_GRAD, Regularity.DIVERGENCE_FREE):
        wanted.add("eta")
    if families is not None:
        wanted &= set(families)
    pairing = PAIRING[reg]
    if pairing:
        wanted.add(pairing)

    alpha = g.flatten(_alpha(g, src))
    fams = {}
    for name, fn in (("gamma", _gamma), ("zeta", _zeta), ("eta", _eta)):
        if name in wanted:
            fams[name] = g.flatten(fn(g, src))
    beta = alpha + fams[pairing] if pairing else alpha.copy()
    for arr in [alpha, beta, *fams.values()]:
        if not np.all(np.isfinite(arr)):
            raise FloatingPointError("non-finite multipole coefficient")
    scale = source_scale(src, rule)
    log.debug("coeff_table %s: N=%d scale=%.3e max|beta|=%.3e", src.name, ctx.N, scale,
              np.max(np.abs(beta)))
    return MultipoleCoeffs(
        N=ctx.N, kappa=ctx.kappa, R=ctx.R, alpha=alpha, beta=beta, pairing=pairing,
        source_scale=scale, regularity=reg, **fams,
    )
