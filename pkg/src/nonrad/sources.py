"""
Current densities supported in a ball, and the built-in source families.

Every source is a :class:`SourceSpec`: vectorised evaluators for J and,
when available, for div J, grad div J and the modified source
``Jcal = J + k^-2 grad div J``.  Evaluators take points of shape (..., 3)
and return complex arrays; they vanish identically outside
``support_radius``.
"""

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .greens import WaveContext
from .quadrature import build_ball_rule, default_counts
from .specialfuncs import sph_jn_all

__all__ = [
    "Regularity",
    "SourceSpec",
    "InsufficientRegularity",
    "bump_profile",
    "zero_source",
    "curlcurl_source",
    "gradient_source",
    "bessel_pair_source",
    "bessel_single_source",
    "bessel_normalizer",
    "dipole_ball_source",
    "curl_source",
    "eval_J",
    "eval_div",
    "eval_graddiv",
    "eval_jcal",
    "source_rule",
    "source_scale",
    "from_descriptor",
    "load_descriptor",
    "to_descriptor",
    "default_descriptor",
    "SOURCE_KINDS",
]

SOURCE_KINDS = ("curlcurl", "gradient", "bessel_pair", "bessel_single", "dipole_ball")


class Regularity(str, Enum):
    L2 = "L2"
    HDIV_ZERO_TRACE = "HdivZeroTrace"
    HDIV_GRAD = "HdivGrad"
    DIVERGENCE_FREE = "DivergenceFree"


class InsufficientRegularity(ValueError):
    """Raised when a derivative of J is requested that the source does not have."""


@dataclass(frozen=True)
class SourceSpec:
    """
    An evaluable current density on the ball B_R.

    ``radial_nodes`` is the smallest radial Gauss-Legendre count that
    resolves the source profile; quadrature builders honour it.
    """

    name: str
    kappa: float
    R: float
    support_radius: float
    J: callable
    regularity: Regularity
    divJ: callable = None
    graddivJ: callable = None
    Jcal: callable = None
    radial_nodes: int = 16
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.support_radius > self.R * (1 + 1e-12):
            raise ValueError("support radius exceeds the ball radius")

    @property
    def context(self):
        return WaveContext(self.kappa, self.R)


# ---------------------------------------------------------------------------
# radial helpers


def _polar(y):
    y = np.asarray(y, dtype=float)
    r = np.linalg.norm(y, axis=-1)
    safe = np.where(r > 0, r, 1.0)
    rhat = y / safe[..., None]
    return y, r, rhat


def _over_r(f1, f2, r):
    # f'(r)/r with its limit f''(0) at the origin
    safe = np.where(r > 1e-12, r, 1.0)
    return np.where(r > 1e-12, f1 / safe, f2)


def bump_profile(r, rho):
    """
    psi(r/rho) = exp(1/((r/rho)^2 - 1)) for r < rho, else 0, and its first
    three r-derivatives.

    Returns
    -------
    list of ndarray [f, f', f'', f''']
    """
    t = np.asarray(r, dtype=float) / rho
    inside = t < 1.0 - 1e-6
    ts = np.where(inside, t, 0.0)
    s = ts * ts - 1.0
    psi = np.where(inside, np.exp(1.0 / s), 0.0)
    h1 = -2.0 * ts / s**2
    h2 = (6.0 * ts * ts + 2.0) / s**3
    h3 = -24.0 * ts * (ts * ts + 1.0) / s**4
    d1 = h1 * psi
    d2 = (h2 + h1 * h1) * psi
    d3 = (h3 + 3.0 * h1 * h2 + h1**3) * psi
    return [psi, d1 / rho, d2 / rho**2, d3 / rho**3]


def _masked(func, support):
    def wrapped(y):
        y = np.asarray(y, dtype=float)
        out = np.asarray(func(y), dtype=complex)
        r = np.linalg.norm(y, axis=-1)
        outside = r > support
        if np.any(outside):
            out = out.copy()
            out[outside] = 0.0
        return out

    return wrapped


def _ctx_args(ctx):
    return float(ctx.kappa), float(ctx.R)


# ---------------------------------------------------------------------------
# built-in families


def zero_source(ctx, name="zero"):
    """J = 0, divergence free."""
    kappa, R = _ctx_args(ctx)

    def vec(y):
        return np.zeros(np.shape(y), dtype=complex)

    def scal(y):
        return np.zeros(np.shape(y)[:-1], dtype=complex)

    return SourceSpec(
        name=name, kappa=kappa, R=R, support_radius=R, J=vec,
        regularity=Regularity.DIVERGENCE_FREE, divJ=scal, graddivJ=vec, Jcal=vec,
        params={},
    )


def curlcurl_source(ctx, p=(0.0, 0.0, 1.0), rho=0.5, profile=None):
    """
    J = curl curl F - k^2 F for F = p f(|y|), by default f = psi(|y|/rho).

    Parameters
    ----------
    ctx : WaveContext
    p : 3-vector
        Polarisation of F.
    rho : float
        Support radius of F; must be strictly below ctx.R.
    profile : callable, optional
        ``profile(r) -> [f, f', f'', f''']`` for a radial profile supported
        in [0, rho].  Defaults to the bump.

    Notes
    -----
    With F radial times a constant vector,

        J       = (f'' - f'/r)(rhat.p) rhat - (f'' + f'/r + k^2 f) p
        div J   = -k^2 f' (rhat.p)
        Jcal    = -(f'' + 2 f'/r + k^2 f) p
    """
    kappa, R = _ctx_args(ctx)
    if not 0 < rho < R:
        raise ValueError("curl-curl source needs 0 < rho < R (support strictly inside B_R)")
    p = np.asarray(p, dtype=float)
    prof = profile or (lambda r: bump_profile(r, rho))
    k2 = kappa**2

    def parts(y):
        y, r, rhat = _polar(y)
        f, f1, f2, f3 = prof(r)
        return r, rhat, f, f1, f2, f3, rhat @ p

    def J(y):
        r, rhat, f, f1, f2, f3, rp = parts(y)
        f1r = _over_r(f1, f2, r)
        return ((f2 - f1r) * rp)[..., None] * rhat - (f2 + f1r + k2 * f)[..., None] * p

    def divJ(y):
        r, rhat, f, f1, f2, f3, rp = parts(y)
        return -k2 * f1 * rp

    def graddivJ(y):
        r, rhat, f, f1, f2, f3, rp = parts(y)
        f1r = _over_r(f1, f2, r)
        return -k2 * (((f2 - f1r) * rp)[..., None] * rhat + f1r[..., None] * p)

    def Jcal(y):
        r, rhat, f, f1, f2, f3, rp = parts(y)
        f1r = _over_r(f1, f2, r)
        return -(f2 + 2.0 * f1r + k2 * f)[..., None] * p

    return SourceSpec(
        name="curlcurl", kappa=kappa, R=R, support_radius=rho,
        J=_masked(J, rho), divJ=_masked(divJ, rho), graddivJ=_masked(graddivJ, rho),
        Jcal=_masked(Jcal, rho), regularity=Regularity.HDIV_GRAD, radial_nodes=96,
        params={"p": p.tolist(), "rho": float(rho)},
    )


def gradient_source(ctx, rho=0.5, amplitude=1.0, profile=None, support=None):
    """
    J = grad Q for a radial scalar Q vanishing on the boundary of B_R.

    By default Q = amplitude * psi(|y|/rho).  A custom ``profile(r) ->
    [q, q', q'', q''']`` must vanish at r = R (checked by sampling) and be
    supported in [0, support].
    """
    kappa, R = _ctx_args(ctx)
    if profile is None:
        if not 0 < rho < R:
            raise ValueError("gradient source needs 0 < rho < R")

        def prof(r):
            return [amplitude * v for v in bump_profile(r, rho)]

        support = rho
    else:
        prof = profile
        support = R if support is None else support
    edge = np.asarray(prof(np.full(16, R)))[0]
    if np.max(np.abs(edge)) > 1e-12:
        raise ValueError("Q must vanish on the boundary of B_R")

    def J(y):
        y, r, rhat = _polar(y)
        q1 = prof(r)[1]
        return q1[..., None] * rhat

    def lap(r):
        q, q1, q2, q3 = prof(r)
        return q2 + 2.0 * _over_r(q1, q2, r)

    def divJ(y):
        _, r, _ = _polar(y)
        return lap(r)

    def graddivJ(y):
        y, r, rhat = _polar(y)
        q, q1, q2, q3 = prof(r)
        safe = np.where(r > 1e-12, r, 1.0)
        d = q3 + 2.0 * q2 / safe - 2.0 * q1 / safe**2
        d = np.where(r > 1e-12, d, 0.0)
        return d[..., None] * rhat

    return SourceSpec(
        name="gradient", kappa=kappa, R=R, support_radius=support,
        J=_masked(J, support), divJ=_masked(divJ, support),
        graddivJ=_masked(graddivJ, support), regularity=Regularity.L2, radial_nodes=128,
        params={"rho": float(rho), "amplitude": float(amplitude)},
    )


def _check_bessel_root(kappa, R):
    if abs(math.sin(kappa * R) / (kappa * R)) > 1e-12:
        raise ValueError("kappa*R must be a root of j_0 (kappa*R = pi for the first root)")


def bessel_normalizer(m, kappa, R, n_nodes=64):
    """m * int_0^R j_0(k r)^(m-1) j_1(k r)^2 r^2 dr by Gauss-Legendre."""
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    r = 0.5 * R * (x + 1.0)
    w = 0.5 * R * w
    j = sph_jn_all(1, kappa * r)
    return float(m * np.sum(w * j[0] ** (m - 1) * j[1] ** 2 * r * r))


def _power_gradient_terms(kappa, terms):
    """
    Evaluators for J = sum_l c_l grad(j_0(k r)^{m_l}) inside the ball.

    grad j_0^m = -k m j_0^(m-1) j_1 rhat
    div         = k^2 [m(m-1) j_0^(m-2) j_1^2 - m j_0^m]
    """

    def jj(r):
        j = sph_jn_all(1, kappa * r)
        return j[0], j[1]

    def radial(r):
        j0, j1 = jj(r)
        return sum(-kappa * c * m * j0 ** (m - 1) * j1 for c, m in terms)

    def div(r):
        j0, j1 = jj(r)
        return kappa**2 * sum(c * (m * (m - 1) * j0 ** (m - 2) * j1**2 - m * j0**m) for c, m in terms)

    def ddiv(r):
        j0, j1 = jj(r)
        x = kappa * r
        safe = np.where(x > 1e-8, x, 1.0)
        j1x = np.where(x > 1e-8, j1 / safe, 1.0 / 3.0)
        total = 0.0
        for c, m in terms:
            lead = -(m - 2) * j0 ** (m - 3) * j1**3 if m > 2 else 0.0
            total = total + c * (
                m * (m - 1) * (lead + 2.0 * j0 ** (m - 1) * j1 - 4.0 * j0 ** (m - 2) * j1 * j1x)
                + m * m * j0 ** (m - 1) * j1
            )
        return kappa**3 * total

    def J(y):
        y, r, rhat = _polar(y)
        return radial(r)[..., None] * rhat

    def divJ(y):
        _, r, _ = _polar(y)
        return div(r)

    def graddivJ(y):
        y, r, rhat = _polar(y)
        return ddiv(r)[..., None] * rhat

    def Jcal(y):
        y, r, rhat = _polar(y)
        return (radial(r) + ddiv(r) / kappa**2)[..., None] * rhat

    return J, divJ, graddivJ, Jcal


def bessel_pair_source(ctx, m1=3, m2=4):
    """
    J = grad j_0^{m1}(k|y|)/N^{m1} - grad j_0^{m2}(k|y|)/N^{m2} inside B_R.

    Requires j_0(kR) = 0.  The normalisers make the degree-one moments of
    the two terms cancel.
    """
    kappa, R = _ctx_args(ctx)
    _check_bessel_root(kappa, R)
    for m in (m1, m2):
        if int(m) != m or m <= 2:
            raise ValueError("exponents must be integers > 2")
    if m1 == m2:
        raise ValueError("exponents must differ")
    N1 = bessel_normalizer(m1, kappa, R)
    N2 = bessel_normalizer(m2, kappa, R)
    J, divJ, graddivJ, Jcal = _power_gradient_terms(kappa, [(1.0 / N1, m1), (-1.0 / N2, m2)])
    return SourceSpec(
        name="bessel_pair", kappa=kappa, R=R, support_radius=R,
        J=_masked(J, R), divJ=_masked(divJ, R), graddivJ=_masked(graddivJ, R),
        Jcal=_masked(Jcal, R), regularity=Regularity.HDIV_ZERO_TRACE, radial_nodes=32,
        params={"m1": int(m1), "m2": int(m2), "N1": N1, "N2": N2},
    )


def bessel_single_source(ctx, s=3):
    """J = grad j_0^s(k|y|) inside B_R, with j_0(kR) = 0 and s > 2."""
    kappa, R = _ctx_args(ctx)
    _check_bessel_root(kappa, R)
    if int(s) != s or s <= 2:
        raise ValueError("exponent must be an integer > 2")
    J, divJ, graddivJ, Jcal = _power_gradient_terms(kappa, [(1.0, s)])
    return SourceSpec(
        name="bessel_single", kappa=kappa, R=R, support_radius=R,
        J=_masked(J, R), divJ=_masked(divJ, R), graddivJ=_masked(graddivJ, R),
        Jcal=_masked(Jcal, R), regularity=Regularity.HDIV_ZERO_TRACE, radial_nodes=32,
        params={"s": int(s)},
    )


def dipole_ball_source(ctx, p=(0.0, 0.0, 1.0), rho=0.5, sharp=False):
    """
    Radiating control J = p psi(|y|/rho).

    With ``sharp=True`` the bump is replaced by the indicator of the ball
    of radius rho (rho <= R allowed); that variant is only L2.
    """
    kappa, R = _ctx_args(ctx)
    p = np.asarray(p, dtype=float)
    if sharp:
        if not 0 < rho <= R:
            raise ValueError("need 0 < rho <= R")

        def J(y):
            y = np.asarray(y, dtype=float)
            inside = np.linalg.norm(y, axis=-1) < rho
            return inside[..., None] * p.astype(complex)

        return SourceSpec(
            name="dipole_ball", kappa=kappa, R=R, support_radius=rho, J=J,
            regularity=Regularity.L2, radial_nodes=16,
            params={"p": p.tolist(), "rho": float(rho), "sharp": True},
        )

    if not 0 < rho < R:
        raise ValueError("dipole ball needs 0 < rho < R")
    k2 = kappa**2

    def parts(y):
        y, r, rhat = _polar(y)
        f, f1, f2, f3 = bump_profile(r, rho)
        return r, rhat, f, f1, f2, rhat @ p

    def J(y):
        r, rhat, f, f1, f2, rp = parts(y)
        return f[..., None] * p.astype(complex)

    def divJ(y):
        r, rhat, f, f1, f2, rp = parts(y)
        return f1 * rp

    def graddivJ(y):
        r, rhat, f, f1, f2, rp = parts(y)
        f1r = _over_r(f1, f2, r)
        return ((f2 - f1r) * rp)[..., None] * rhat + f1r[..., None] * p

    def Jcal(y):
        return J(y) + graddivJ(y) / k2

    return SourceSpec(
        name="dipole_ball", kappa=kappa, R=R, support_radius=rho,
        J=_masked(J, rho), divJ=_masked(divJ, rho), graddivJ=_masked(graddivJ, rho),
        Jcal=_masked(Jcal, rho), regularity=Regularity.HDIV_GRAD, radial_nodes=96,
        params={"p": p.tolist(), "rho": float(rho), "sharp": False},
    )


def curl_source(ctx, p=(0.0, 0.0, 1.0), rho=0.5):
    """Divergence-free radiating control J = curl(p psi(|y|/rho)) = psi' rhat x p."""
    kappa, R = _ctx_args(ctx)
    if not 0 < rho < R:
        raise ValueError("need 0 < rho < R")
    p = np.asarray(p, dtype=float)

    def J(y):
        y, r, rhat = _polar(y)
        f1 = bump_profile(r, rho)[1]
        return f1[..., None] * np.cross(rhat, p)

    def zero_s(y):
        return np.zeros(np.shape(y)[:-1], dtype=complex)

    def zero_v(y):
        return np.zeros(np.shape(y), dtype=complex)

    return SourceSpec(
        name="curl", kappa=kappa, R=R, support_radius=rho, J=_masked(J, rho),
        divJ=zero_s, graddivJ=zero_v, Jcal=_masked(J, rho),
        regularity=Regularity.DIVERGENCE_FREE, radial_nodes=96,
        params={"p": p.tolist(), "rho": float(rho)},
    )


# ---------------------------------------------------------------------------
# evaluation with finite-difference fallback


def eval_J(spec, y):
    return spec.J(np.asarray(y, dtype=float))


def _fd_step(spec):
    return 1e-4 * spec.R


def _central_div(func, y, h):
    acc = 0.0
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        acc = acc + (func(y + e)[..., k] - func(y - e)[..., k]) / (2.0 * h)
    return acc


def _central_grad(func, y, h):
    cols = []
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        cols.append((func(y + e) - func(y - e)) / (2.0 * h))
    return np.stack(cols, axis=-1)


def _richardson(op, func, y, h):
    coarse = op(func, y, h)
    fine = op(func, y, 0.5 * h)
    value = (4.0 * fine - coarse) / 3.0
    return value, np.abs(fine - coarse) / 3.0


def eval_div(spec, y, return_error=False):
    """
    div J at ``y``.  Analytic when the source provides it, otherwise
    Richardson-extrapolated central differences of J with step 1e-4 R.
    """
    y = np.asarray(y, dtype=float)
    if spec.regularity is Regularity.DIVERGENCE_FREE:
        val = np.zeros(y.shape[:-1], dtype=complex)
        err = np.zeros(y.shape[:-1])
    elif spec.divJ is not None:
        val = spec.divJ(y)
        err = np.zeros(np.shape(val))
    elif spec.regularity is Regularity.L2:
        raise InsufficientRegularity(f"source {spec.name!r} is only L2: div J is not available")
    else:
        val, err = _richardson(_central_div, spec.J, y, _fd_step(spec))
    return (val, err) if return_error else val


def eval_graddiv(spec, y, return_error=False):
    """grad div J at ``y``; analytic, or central differences of div J."""
    y = np.asarray(y, dtype=float)
    if spec.regularity is Regularity.DIVERGENCE_FREE:
        val = np.zeros(y.shape, dtype=complex)
        err = np.zeros(y.shape)
    elif spec.graddivJ is not None:
        val = spec.graddivJ(y)
        err = np.zeros(np.shape(val))
    elif spec.regularity is not Regularity.HDIV_GRAD:
        raise InsufficientRegularity(
            f"source {spec.name!r} ({spec.regularity.value}) has no grad div J evaluator"
        )
    else:
        val, err = _richardson(_central_grad, lambda z: eval_div(spec, z), y, _fd_step(spec))
    return (val, err) if return_error else val


def eval_jcal(spec, y):
    """Jcal = J + k^-2 grad div J."""
    y = np.asarray(y, dtype=float)
    if spec.Jcal is not None:
        return spec.Jcal(y)
    return spec.J(y) + eval_graddiv(spec, y) / spec.kappa**2


# ---------------------------------------------------------------------------
# quadrature and scale


def source_rule(spec, ctx=None, factor=1, counts=None, angular_factor=1):
    """
    Ball rule on the support ball of ``spec``.

    Counts default to the context-driven defaults, with the radial count
    raised to ``spec.radial_nodes``; ``factor`` multiplies every count and
    ``angular_factor`` the two angular counts only.
    """
    ctx = ctx or spec.context
    if counts is None:
        n_r, n_t, n_p = default_counts(ctx.kappa, ctx.R, ctx.N)
        n_r = max(n_r, spec.radial_nodes)
    else:
        n_r, n_t, n_p = counts
    a = factor * angular_factor
    return build_ball_rule(spec.support_radius, factor * n_r, a * n_t, a * n_p)


def source_scale(spec, rule=None):
    """L2 norm of J over the ball, by quadrature."""
    rule = rule or source_rule(spec)
    vals = spec.J(rule.nodes)
    return float(np.sqrt(np.sum(rule.weights * np.sum(np.abs(vals) ** 2, axis=-1))))


# ---------------------------------------------------------------------------
# JSON descriptor


def from_descriptor(desc):
    """
    Build (WaveContext, SourceSpec) from a descriptor dict::

        {"kind": ..., "params": {...}, "kappa": ..., "R": ...}
    """
    if not isinstance(desc, dict):
        raise ValueError("descriptor must be a JSON object")
    missing = [k for k in ("kind", "kappa", "R") if k not in desc]
    if missing:
        raise ValueError(f"descriptor is missing {missing}")
    kind = desc["kind"]
    params = dict(desc.get("params") or {})
    ctx = WaveContext(float(desc["kappa"]), float(desc["R"]))
    builders = {
        "curlcurl": curlcurl_source,
        "gradient": gradient_source,
        "bessel_pair": bessel_pair_source,
        "bessel_single": bessel_single_source,
        "dipole_ball": dipole_ball_source,
    }
    if kind not in builders:
        raise ValueError(f"unknown source kind {kind!r}; expected one of {SOURCE_KINDS}")
    try:
        spec = builders[kind](ctx, **params)
    except TypeError as exc:
        raise ValueError(f"bad params for {kind!r}: {exc}") from None
    return ctx, spec


def load_descriptor(path):
    with open(path) as fh:
        desc = json.load(fh)
    return from_descriptor(desc)


def to_descriptor(spec):
    params = {k: v for k, v in spec.params.items() if k not in ("N1", "N2")}
    return {"kind": spec.name, "params": params, "kappa": spec.kappa, "R": spec.R}


def default_descriptor(kind):
    """Canonical parameters used by ``verify`` and the examples."""
    if kind in ("bessel_pair", "bessel_single"):
        kappa, R = math.pi, 1.0
    else:
        kappa, R = 1.0, 1.0
    params = {
        "curlcurl": {"p": [0.0, 0.0, 1.0], "rho": 0.5},
        "gradient": {"rho": 0.5},
        "bessel_pair": {"m1": 3, "m2": 4},
        "bessel_single": {"s": 3},
        "dipole_ball": {"p": [0.0, 0.0, 1.0], "rho": 0.5},
    }[kind]
    return {"kind": kind, "params": params, "kappa": kappa, "R": R}

