"""
Spherical Bessel functions, associated Legendre functions and spherical
harmonics.

Conventions
-----------
The associated Legendre functions carry NO Condon-Shortley phase::

    P_n^m(t) = (1 - t^2)^(m/2) d^m/dt^m P_n(t),   0 <= m <= n

and the spherical harmonics are

    Y_n^m(theta, phi) = N_n^m P_n^|m|(cos theta) exp(i m phi),
    N_n^m = sqrt((2n+1) (n-|m|)! / (4 pi (n+|m|)!)).

With this choice ``conj(Y_n^m(theta, phi)) == Y_n^m(theta, -phi)`` and
``Y_n^{-m} == conj(Y_n^m)``.

Harmonics of all degrees up to ``nmax`` are stored in a flat layout with
``lm_index(n, m) = n*n + n + m``.
"""

import numpy as np

__all__ = [
    "lm_index",
    "lm_pairs",
    "sph_jn_all",
    "sph_yn_all",
    "sph_bessel_j",
    "sph_bessel_y",
    "sph_hankel1",
    "sph_jn_derivs",
    "assoc_legendre",
    "legendre_table",
    "sph_harmonic",
    "sph_harmonics_all",
]

_BIG = 1e200


def lm_index(n, m):
    """Flat index of (n, m) in the ``(nmax+1)**2`` harmonic layout."""
    return n * n + n + m


def lm_pairs(nmax):
    """List of (n, m) in flat-index order."""
    return [(n, m) for n in range(nmax + 1) for m in range(-n, n + 1)]


def _miller_start(nmax, xmax):
    top = max(nmax, xmax)
    return int(top + 20 + 4.0 * np.sqrt(top + 1.0))


def sph_jn_all(nmax, x):
    """
    Spherical Bessel functions j_0 ... j_nmax.

    Downward (Miller) recurrence normalised against j_0 or j_1, whichever
    is larger in magnitude at each point.

    Parameters
    ----------
    nmax : int
        Highest order.
    x : array_like
        Non-negative arguments.

    Returns
    -------
    ndarray, shape (nmax + 1,) + x.shape
    """
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise ValueError("sph_jn_all needs finite x >= 0")
    shape = x.shape
    xf = x.ravel()
    out = np.zeros((nmax + 1, xf.size))
    zero = xf == 0.0
    out[0, zero] = 1.0
    pos = ~zero
    if not np.any(pos):
        return out.reshape((nmax + 1,) + shape)

    xp = xf[pos]
    start = _miller_start(nmax, float(xp.max()))
    upper = np.zeros_like(xp)
    cur = np.full_like(xp, 1e-300)
    vals = np.zeros((nmax + 1, xp.size))
    if start <= nmax:
        vals[start] = cur
    # j_{k-1} = (2k+1)/x j_k - j_{k+1}
    for k in range(start, 0, -1):
        lower = (2 * k + 1) / xp * cur - upper
        upper, cur = cur, lower
        if k - 1 <= nmax:
            vals[k - 1] = cur
        big = np.abs(cur) > _BIG
        if np.any(big):
            cur[big] /= _BIG
            upper[big] /= _BIG
            vals[:, big] /= _BIG
    # cur = j_0 (unnormalised), upper = j_1 (unnormalised)
    s, c = np.sin(xp), np.cos(xp)
    j0 = s / xp
    j1 = s / xp**2 - c / xp
    use0 = np.abs(j0) >= np.abs(j1)
    scale = np.where(use0, j0 / np.where(use0, cur, 1.0),
                     j1 / np.where(use0, 1.0, upper))
    out[:, pos] = vals * scale
    out[0, pos] = j0
    return out.reshape((nmax + 1,) + shape)


def sph_yn_all(nmax, x):
    """
    Spherical Neumann functions y_0 ... y_nmax by upward recurrence.

    ``x`` must be strictly positive.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("spherical Neumann functions are singular at x = 0")
    out = np.empty((nmax + 1,) + x.shape)
    s, c = np.sin(x), np.cos(x)
    out[0] = -c / x
    if nmax >= 1:
        out[1] = -c / x**2 - s / x
    for n in range(1, nmax):
        out[n + 1] = (2 * n + 1) / x * out[n] - out[n - 1]
    return out


def sph_bessel_j(n, x):
    """Spherical Bessel function j_n(x) for x >= 0."""
    if n < 0:
        raise ValueError("order must be >= 0")
    res = sph_jn_all(n, x)[n]
    return res if res.ndim else float(res)


def sph_bessel_y(n, x):
    """Spherical Neumann function y_n(x) for x > 0."""
    if n < 0:
        raise ValueError("order must be >= 0")
    res = sph_yn_all(n, x)[n]
    return res if res.ndim else float(res)


def sph_hankel1(n, x):
    """
    Spherical Hankel function of the first kind, h_n^(1) = j_n + i y_n.

    Raises ValueError at x = 0 where y_n is singular.
    """
    if n < 0:
        raise ValueError("order must be >= 0")
    res = sph_jn_all(n, x)[n] + 1j * sph_yn_all(n, x)[n]
    return res if res.ndim else complex(res)


def sph_jn_derivs(nmax, x, kind="j"):
    """
    Values, first and second derivatives of j_n (or h_n^(1)), n <= nmax.

    Uses ``f_n' = (n f_{n-1} - (n+1) f_{n+1}) / (2n+1)`` twice, which stays
    regular at x = 0 for ``kind="j"``.

    Returns
    -------
    f, df, d2f : ndarray, each shape (nmax + 1,) + x.shape
    """
    x = np.asarray(x, dtype=float)
    if kind == "j":
        f = sph_jn_all(nmax + 2, x)
    elif kind == "h":
        f = sph_jn_all(nmax + 2, x) + 1j * sph_yn_all(nmax + 2, x)
    else:
        raise ValueError("kind must be 'j' or 'h'")
    df = _recur_deriv(f, nmax + 1)
    d2f = _recur_deriv(df, nmax)
    return f[: nmax + 1], df[: nmax + 1], d2f


def _recur_deriv(f, nmax):
    # f holds orders 0..nmax+1 at least
    d = np.empty((nmax + 1,) + f.shape[1:], dtype=f.dtype)
    d[0] = -f[1]
    for n in range(1, nmax + 1):
        d[n] = (n * f[n - 1] - (n + 1) * f[n + 1]) / (2 * n + 1)
    return d


def assoc_legendre(n, m_abs, t):
    """
    Associated Legendre function P_n^m(t) without Condon-Shortley phase.

    Upward recurrence in degree on fixed order, seeded from
    ``P_m^m = (2m-1)!! (1-t^2)^(m/2)``.
    """
    if n < 0 or m_abs < 0 or m_abs > n:
        raise ValueError("need 0 <= m_abs <= n")
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0):
        raise ValueError("t must lie in [-1, 1]")
    m = m_abs
    s = np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    pmm = np.ones_like(t)
    for k in range(1, m + 1):
        pmm = pmm * (2 * k - 1) * s
    if n == m:
        res = pmm
    else:
        p_prev, p_cur = pmm, (2 * m + 1) * t * pmm
        for k in range(m + 2, n + 1):
            p_prev, p_cur = p_cur, ((2 * k - 1) * t * p_cur - (k + m - 1) * p_prev) / (k - m)
        res = p_cur
    return res if res.ndim else float(res)


def legendre_table(nmax, theta, derivs=0):
    """
    Normalised functions ``N_n^m P_n^m(cos theta)`` for 0 <= m <= n <= nmax.

    Parameters
    ----------
    nmax : int
    theta : array_like
        Polar angles.
    derivs : {0, 1, 2}
        Also return first / second theta-derivatives.

    Returns
    -------
    ndarray or tuple of ndarray
        Each of shape (nmax + 1, nmax + 1) + theta.shape, indexed [n, m];
        entries with m > n are zero.
    """
    theta = np.asarray(theta, dtype=float)
    t = np.cos(theta)
    s = np.sin(theta)
    P = np.zeros((nmax + 1, nmax + 1) + theta.shape)
    P[0, 0] = 1.0 / np.sqrt(4.0 * np.pi)
    for m in range(1, nmax + 1):
        P[m, m] = np.sqrt((2 * m + 1) / (2.0 * m)) * s * P[m - 1, m - 1]
    for m in range(0, nmax):
        P[m + 1, m] = np.sqrt(2 * m + 3.0) * t * P[m, m]
    for m in range(0, nmax + 1):
        for n in range(m + 2, nmax + 1):
            a = np.sqrt((4.0 * n * n - 1) / (n * n - m * m))
            b = np.sqrt(((n - 1.0) ** 2 - m * m) / (4.0 * (n - 1) ** 2 - 1))
            P[n, m] = a * (t * P[n - 1, m] - b * P[n - 2, m])
    if derivs == 0:
        return P

    dP = np.zeros_like(P)
    for n in range(1, nmax + 1):
        dP[n, 0] = -np.sqrt(n * (n + 1.0)) * P[n, 1]
        for m in range(1, n + 1):
            up = np.sqrt((n - m) * (n + m + 1.0)) * P[n, m + 1] if m < n else 0.0
            dn = np.sqrt((n + m) * (n - m + 1.0)) * P[n, m - 1]
            dP[n, m] = 0.5 * (dn - up)
    if derivs == 1:
        return P, dP

    # Legendre ODE in theta; theta must avoid the poles here
    with np.errstate(divide="ignore", invalid="ignore"):
        cot = t / s
        inv_s2 = 1.0 / (s * s)
    nn = np.arange(nmax + 1).reshape((-1, 1) + (1,) * theta.ndim)
    mm = np.arange(nmax + 1).reshape((1, -1) + (1,) * theta.ndim)
    d2P = -cot * dP - (nn * (nn + 1) - mm * mm * inv_s2) * P
    return P, dP, d2P


def sph_harmonic(n, m, theta, phi):
    """
    Spherical harmonic Y_n^m(theta, phi) in the convention of this module.
    """
    if n < 0 or abs(m) > n:
        raise ValueError("need |m| <= n")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    Pn = legendre_table(n, theta)[n, abs(m)]
    res = Pn * np.exp(1j * m * phi)
    return res if res.ndim else complex(res)


def sph_harmonics_all(nmax, theta, phi):
    """
    All Y_n^m with n <= nmax, flat layout, shape ((nmax+1)**2,) + broadcast shape.
    """
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    P = legendre_table(nmax, theta)
    out = np.empty(((nmax + 1) ** 2,) + theta.shape, dtype=complex)
    for n in range(nmax + 1):
        for m in range(-n, n + 1):
            out[lm_index(n, m)] = P[n, abs(m)] * np.exp(1j * m * phi)
    return out
