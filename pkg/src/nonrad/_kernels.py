"""
Compiled loops for the dyadic-kernel sums used by the field evaluators.

Falls back to ``available = False`` when numba is missing; callers then
use the blocked numpy implementation.
"""

import math

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

available = numba is not None

_FOUR_PI = 4.0 * math.pi


def _field_only(x, y, wJ, kappa):
    K, M = x.shape[0], y.shape[0]
    k2 = 1.0 / (kappa * kappa)
    out = np.zeros((K, 3), dtype=np.complex128)
    for i in range(K):
        e0 = 0j
        e1 = 0j
        e2 = 0j
        for j in range(M):
            d0 = x[i, 0] - y[j, 0]
            d1 = x[i, 1] - y[j, 1]
            d2 = x[i, 2] - y[j, 2]
            rho = math.sqrt(d0 * d0 + d1 * d1 + d2 * d2)
            inv = 1.0 / rho
            n0, n1, n2 = d0 * inv, d1 * inv, d2 * inv
            a = complex(-inv, kappa)
            F = complex(math.cos(kappa * rho), math.sin(kappa * rho)) * (inv / _FOUR_PI)
            F1 = F * a
            F2 = F * (a * a + inv * inv)
            B = F1 * inv
            A = F2 - B
            w0, w1, w2 = wJ[j, 0], wJ[j, 1], wJ[j, 2]
            nJ = n0 * w0 + n1 * w1 + n2 * w2
            c = F + k2 * B
            t = k2 * A * nJ
            e0 += c * w0 + t * n0
            e1 += c * w1 + t * n1
            e2 += c * w2 + t * n2
        out[i, 0] = e0
        out[i, 1] = e1
        out[i, 2] = e2
    return out


def _field_and_jacobian(x, y, wJ, kappa):
    K, M = x.shape[0], y.shape[0]
    k2 = 1.0 / (kappa * kappa)
    E = np.zeros((K, 3), dtype=np.complex128)
    D = np.zeros((K, 3, 3), dtype=np.complex128)
    n = np.empty(3)
    u = np.empty(3, dtype=np.complex128)
    v = np.empty(3, dtype=np.complex128)
    for i in range(K):
        acc = np.zeros((3, 3), dtype=np.complex128)
        e0 = 0j
        e1 = 0j
        e2 = 0j
        diag = 0j
        for j in range(M):
            d0 = x[i, 0] - y[j, 0]
            d1 = x[i, 1] - y[j, 1]
            d2 = x[i, 2] - y[j, 2]
            rho = math.sqrt(d0 * d0 + d1 * d1 + d2 * d2)
            inv = 1.0 / rho
            n[0] = d0 * inv
            n[1] = d1 * inv
            n[2] = d2 * inv
            w0, w1, w2 = wJ[j, 0], wJ[j, 1], wJ[j, 2]
            a = complex(-inv, kappa)
            inv2 = inv * inv
            F = complex(math.cos(kappa * rho), math.sin(kappa * rho)) * (inv / _FOUR_PI)
            F1 = F * a
            F2 = F * (a * a + inv2)
            F3 = F * (a * a * a + 3.0 * a * inv2 - 2.0 * inv2 * inv)
            B = F1 * inv
            A = F2 - B
            Ar = A * inv
            nJ = n[0] * w0 + n[1] * w1 + n[2] * w2
            c = F + k2 * B
            t = k2 * A * nJ
            e0 += c * w0 + t * n[0]
            e1 += c * w1 + t * n[1]
            e2 += c * w2 + t * n[2]
            # d_m E_l = c1 w_l n_m + c3 n_l w_m + q n_l n_m + delta_lm c3 (n.J)
            c1 = F1 + k2 * (F2 * inv - F1 * inv2)
            c3 = k2 * Ar
            q = k2 * (F3 - F2 * inv + F1 * inv2 - 2.0 * Ar) * nJ
            u[0] = c1 * w0
            u[1] = c1 * w1
            u[2] = c1 * w2
            v[0] = c3 * w0
            v[1] = c3 * w1
            v[2] = c3 * w2
            for l in range(3):
                qn = q * n[l]
                for m in range(3):
                    acc[l, m] += u[l] * n[m] + n[l] * v[m] + qn * n[m]
            diag += c3 * nJ
        E[i, 0] = e0
        E[i, 1] = e1
        E[i, 2] = e2
        for l in range(3):
            for m in range(3):
                D[i, l, m] = acc[l, m]
            D[i, l, l] += diag
    return E, D


if available:
    field_only = numba.njit(cache=True, fastmath=False)(_field_only)
    field_and_jacobian = numba.njit(cache=True, fastmath=False)(_field_and_jacobian)
else:  # pragma: no cover
    field_only = _field_only
    field_and_jacobian = _field_and_jacobian


def _rotated_kernels(x0, ys, cphi, sphi, kappa):
    # KG[Q, j, l, e] = sum_b G_lb(x0, y_Qj) Rot_be(phi_j), KD likewise with d_c
    Q, npz = ys.shape[0], ys.shape[1]
    k2 = 1.0 / (kappa * kappa)
    KG = np.empty((Q, npz, 3, 3), dtype=np.complex128)
    KD = np.empty((Q, npz, 3, 3, 3), dtype=np.complex128)
    n = np.empty(3)
    G = np.empty((3, 3), dtype=np.complex128)
    dG = np.empty((3, 3, 3), dtype=np.complex128)
    Rm = np.zeros((3, 3))
    Rm[2, 2] = 1.0
    for q in range(Q):
        for j in range(npz):
            d0 = x0[0] - ys[q, j, 0]
            d1 = x0[1] - ys[q, j, 1]
            d2 = x0[2] - ys[q, j, 2]
            rho = math.sqrt(d0 * d0 + d1 * d1 + d2 * d2)
            inv = 1.0 / rho
            inv2 = inv * inv
            n[0] = d0 * inv
            n[1] = d1 * inv
            n[2] = d2 * inv
            a = complex(-inv, kappa)
            F = complex(math.cos(kappa * rho), math.sin(kappa * rho)) * (inv / _FOUR_PI)
            F1 = F * a
            F2 = F * (a * a + inv2)
            F3 = F * (a * a * a + 3.0 * a * inv2 - 2.0 * inv2 * inv)
            B = F1 * inv
            A = F2 - B
            Ar = A * inv
            cI = F + k2 * B
            cA = k2 * A
            c1 = F1 + k2 * (F2 * inv - F1 * inv2)
            c2 = k2 * (F3 - F2 * inv + F1 * inv2 - 2.0 * Ar)
            c3 = k2 * Ar
            for l in range(3):
                for b in range(3):
                    g = cA * n[l] * n[b]
                    if l == b:
                        g += cI
                    G[l, b] = g
                    for c in range(3):
                        v = c2 * n[l] * n[b] * n[c]
                        if l == b:
                            v += c1 * n[c]
                        if l == c:
                            v += c3 * n[b]
                        if b == c:
                            v += c3 * n[l]
                        dG[l, b, c] = v
            Rm[0, 0] = cphi[j]
            Rm[0, 1] = -sphi[j]
            Rm[1, 0] = sphi[j]
            Rm[1, 1] = cphi[j]
            for l in range(3):
                for e in range(3):
                    acc = 0j
                    for b in range(3):
                        acc += G[l, b] * Rm[b, e]
                    KG[q, j, l, e] = acc
                    for c in range(3):
                        acc = 0j
                        for b in range(3):
                            acc += dG[l, b, c] * Rm[b, e]
                        KD[q, j, l, c, e] = acc
    return KG, KD


def _freq_contract(AG, AD, FW):
    # sum over Q and e of A[Q, q, ..., e] FW[Q, q, e]
    Q, npz = FW.shape[0], FW.shape[1]
    CG = np.zeros((npz, 3), dtype=np.complex128)
    CD = np.zeros((npz, 3, 3), dtype=np.complex128)
    for q in range(Q):
        for k in range(npz):
            for l in range(3):
                for e in range(3):
                    w = FW[q, k, e]
                    CG[k, l] += AG[q, k, l, e] * w
                    for c in range(3):
                        CD[k, l, c] += AD[q, k, l, c, e] * w
    return CG, CD


if available:
    rotated_kernels = numba.njit(cache=True)(_rotated_kernels)
    freq_contract = numba.njit(cache=True)(_freq_contract)
else:  # pragma: no cover
    rotated_kernels = _rotated_kernels
    freq_contract = _freq_contract
