"""Hot loops of the collective-spin code, in numba and pure-numpy versions.

Both versions take identical arguments. ``pure_rk4``, ``lindblad_rk4`` and
``wigner_3j_doubled`` dispatch to one or the other according to
``_backend.USE_NUMBA``.

The LMG Hamiltonian is handled in banded form on the |J, m> basis ordered
m = J, J-1, ..., -J:

    H(t) psi = a * psi - c(t) * (d * psi + e-band),

where ``a`` is the (shifted) diagonal of -omega Jz, ``d`` and ``e`` are the
diagonal and second off-diagonal of Jx^2, and c(t) = g(t)^2 omega / N. The
coefficients c at the three RK4 stage times of every step are precomputed as
an array of shape (n_steps, 3).
"""
import math

import numpy as np

from . import _backend
from ._backend import njit


# ---------------------------------------------------------------- numba

@njit(cache=True)
def _apply_h_nb(x, a, d, e, c, out):
    n = x.shape[0]
    for i in range(n):
        acc = (a[i] - c * d[i]) * x[i]
        if i + 2 < n:
            acc -= c * e[i] * x[i + 2]
        if i >= 2:
            acc -= c * e[i - 2] * x[i - 2]
        out[i] = -1j * acc


@njit(cache=True)
def _pure_rk4_nb(psi, a, d, e, coef, h):
    n = psi.shape[0]
    k1 = np.empty(n, dtype=np.complex128)
    k2 = np.empty(n, dtype=np.complex128)
    k3 = np.empty(n, dtype=np.complex128)
    k4 = np.empty(n, dtype=np.complex128)
    tmp = np.empty(n, dtype=np.complex128)
    for s in range(coef.shape[0]):
        _apply_h_nb(psi, a, d, e, coef[s, 0], k1)
        for i in range(n):
            tmp[i] = psi[i] + 0.5 * h * k1[i]
        _apply_h_nb(tmp, a, d, e, coef[s, 1], k2)
        for i in range(n):
            tmp[i] = psi[i] + 0.5 * h * k2[i]
        _apply_h_nb(tmp, a, d, e, coef[s, 1], k3)
        for i in range(n):
            tmp[i] = psi[i] + h * k3[i]
        _apply_h_nb(tmp, a, d, e, coef[s, 2], k4)
        for i in range(n):
            psi[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    return psi


@njit(cache=True)
def _liouvillian_nb(rho, a, d, e, jp, dd, c, kappa, out):
    # -i[H, rho] + kappa (J+ rho J- - {D, rho}/2), D = J- J+ (diagonal)
    # jp[i] = <i-1|J+|i> for i >= 1
    n = rho.shape[0]
    for i in range(n):
        hii = a[i] - c * d[i]
        for j in range(n):
            hjj = a[j] - c * d[j]
            # (H rho)_ij
            hr = hii * rho[i, j]
            if i + 2 < n:
                hr -= c * e[i] * rho[i + 2, j]
            if i >= 2:
                hr -= c * e[i - 2] * rho[i - 2, j]
            # (rho H)_ij
            rh = rho[i, j] * hjj
            if j + 2 < n:
                rh -= c * rho[i, j + 2] * e[j]
            if j >= 2:
                rh -= c * rho[i, j - 2] * e[j - 2]
            val = -1j * (hr - rh)
            if kappa != 0.0:
                jump = 0.0j
                if i + 1 < n and j + 1 < n:
                    jump = jp[i + 1] * rho[i + 1, j + 1] * jp[j + 1]
                val += kappa * (jump - 0.5 * (dd[i] + dd[j]) * rho[i, j])
            out[i, j] = val


@njit(cache=True)
def _lindblad_rk4_nb(rho, a, d, e, jp, dd, kappa, coef, h):
    n = rho.shape[0]
    k1 = np.empty((n, n), dtype=np.complex128)
    k2 = np.empty((n, n), dtype=np.complex128)
    k3 = np.empty((n, n), dtype=np.complex128)
    k4 = np.empty((n, n), dtype=np.complex128)
    tmp = np.empty((n, n), dtype=np.complex128)
    for s in range(coef.shape[0]):
        _liouvillian_nb(rho, a, d, e, jp, dd, coef[s, 0], kappa, k1)
        for i in range(n):
            for j in range(n):
                tmp[i, j] = rho[i, j] + 0.5 * h * k1[i, j]
        _liouvillian_nb(tmp, a, d, e, jp, dd, coef[s, 1], kappa, k2)
        for i in range(n):
            for j in range(n):
                tmp[i, j] = rho[i, j] + 0.5 * h * k2[i, j]
        _liouvillian_nb(tmp, a, d, e, jp, dd, coef[s, 1], kappa, k3)
        for i in range(n):
            for j in range(n):
                tmp[i, j] = rho[i, j] + h * k3[i, j]
        _liouvillian_nb(tmp, a, d, e, jp, dd, coef[s, 2], kappa, k4)
        for i in range(n):
            for j in range(n):
                rho[i, j] += h / 6.0 * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
    return rho


@njit(cache=True)
def _wigner_3j_nb(tj1, tj2, tj3, tm1, tm2, tm3, logfact):
    # arguments are doubled angular momenta; caller has checked selection rules
    j1p = (tj1 + tj2 - tj3) // 2
    j1m = (tj1 - tj2 + tj3) // 2
    j23 = (-tj1 + tj2 + tj3) // 2
    jsum = (tj1 + tj2 + tj3) // 2
    lpre = (logfact[j1p] + logfact[j1m] + logfact[j23] - logfact[jsum + 1]
            + logfact[(tj1 + tm1) // 2] + logfact[(tj1 - tm1) // 2]
            + logfact[(tj2 + tm2) // 2] + logfact[(tj2 - tm2) // 2]
            + logfact[(tj3 + tm3) // 2] + logfact[(tj3 - tm3) // 2])
    a1 = (tj3 - tj2 + tm1) // 2
    a2 = (tj3 - tj1 - tm2) // 2
    b1 = j1p
    b2 = (tj1 - tm1) // 2
    b3 = (tj2 + tm2) // 2
    kmin = max(0, -a1, -a2)
    kmax = min(b1, b2, b3)
    # Neumaier-compensated alternating sum
    total = 0.0
    comp = 0.0
    for k in range(kmin, kmax + 1):
        lt = 0.5 * lpre - (logfact[k] + logfact[a1 + k] + logfact[a2 + k]
                           + logfact[b1 - k] + logfact[b2 - k] + logfact[b3 - k])
        term = math.exp(lt)
        if k % 2 == 1:
            term = -term
        s = total + term
        if abs(total) >= abs(term):
            comp += (total - s) + term
        else:
            comp += (term - s) + total
        total = s
    val = total + comp
    ph = (tj1 - tj2 - tm3) // 2
    if ph % 2 != 0:
        val = -val
    return val


# ---------------------------------------------------------------- numpy

def _apply_h_np(x, a, d, e, c):
    y = (a - c * d) * x
    y[:-2] -= c * e * x[2:]
    y[2:] -= c * e * x[:-2]
    return -1j * y


def _pure_rk4_np(psi, a, d, e, coef, h):
    for c1, c2, c3 in coef:
        k1 = _apply_h_np(psi, a, d, e, c1)
        k2 = _apply_h_np(psi + 0.5 * h * k1, a, d, e, c2)
        k3 = _apply_h_np(psi + 0.5 * h * k2, a, d, e, c2)
        k4 = _apply_h_np(psi + h * k3, a, d, e, c3)
        psi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return psi


def _liouvillian_np(rho, a, d, e, jp, dd, c, kappa):
    hd = a - c * d
    hr = hd[:, None] * rho
    hr[:-2, :] -= c * e[:, None] * rho[2:, :]
    hr[2:, :] -= c * e[:, None] * rho[:-2, :]
    rh = rho * hd[None, :]
    rh[:, :-2] -= c * rho[:, 2:] * e[None, :]
    rh[:, 2:] -= c * rho[:, :-2] * e[None, :]
    out = -1j * (hr - rh)
    if kappa != 0.0:
        out[:-1, :-1] += kappa * (jp[1:, None] * rho[1:, 1:] * jp[None, 1:])
        out -= 0.5 * kappa * (dd[:, None] + dd[None, :]) * rho
    return out


def _lindblad_rk4_np(rho, a, d, e, jp, dd, kappa, coef, h):
    for c1, c2, c3 in coef:
        k1 = _liouvillian_np(rho, a, d, e, jp, dd, c1, kappa)
        k2 = _liouvillian_np(rho + 0.5 * h * k1, a, d, e, jp, dd, c2, kappa)
        k3 = _liouvillian_np(rho + 0.5 * h * k2, a, d, e, jp, dd, c2, kappa)
        k4 = _liouvillian_np(rho + h * k3, a, d, e, jp, dd, c3, kappa)
        rho += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return rho


def _wigner_3j_np(tj1, tj2, tj3, tm1, tm2, tm3, logfact):
    j1p = (tj1 + tj2 - tj3) // 2
    jsum = (tj1 + tj2 + tj3) // 2
    lpre = (logfact[j1p] + logfact[(tj1 - tj2 + tj3) // 2] + logfact[(-tj1 + tj2 + tj3) // 2]
            - logfact[jsum + 1]
            + logfact[(tj1 + tm1) // 2] + logfact[(tj1 - tm1) // 2]
            + logfact[(tj2 + tm2) // 2] + logfact[(tj2 - tm2) // 2]
            + logfact[(tj3 + tm3) // 2] + logfact[(tj3 - tm3) // 2])
    a1 = (tj3 - tj2 + tm1) // 2
    a2 = (tj3 - tj1 - tm2) // 2
    b2 = (tj1 - tm1) // 2
    b3 = (tj2 + tm2) // 2
    k = np.arange(max(0, -a1, -a2), min(j1p, b2, b3) + 1)
    lt = 0.5 * lpre - (logfact[k] + logfact[a1 + k] + logfact[a2 + k]
                       + logfact[j1p - k] + logfact[b2 - k] + logfact[b3 - k])
    terms = np.where(k % 2 == 1, -1.0, 1.0) * np.exp(lt)
    val = math.fsum(terms)
    return -val if ((tj1 - tj2 - tm3) // 2) % 2 else val


# ---------------------------------------------------------------- dispatch

def pure_rk4(psi, a, d, e, coef, h):
    if _backend.USE_NUMBA:
        return _pure_rk4_nb(psi, a, d, e, coef, h)
    return _pure_rk4_np(psi, a, d, e, coef, h)


def lindblad_rk4(rho, a, d, e, jp, dd, kappa, coef, h):
    if _backend.USE_NUMBA:
        return _lindblad_rk4_nb(rho, a, d, e, jp, dd, float(kappa), coef, h)
    return _lindblad_rk4_np(rho, a, d, e, jp, dd, float(kappa), coef, h)


def wigner_3j_doubled(tj1, tj2, tj3, tm1, tm2, tm3, logfact):
    if _backend.USE_NUMBA:
        return _wigner_3j_nb(tj1, tj2, tj3, tm1, tm2, tm3, logfact)
    return _wigner_3j_np(tj1, tj2, tj3, tm1, tm2, tm3, logfact)
