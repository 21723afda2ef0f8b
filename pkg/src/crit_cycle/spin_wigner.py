"""Spin Wigner function on the sphere from multipole moments.

W(theta, phi) = sum_{k, q} Y_kq(theta, phi) rho_kq with rho_kq = Tr[rho T_kq^dag]
and the multipole operators

    T_kq = sum_{m, m'} (-1)^(J - m) sqrt(2k + 1) (J k J; -m q m') |J, m><J, m'|.

For a unit-trace state only k = 0 survives the sphere integral, so
int W dOmega = sqrt(4 pi / (2J + 1)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CapacityError, DomainError

MULTIPOLE_CEILING = 60
DEFAULT_GRID = (181, 361)

_LOGFACT = np.zeros(1)


def _logfact(n):
    """log(k!) for k = 0..n, extended on demand."""
    global _LOGFACT
    if len(_LOGFACT) <= n:
        size = max(n + 1, 2 * len(_LOGFACT))
        _LOGFACT = np.array([math.lgamma(k + 1.0) for k in range(size)])
    return _LOGFACT


def _doubled(x, name):
    t = round(2 * x)
    if abs(2 * x - t) > 1e-9:
        raise DomainError(f"{name} must be an integer or half-integer")
    return int(t)


def _selection_ok(tj1, tj2, tj3, tm1, tm2, tm3):
    if min(tj1, tj2, tj3) < 0 or tm1 + tm2 + tm3 != 0:
        return False
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tj3, tm3)):
        if abs(tm) > tj or (tj + tm) % 2:
            return False
    if tj3 < abs(tj1 - tj2) or tj3 > tj1 + tj2 or (tj1 + tj2 + tj3) % 2:
        return False
    return True


def wigner_3j(j1, j2, j3, m1, m2, m3) -> float:
    """Wigner 3j symbol by the Racah sum in log-factorials; 0 when selection rules fail."""
    t = [_doubled(x, n) for x, n in zip((j1, j2, j3, m1, m2, m3),
                                        ("j1", "j2", "j3", "m1", "m2", "m3"))]
    if not _selection_ok(*t):
        return 0.0
    lf = _logfact((t[0] + t[1] + t[2]) // 2 + 1)
    return float(kernels.wigner_3j_doubled(*t, lf))


@dataclass(frozen=True)
class MultipoleBasis:
    """T_kq stacked as T[k*k + k + q] for k = 0..2J, q = -k..k."""

    N: int
    T: np.ndarray

    @property
    def J(self):
        return self.N / 2

    @property
    def kmax(self):
        return self.N

    @staticmethod
    def index(k, q):
        return k * k + k + q

    def get(self, k, q):
        return self.T[self.index(k, q)]

    def moments(self, rho):
        """rho_kq = Tr[rho T_kq^dag] for every (k, q)."""
        return np.einsum("ij,kij->k", rho, self.T.conj())


def build_multipoles(N) -> MultipoleBasis:
    if int(N) != N or N < 1:
        raise DomainError("N must be a positive integer")
    if N > MULTIPOLE_CEILING:
        raise CapacityError(f"multipole basis supports N <= {MULTIPOLE_CEILING}")
    N = int(N)
    dim = N + 1
    tJ = N
    lf = _logfact(2 * N + 2)
    T = np.zeros((dim * dim, dim, dim))
    for k in range(N + 1):
        norm = math.sqrt(2 * k + 1)
        for q in range(-k, k + 1):
            slab = T[k * k + k + q]
            for i in range(dim):
                j = i + q  # m' = m - q
                if not 0 <= j < dim:
                    continue
                tm = tJ - 2 * i
                tmp = tJ - 2 * j
                sign = -1.0 if ((tJ - tm) // 2) % 2 else 1.0
                if _selection_ok(tJ, 2 * k, tJ, -tm, 2 * q, tmp):
                    slab[i, j] = sign * norm * kernels.wigner_3j_doubled(
                        tJ, 2 * k, tJ, -tm, 2 * q, tmp, lf)
    return MultipoleBasis(N, T)


def _normalized_legendre(kmax, theta):
    """P[k, q, :] = sqrt((2k+1)/(4 pi) (k-q)!/(k+q)!) P_k^q(cos theta), Condon-Shortley phase.

    Diagonal terms by the sin(theta) recurrence, then upward in degree.
    """
    theta = np.asarray(theta, dtype=float)
    x, sx = np.cos(theta), np.sin(theta)
    P = np.zeros((kmax + 1, kmax + 1) + theta.shape)
    P[0, 0] = 1.0 / math.sqrt(4 * math.pi)
    for m in range(1, kmax + 1):
        P[m, m] = -math.sqrt((2 * m + 1) / (2.0 * m)) * sx * P[m - 1, m - 1]
    for m in range(kmax):
        P[m + 1, m] = math.sqrt(2 * m + 3) * x * P[m, m]
    for m in range(kmax + 1):
        for l in range(m + 2, kmax + 1):
            a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
            b = math.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
            P[l, m] = a * (x * P[l - 1, m] - b * P[l - 2, m])
    return P


def spherical_harmonic(k, q, theta, phi):
    """Y_kq(theta, phi) with the Condon-Shortley phase; theta is the polar angle."""
    if abs(q) > k:
        raise DomainError("need |q| <= k")
    theta = np.asarray(theta, dtype=float)
    if np.any(theta < 0) or np.any(theta > math.pi):
        raise DomainError("theta must lie in [0, pi]")
    P = _normalized_legendre(k, theta)[k, abs(q)]
    Y = P * np.exp(1j * abs(q) * np.asarray(phi, dtype=float))
    if q < 0:
        Y = (-1) ** abs(q) * np.conj(Y)
    return Y if np.ndim(Y) else complex(Y)


@dataclass(frozen=True)
class WignerGrid:
    theta: np.ndarray
    phi: np.ndarray
    values: np.ndarray  # shape (len(theta), len(phi))
    imag_residue: float
    N: int

    @property
    def normalization(self):
        """Quadrature of int W sin(theta) dtheta dphi.

        Trapezoid rule in both angles. In theta the integrand f sin(theta) has
        slopes f(0) and -f(pi) at the poles, so the leading h^2/12 error term is
        added back (end-corrected trapezoid, O(h^4) on a uniform grid).
        """
        f = np.trapezoid(self.values, self.phi, axis=1)
        total = np.trapezoid(f * np.sin(self.theta), self.theta)
        h = self.theta[1] - self.theta[0]
        if np.isclose(self.theta[0], 0.0) and np.isclose(self.theta[-1], math.pi):
            total += h * h / 12.0 * (f[0] + f[-1])
        return float(total)

    @property
    def expected_normalization(self):
        return math.sqrt(4 * math.pi / (self.N + 1))

    csv_header = ("theta", "phi", "W")

    def rows(self):
        for i, th in enumerate(self.theta):
            for j, ph in enumerate(self.phi):
                yield (th, ph, self.values[i, j])

    def matrix_rows(self):
        """Rows of theta, columns of phi, for gnuplot's ``matrix nonuniform``."""
        yield (len(self.phi),) + tuple(self.phi)
        for th, row in zip(self.theta, self.values):
            yield (th,) + tuple(row)


def wigner_function(state, grid=DEFAULT_GRID, theta=None, phi=None,
                    basis: MultipoleBasis = None) -> WignerGrid:
    """Evaluate W on a (theta, phi) grid for a SpinState or SpinDensityMatrix.

    The default grid spans theta in [0, pi] and phi in [0, 2 pi] inclusive.
    """
    N = state.N
    basis = basis or build_multipoles(N)
    rho = state.density().rho
    if theta is None:
        theta = np.linspace(0.0, math.pi, grid[0])
    if phi is None:
        phi = np.linspace(0.0, 2 * math.pi, grid[1])
    theta, phi = np.asarray(theta, float), np.asarray(phi, float)
    mom = basis.moments(rho)
    P = _normalized_legendre(N, theta)
    # A_q(theta) = sum_k Y_kq(theta, 0) rho_kq, then W = sum_q A_q e^{i q phi}
    qs = np.arange(-N, N + 1)
    A = np.zeros((len(qs), len(theta)), dtype=complex)
    for k in range(N + 1):
        for q in range(-k, k + 1):
            p = P[k, abs(q)] if q >= 0 else (-1) ** q * P[k, -q]
            A[q + N] += p * mom[k * k + k + q]
    W = A.T @ np.exp(1j * np.outer(qs, phi))
    return WignerGrid(theta, phi, W.real, float(np.max(np.abs(W.imag))), N)
