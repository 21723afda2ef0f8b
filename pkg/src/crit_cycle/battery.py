"""Work statistics and ergotropy of the oscillator used as a quantum battery."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import linalg

from .errors import CapacityError, DomainError

PSD_TOL = 1e-10
FOCK_CEILING = 600  # cropped levels for squeezed_thermal_state; dense expm beyond is slow


def _cycle_angle(r, z_nu):
    if r <= 0 or z_nu <= 0:
        raise DomainError("r and z_nu must be positive")
    return math.pi / (2.0 + 2.0 * z_nu * r)


@dataclass(frozen=True)
class WorkDistribution:
    """P(W = 2 n omega) for a squeezed vacuum, n = 0..n_max."""

    omega: float
    n: np.ndarray
    probs: np.ndarray
    tail_mass: float

    @property
    def n_max(self):
        return int(self.n[-1])

    @property
    def work(self):
        return 2.0 * self.n * self.omega

    @property
    def mean(self):
        return float(np.sum(self.work * self.probs))

    @property
    def variance(self):
        w = self.work
        mu = np.sum(w * self.probs)
        return float(np.sum((w - mu) ** 2 * self.probs))

    csv_header = ("n", "W_over_omega", "prob")

    def rows(self):
        for n, p in zip(self.n, self.probs):
            yield (2 * int(n), float(2 * n), float(p))


def work_distribution(s, omega=1.0, tail_bound=1e-12) -> WorkDistribution:
    """Even-Fock populations of the squeezed vacuum S(s)|0>.

    P_0 = 1/cosh s and P_{n+1}/P_n = tanh^2 s (2n+1)/(2n+2). The ratio is
    bounded by t = tanh^2 s, so the mass beyond level n is at most
    P_n t / (1 - t); n_max is the first level where that bound drops below
    ``tail_bound``.
    """
    if s < 0:
        raise DomainError("s must be non-negative")
    if not 0 < tail_bound <= 1e-10:
        raise DomainError("tail_bound must lie in (0, 1e-10]")
    t = math.tanh(s) ** 2
    p = 1.0 / math.cosh(s)
    probs = [p]
    n = 0
    while t > 0 and p * t / (1.0 - t) >= tail_bound:
        p *= t * (2 * n + 1) / (2 * n + 2)
        probs.append(p)
        n += 1
    probs = np.array(probs)
    tail = max(0.0, 1.0 - math.fsum(probs))
    return WorkDistribution(float(omega), np.arange(len(probs)), probs, tail)


def mean_work(s, omega=1.0):
    """<W> = omega sinh^2 s."""
    return omega * math.sinh(s) ** 2


def variance_work(s, omega=1.0):
    """Var W = 2 omega^2 sinh^2 s cosh^2 s."""
    return 2.0 * omega**2 * (math.sinh(s) * math.cosh(s)) ** 2


def mean_work_from_exponent(r, z_nu=0.5, omega=1.0):
    """<W> = omega / tan^2(pi / (2 + 2 z_nu r))."""
    return omega / math.tan(_cycle_angle(r, z_nu)) ** 2


def variance_work_from_exponent(r, z_nu=0.5, omega=1.0):
    x = _cycle_angle(r, z_nu)
    return 2.0 * omega**2 * math.cos(x) ** 2 / math.sin(x) ** 4


def work_fluctuations(r, z_nu=0.5):
    """Relative work fluctuations Delta W / <W> = sqrt(2) / cos(pi / (2 + 2 z_nu r))."""
    return math.sqrt(2.0) / math.cos(_cycle_angle(r, z_nu))


def work_fluctuations_asymptote(r, z_nu=0.5):
    """Leading behaviour of work_fluctuations on either side of z_nu r = 1."""
    a = z_nu * r
    return 2.0**1.5 / (a * math.pi) if a < 1 else math.sqrt(2.0)


def ergotropy_squeezed_vacuum(s, omega=1.0):
    """For a pure squeezed vacuum all stored work is extractable."""
    if s < 0:
        raise DomainError("s must be non-negative")
    return omega * math.sinh(s) ** 2


class Gain(NamedTuple):
    exact: float
    asymptote: float
    leading: float


def multi_cycle_gain(M, s) -> Gain:
    """<W>_M / <W>_1 for |s|_M = M s.

    ``asymptote`` is the growth law e^{(2M-2)s}; ``leading`` keeps the
    prefactor, e^{2Ms} / (4 sinh^2 s), and is the large-M limit of ``exact``.
    """
    if M < 1 or s <= 0:
        raise DomainError("need M >= 1 and s > 0")
    # (e^{2Ms} + e^{-2Ms} - 2) / (e^{2s} + e^{-2s} - 2) = sinh^2(Ms) / sinh^2(s)
    exact = (math.sinh(M * s) / math.sinh(s)) ** 2
    return Gain(exact, math.exp((2 * M - 2) * s), math.exp(2 * M * s) / (4 * math.sinh(s) ** 2))


@dataclass(frozen=True)
class TruncatedFockState:
    """Density matrix on Fock levels 0..n_max of the oscillator."""

    rho: np.ndarray
    omega: float = 1.0
    tail_mass: float = 0.0

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise DomainError("rho must be square")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
            raise DomainError("rho must be Hermitian")
        object.__setattr__(self, "rho", rho)

    @property
    def n_max(self):
        return self.rho.shape[0] - 1

    @property
    def energy(self):
        return float(self.omega * np.dot(np.arange(self.n_max + 1), self.rho.diagonal().real))


def squeezed_vacuum_state(s, theta=0.0, omega=1.0, tail_bound=1e-12) -> TruncatedFockState:
    """Pure S(s e^{i theta})|0> on a truncated Fock space."""
    dist = work_distribution(s, omega, tail_bound)
    dim = 2 * dist.n_max + 1
    amp = np.zeros(dim, dtype=complex)
    # c_{2n} = (e^{i theta} tanh s)^n sqrt((2n)!) / (2^n n!) / sqrt(cosh s)
    c = 1.0 / math.sqrt(math.cosh(s))
    z = np.exp(1j * theta) * math.tanh(s)
    amp[0] = c
    for n in range(dist.n_max):
        amp[2 * n + 2] = amp[2 * n] * z * math.sqrt((2 * n + 1) * (2 * n + 2)) / (2 * n + 2)
    return TruncatedFockState(np.outer(amp, amp.conj()), omega, dist.tail_mass)


def _squeeze_unitary(zeta, dim):
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    gen = 0.5 * (zeta * (a.T @ a.T) - np.conj(zeta) * (a @ a))
    return linalg.expm(gen)


def squeezed_thermal_state(sigma, sigma01, omega=1.0, tail_bound=1e-10) -> TruncatedFockState:
    """Fock-space density matrix of the zero-mean Gaussian state with moments (sigma, sigma_01).

    The state is S(zeta) rho_th S(zeta)^dag with symplectic eigenvalue
    nu = n_th + 1/2, sigma = nu cosh 2r and sigma_01 = e^{i phi} nu sinh 2r.
    The squeeze is applied in a padded space and cropped; the crop level is
    raised until the discarded population is below ``tail_bound``.
    """
    nu = math.sqrt(max(sigma**2 - abs(sigma01) ** 2, 0.25))
    n_th = nu - 0.5
    r = 0.5 * math.asinh(abs(sigma01) / nu)
    zeta = r * np.exp(1j * np.angle(sigma01)) if abs(sigma01) > 0 else 0.0
    n_keep = max(16, int(12 * (sigma + 1)))
    while True:
        if n_keep > FOCK_CEILING:
            raise CapacityError(f"state needs more than {FOCK_CEILING} Fock levels "
                                f"for tail_bound={tail_bound:g} (sigma={sigma:.4g})")
        dim = 3 * n_keep + 40
        k = np.arange(dim)
        p_th = (np.exp(k * math.log(n_th / (n_th + 1.0))) / (n_th + 1.0) if n_th > 0
                else (k == 0).astype(float))
        S = _squeeze_unitary(zeta, dim)
        rho = (S * p_th) @ S.conj().T
        kept = rho[: n_keep + 1, : n_keep + 1]
        tail = 1.0 - float(np.trace(kept).real)
        if tail < tail_bound:
            return TruncatedFockState(0.5 * (kept + kept.conj().T), omega, max(tail, 0.0))
        n_keep = int(1.5 * n_keep)


def ergotropy_general(state: TruncatedFockState) -> float:
    """Ergotropy sum_n eps_n (rho_nn - r_n) with eps_n = n omega.

    Eigenvalues r_n are sorted in descending order and paired with increasing
    energies, which is the passive state reachable by a unitary.
    """
    rho = state.rho
    evals = linalg.eigvalsh(rho)
    if evals[0] < -PSD_TOL:
        raise DomainError(f"state is not positive semidefinite (min eigenvalue {evals[0]:.3g})")
    eps = state.omega * np.arange(rho.shape[0])
    passive = np.sort(evals)[::-1]
    val = float(np.dot(eps, rho.diagonal().real) - np.dot(eps, passive))
    return max(val, 0.0)


def battery_summary(s, omega=1.0, r=None, z_nu=0.5, cycles=(1,)):
    """JSON-ready summary of the battery after one cycle with squeezing s."""
    out = {
        "mean_work": mean_work(s, omega),
        "variance": variance_work(s, omega),
        "fluctuation_ratio": (math.sqrt(variance_work(s, omega)) / mean_work(s, omega)
                              if s > 0 else None),
        "ergotropy": ergotropy_squeezed_vacuum(s, omega),
        "M_gain": [multi_cycle_gain(M, s).exact for M in cycles] if s > 0 else [],
    }
    if r is not None:
        out["fluctuation_ratio_theory"] = work_fluctuations(r, z_nu)
    return out
