"""Critical oscillator coupled to a zero-temperature bath.

With the master equation
    d rho/dt = -i[H, rho] + kappa/2 (2 a rho a^dag - {a^dag a, rho})
the state stays Gaussian with zero mean, so only two second moments evolve:
sigma = <a^dag a> + 1/2 and the complex off-diagonal sigma_10 (sigma_01 is its
conjugate). In these conventions sigma_01 = -<a^2>, so for a pure squeezed
vacuum sigma_01 = e^{i theta} sinh(2|s|)/2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .oscillator import DEFAULT_ATOL, DEFAULT_RTOL, _check_tol, _integrate_piecewise
from .protocols import ProtocolSpec, eval_g


@dataclass(frozen=True)
class GaussianCovariance:
    sigma: float
    sigma01: complex
    t: float = 0.0

    @property
    def n_excitations(self):
        return self.sigma - 0.5

    @property
    def purity(self):
        return purity(self)


@dataclass(frozen=True)
class GaussianTrajectory:
    t: np.ndarray
    sigma: np.ndarray
    sigma10: np.ndarray
    cycle_t: np.ndarray
    cycle_marks: tuple  # GaussianCovariance after each cycle
    kappa: float
    spec: ProtocolSpec

    @property
    def sigma01(self):
        return np.conj(self.sigma10)

    @property
    def final(self) -> GaussianCovariance:
        return self.cycle_marks[-1]

    def at(self, i) -> GaussianCovariance:
        return GaussianCovariance(float(self.sigma[i]), complex(np.conj(self.sigma10[i])),
                                  float(self.t[i]))

    csv_header = ("t", "sigma", "re_sigma01", "im_sigma01", "n_excitations")

    def rows(self):
        s01 = self.sigma01
        for i in range(len(self.t)):
            yield (self.t[i], self.sigma[i], s01[i].real, s01[i].imag, self.sigma[i] - 0.5)


def lindblad_rhs(spec: ProtocolSpec, kappa):
    """Right-hand side on the real vector (sigma, Re sigma_10, Im sigma_10)."""
    w = spec.omega

    def rhs(t, y):
        g2 = eval_g(spec, t) ** 2
        s = y[0]
        s10 = y[1] + 1j * y[2]
        # i g^2 w (s01 - s10)/2 with s01 = conj(s10) equals g^2 w Im(s10)
        ds = kappa * (0.5 - s) + g2 * w * s10.imag
        ds10 = (2j * w - 1j * g2 * w - kappa) * s10 + 1j * g2 * w * s
        return [ds, ds10.real, ds10.imag]

    return rhs


def integrate_lindblad(spec: ProtocolSpec, kappa, tol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
                       t_eval=None) -> GaussianTrajectory:
    """Evolve (sigma, sigma_10) from the vacuum through all cycles of ``spec``."""
    if kappa < 0:
        raise DomainError("kappa must be non-negative")
    _check_tol(tol)
    y0 = np.array([0.5, 0.0, 0.0])
    t, y, marks = _integrate_piecewise(lindblad_rhs(spec, kappa), y0, spec, tol, atol, t_eval)
    s10 = y[1] + 1j * y[2]
    cyc = marks[2::2]
    cyc_t = 2.0 * spec.tau * np.arange(1, spec.cycles + 1)
    cov = tuple(GaussianCovariance(float(m[0]), complex(m[1] - 1j * m[2]), float(tc))
                for m, tc in zip(cyc, cyc_t))
    return GaussianTrajectory(t, y[0], s10, cyc_t, cov, float(kappa), spec)


def squeezing_from_covariance(c: GaussianCovariance) -> float:
    """arsinh(2|sigma_01|)/2; exact for pure states, an effective measure otherwise."""
    return 0.5 * float(np.arcsinh(2.0 * abs(c.sigma01)))


def work_from_covariance(c: GaussianCovariance, omega=1.0) -> float:
    """Mean stored work omega (sigma - 1/2)."""
    return omega * (c.sigma - 0.5)


def symplectic_eigenvalue(c: GaussianCovariance) -> float:
    """sqrt(sigma^2 - |sigma_01|^2); 1/2 for pure states."""
    return float(np.sqrt(max(c.sigma**2 - abs(c.sigma01) ** 2, 0.0)))


def purity(c: GaussianCovariance) -> float:
    return 0.5 / symplectic_eigenvalue(c)


def gaussian_ergotropy(c: GaussianCovariance, omega=1.0) -> float:
    """Ergotropy of a zero-mean Gaussian state.

    The passive state with the same spectrum is thermal with occupation
    nu - 1/2 (nu the symplectic eigenvalue), so the extractable energy is
    omega (sigma - nu).
    """
    return omega * (c.sigma - symplectic_eigenvalue(c))
