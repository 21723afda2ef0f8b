"""Closed critical oscillator H = omega a^dag a - g^2 omega (a + a^dag)^2 / 4.

Starting from the vacuum the state stays of the form exp(b a^dag^2)|0>, so the
whole dynamics is carried by the complex amplitude b(t). The Ermakov equation
for the width of the Gaussian wave packet is solved independently and serves
as a cross-check of the same dynamics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, IntegrityError
from .protocols import ProtocolSpec, breakpoints, eval_g

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
_METHOD = "DOP853"


def _check_tol(tol):
    if not 1e-14 <= tol <= 1e-6:
        raise DomainError("tol must lie in [1e-14, 1e-6]")


def _integrate_piecewise(rhs, y0, spec, rtol, atol, t_eval=None):
    """Integrate between consecutive protocol breakpoints.

    Returns the concatenated (t, y) samples and the state at every breakpoint.
    Samples are the solver's own steps unless ``t_eval`` is given, in which case
    they are the requested times plus the breakpoints.
    """
    bps = breakpoints(spec)
    ts, ys = [np.array([0.0])], [np.asarray(y0)[:, None]]
    marks = [np.asarray(y0)]
    y = np.asarray(y0)
    for a, b in zip(bps[:-1], bps[1:]):
        seg = None
        if t_eval is not None:
            seg = np.concatenate([[a], t_eval[(t_eval > a) & (t_eval < b)], [b]])
        sol = solve_ivp(rhs, (a, b), y, method=_METHOD, rtol=rtol, atol=atol, t_eval=seg)
        if not sol.success:
            raise IntegrityError(f"integration failed on [{a}, {b}]: {sol.message}")
        ts.append(sol.t[1:])
        ys.append(sol.y[:, 1:])
        y = sol.y[:, -1]
        marks.append(y)
    return np.concatenate(ts), np.concatenate(ys, axis=1), np.array(marks)


class Squeezing(NamedTuple):
    abs_s: float
    theta: float


def squeezing_from_b(b) -> Squeezing:
    """(|s|, theta) from b via |s| = artanh(2|b|), theta = arg b in [0, 2 pi).

    b = 0 reports theta = 0.
    """
    mag = abs(b)
    if mag >= 0.5:
        raise DomainError("|b| must be below 1/2")
    theta = float(np.mod(np.angle(b), 2 * math.pi)) if mag > 0 else 0.0
    return Squeezing(float(np.arctanh(2.0 * mag)), theta)


def predicted_squeezing(r, z_nu=0.5):
    """Universal one-cycle squeezing arcosh(csc(pi / (2 + 2 z_nu r)))."""
    if r <= 0 or z_nu <= 0:
        raise DomainError("r and z_nu must be positive")
    x = math.pi / (2.0 + 2.0 * z_nu * r)
    return math.acosh(1.0 / math.sin(x))


def predicted_overlap(r, z_nu=0.5):
    """Vacuum survival probability sin(pi / (2 + 2 z_nu r)) after one slow cycle."""
    if r <= 0 or z_nu <= 0:
        raise DomainError("r and z_nu must be positive")
    return math.sin(math.pi / (2.0 + 2.0 * z_nu * r))


@dataclass(frozen=True)
class OscillatorTrajectory:
    t: np.ndarray
    b: np.ndarray
    cycle_marks: np.ndarray  # b at t = 2 m tau, m = 1..M
    spec: ProtocolSpec

    @property
    def final(self):
        return complex(self.b[-1])

    @property
    def abs_s(self):
        return np.arctanh(2.0 * np.abs(self.b))

    @property
    def theta(self):
        return np.where(np.abs(self.b) > 0, np.mod(np.angle(self.b), 2 * math.pi), 0.0)

    @property
    def n_excitations(self):
        return np.sinh(self.abs_s) ** 2

    def rows(self):
        s, th = self.abs_s, self.theta
        for i in range(len(self.t)):
            yield (self.t[i], self.b[i].real, self.b[i].imag, s[i], th[i])

    csv_header = ("t", "re_b", "im_b", "abs_s", "theta")


def b_rhs(spec: ProtocolSpec):
    w = spec.omega

    def rhs(t, y):
        g2 = eval_g(spec, t) ** 2
        b = y[0]
        return [-1j * w * (2.0 * b - 0.25 * g2 * (1.0 + 2.0 * b) ** 2)]

    return rhs


def integrate_b(spec: ProtocolSpec, tol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
                t_eval=None) -> OscillatorTrajectory:
    """Integrate db/dt = -i omega (2b - g^2 (1 + 2b)^2 / 4) from b(0) = 0 over all cycles."""
    _check_tol(tol)
    t, y, marks = _integrate_piecewise(b_rhs(spec), np.array([0j]), spec, tol, atol, t_eval)
    b = y[0]
    # every second breakpoint closes a cycle
    cyc = marks[2::2, 0]
    margin = 0.5 - np.max(np.abs(b))
    if margin <= 10 * tol:
        raise IntegrityError(f"|b| reached within {margin:.3g} of 1/2")
    return OscillatorTrajectory(t, b, cyc, spec)


class CycleRecord(NamedTuple):
    m: int
    abs_s: float
    theta: float


def multi_cycle(spec: ProtocolSpec, tol=DEFAULT_RTOL) -> list:
    """Squeezing magnitude and phase after each of the M cycles in ``spec``."""
    traj = integrate_b(spec, tol)
    return [CycleRecord(m + 1, *squeezing_from_b(b)) for m, b in enumerate(traj.cycle_marks)]


@dataclass(frozen=True)
class ErmakovTrajectory:
    t: np.ndarray
    xi: np.ndarray
    xi_dot: np.ndarray
    omega: float

    @property
    def x2(self):
        return self.xi**2

    @property
    def p2(self):
        return self.xi_dot**2 + 0.25 / self.xi**2

    @property
    def xp(self):
        """Symmetrised correlation <xp + px>/2."""
        return self.xi * self.xi_dot

    @property
    def purity_defect(self):
        return self.x2 * self.p2 - self.xp**2 - 0.25

    @property
    def n_excitations(self):
        w = self.omega
        return 0.5 * (w * self.x2 + self.p2 / w) - 0.5

    @property
    def vacuum_fidelity(self):
        # overlap of two pure zero-mean Gaussians: 1 / sqrt(det(V + V_vac))
        w = self.omega
        det = (self.x2 + 0.5 / w) * (self.p2 + 0.5 * w) - self.xp**2
        return 1.0 / np.sqrt(det)


def ermakov_oracle(spec: ProtocolSpec, tol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
                   t_eval=None) -> ErmakovTrajectory:
    """Integrate xi'' = 1/(4 xi^3) - omega^2 (1 - g^2) xi from the ground state."""
    _check_tol(tol)
    w = spec.omega

    def rhs(t, y):
        xi, v = y
        w2 = w * w * (1.0 - eval_g(spec, t) ** 2)
        return [v, 0.25 / xi**3 - w2 * xi]

    y0 = np.array([(2.0 * w) ** -0.5, 0.0])
    t, y, _ = _integrate_piecewise(rhs, y0, spec, tol, atol, t_eval)
    if np.any(y[0] <= 0):
        raise IntegrityError("Ermakov amplitude became non-positive")
    return ErmakovTrajectory(t, y[0], y[1], w)
