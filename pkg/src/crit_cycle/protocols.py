"""Cyclic drives g(t) that reach the critical coupling at mid-cycle.

Two families are provided:

``power_law``
    g(t) = g_c (1 - |t - tau|^r / tau^r) on each cycle of length 2 tau.
``trigonometric``
    g(t) = g_c sin^p(pi t / 2 tau) on the way up and g_c cos^p(pi (t - tau) / 2 tau)
    on the way down.

Times are reduced modulo 2 tau so that M consecutive cycles repeat the same
shape. ``omega`` sets the unit of time; all defaults use omega = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .errors import DomainError

FAMILIES = ("power_law", "trigonometric")

# relative slack accepted on the right end of the time domain
_T_SLACK = 1e-12


@dataclass(frozen=True)
class ProtocolSpec:
    """Full description of a cyclic drive.

    ``exponent`` is r for the power law and p for the trigonometric family.
    ``g_c`` is 1 for physical runs; 0 gives the undriven oscillator used as a
    stationarity check.
    """

    family: str
    exponent: float
    tau: float
    omega: float = 1.0
    cycles: int = 1
    z_nu: float = 0.5
    g_c: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown protocol family {self.family!r}")
        if not self.exponent > 0:
            raise DomainError("exponent must be positive")
        if not self.tau > 0:
            raise DomainError("tau must be positive")
        if not self.omega > 0:
            raise DomainError("omega must be positive")
        if int(self.cycles) != self.cycles or self.cycles < 1:
            raise DomainError("cycles must be a positive integer")
        if not self.z_nu > 0:
            raise DomainError("z_nu must be positive")
        if not 0 <= self.g_c <= 1:
            raise DomainError("g_c must lie in [0, 1]; the effective model is invalid beyond 1")
        object.__setattr__(self, "cycles", int(self.cycles))

    @property
    def duration(self):
        return 2.0 * self.cycles * self.tau

    def with_cycles(self, cycles):
        d = asdict(self)
        d["cycles"] = cycles
        return ProtocolSpec(**d)

    def to_dict(self):
        return asdict(self)


def power_law(r, tau, **kw):
    return ProtocolSpec("power_law", r, tau, **kw)


def trigonometric(p, tau, **kw):
    return ProtocolSpec("trigonometric", p, tau, **kw)


def breakpoints(spec: ProtocolSpec) -> np.ndarray:
    """Times where g(t) has a derivative kink: every multiple of tau up to 2 M tau."""
    return spec.tau * np.arange(2 * spec.cycles + 1, dtype=float)


def _reduce(spec, t):
    t = np.asarray(t, dtype=float)
    end = spec.duration
    if np.any(t < 0) or np.any(t > end * (1 + _T_SLACK)):
        raise DomainError(f"time outside [0, {end}]")
    period = 2.0 * spec.tau
    u = t - period * np.floor(t / period)
    # the right end of each cycle belongs to that cycle, not the next
    u = np.where((u == 0) & (t > 0), period, u)
    return np.clip(u, 0.0, period)


def eval_g(spec: ProtocolSpec, t):
    """Coupling g(t); accepts scalars or arrays."""
    u = _reduce(spec, t)
    tau, x = spec.tau, spec.exponent
    if spec.family == "power_law":
        out = spec.g_c * (1.0 - (np.abs(tau - u) / tau) ** x)
    else:
        up = np.sin(0.5 * np.pi * np.minimum(u, tau) / tau)
        down = np.cos(0.5 * np.pi * np.maximum(u - tau, 0.0) / tau)
        out = spec.g_c * np.where(u <= tau, np.abs(up) ** x, np.abs(down) ** x)
    return out if np.ndim(out) else float(out)


def eval_rate(spec: ProtocolSpec, t):
    """|dg/dt|. Points where the rate diverges (r < 1 at the turning point) give inf."""
    u = _reduce(spec, t)
    tau, x = spec.tau, spec.exponent
    with np.errstate(divide="ignore", invalid="ignore"):
        if spec.family == "power_law":
            d = np.abs(u - tau)
            out = spec.g_c * x * d ** (x - 1.0) / tau**x
        else:
            k = 0.5 * np.pi / tau
            up = u <= tau
            arg = np.where(up, k * u, k * (u - tau))
            base = np.where(up, np.sin(arg), np.cos(arg))
            slope = np.abs(np.where(up, np.cos(arg), np.sin(arg)))
            out = spec.g_c * x * np.abs(base) ** (x - 1.0) * slope * k
    out = np.where(np.isnan(out), np.inf, out)
    return out if np.ndim(out) else float(out)


def local_expansion_exponent(spec: ProtocolSpec) -> float:
    """Leading power of g_c - g(t) in |t - tau| near the critical point.

    The trigonometric family is quadratic there for any p, since
    g_c - g ~ (pi^2 p / 8) (t - tau)^2 / tau^2.
    """
    if spec.family == "power_law":
        return float(spec.exponent)
    return 2.0


def gap(g, omega=1.0):
    """Oscillator gap omega * sqrt(1 - g^2)."""
    return omega * np.sqrt(np.clip(1.0 - np.asarray(g, dtype=float) ** 2, 0.0, None))


def accumulated_phase(spec: ProtocolSpec, rtol=1e-12) -> float:
    """Integral of the instantaneous gap over one cycle [0, 2 tau]."""
    if spec.family == "power_law":
        # u = |t - tau| / tau: 1 - g^2 = u^r (2 - u^r) for g_c = 1, so the
        # u^(r/2) endpoint singularity goes into the quadrature weight
        r, gc = spec.exponent, spec.g_c
        if gc == 1.0:
            val, _ = integrate.quad(lambda u: math.sqrt(2.0 - u**r), 0.0, 1.0, weight="alg",
                                    wvar=(0.5 * r, 0.0), epsabs=0.0, epsrel=rtol, limit=200)
        else:
            val, _ = integrate.quad(lambda u: gap(gc * (1.0 - u**r)), 0.0, 1.0,
                                    epsabs=0.0, epsrel=rtol, limit=200)
        return 2.0 * spec.tau * spec.omega * val
    one = spec.with_cycles(1)
    f = lambda t: float(gap(eval_g(one, t), spec.omega))
    total = 0.0
    for a, b in ((0.0, spec.tau), (spec.tau, 2.0 * spec.tau)):
        val, _ = integrate.quad(f, a, b, epsabs=0.0, epsrel=rtol, limit=200)
        total += val
    return total


class PhasePrediction(NamedTuple):
    theta: float
    interference: str  # "constructive", "destructive" or "intermediate"


def classify_phase(theta, tolerance=math.pi / 36):
    """Interference class of a squeeze phase at a cycle boundary.

    Odd multiples of pi/2 amplify on the next cycle; multiples of 2 pi undo it.
    """
    theta = float(np.mod(theta, 2 * math.pi))
    if min(abs(theta - math.pi / 2), abs(theta - 3 * math.pi / 2)) <= tolerance:
        return "constructive"
    if min(theta, 2 * math.pi - theta) <= tolerance:
        return "destructive"
    return "intermediate"


def predicted_arg_b(spec: ProtocolSpec, tolerance=math.pi / 36) -> PhasePrediction:
    """Phase of b(2 tau) predicted from the accumulated phase, mod(-Theta - pi/2, 2 pi)."""
    theta = float(np.mod(-accumulated_phase(spec) - math.pi / 2, 2 * math.pi))
    # fold values within rounding of 2 pi onto 0
    if 2 * math.pi - theta < 1e-12:
        theta = 0.0
    return PhasePrediction(theta, classify_phase(theta, tolerance))
