"""Finite-N Lipkin-Meshkov-Glick model in the maximal-spin sector.

Basis states |J, m> are ordered m = J, J-1, ..., -J, so index i corresponds to
m = J - i and to i bosonic excitations in the Holstein-Primakoff picture. The
Hamiltonian is H(t) = -omega Jz - g(t)^2 omega / N Jx^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy import linalg, optimize

from . import kernels
from .errors import CapacityError, DomainError, IntegrityError
from .protocols import ProtocolSpec, breakpoints, eval_g

PURE_CEILING = 5000
DENSITY_CEILING = 200
JSON_CEILING = 40
STEP_FACTOR = 0.25  # RK4 step in units of 1/spectral bound and tol^(1/4)/omega; keeps norm drift < 1e-8
FIT_GRID = 48
FIT_SPAN = 3.0  # upper bound of |xi| N on the coarse grid


@dataclass(frozen=True)
class CollectiveOps:
    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise DomainError("N must be an integer >= 2")
        if self.N > PURE_CEILING:
            raise DomainError(f"N above the supported ceiling {PURE_CEILING}")

    @property
    def J(self):
        return self.N / 2

    @property
    def dim(self):
        return self.N + 1

    @cached_property
    def m(self):
        return self.J - np.arange(self.dim)

    @cached_property
    def jp(self):
        """jp[i] = <J, m_i + 1|J+|J, m_i>, placed at row i-1; jp[0] = 0."""
        m = self.m
        out = np.sqrt(np.clip(self.J * (self.J + 1) - m * (m + 1), 0.0, None))
        out[0] = 0.0
        return out

    @cached_property
    def jx2_diag(self):
        return 0.5 * (self.J * (self.J + 1) - self.m**2)

    @cached_property
    def jx2_off(self):
        """Second off-diagonal <i|Jx^2|i+2>, length dim - 2."""
        return 0.25 * self.jp[1:-1] * self.jp[2:]

    @cached_property
    def jm_jp_diag(self):
        """Diagonal of J- J+."""
        return self.jp**2

    @cached_property
    def Jp(self):
        return np.diag(self.jp[1:], 1).astype(complex)

    @property
    def Jm(self):
        return self.Jp.conj().T

    @property
    def Jx(self):
        return 0.5 * (self.Jp + self.Jm)

    @property
    def Jy(self):
        return -0.5j * (self.Jp - self.Jm)

    @property
    def Jz(self):
        return np.diag(self.m).astype(complex)


def build_collective_ops(N) -> CollectiveOps:
    return CollectiveOps(int(N))


def lmg_hamiltonian(ops: CollectiveOps, g, omega=1.0):
    """Dense H = -omega Jz - g^2 omega / N Jx^2."""
    H = np.diag(-omega * ops.m - g**2 * omega / ops.N * ops.jx2_diag)
    off = -g**2 * omega / ops.N * ops.jx2_off
    H += np.diag(off, 2) + np.diag(off, -2)
    return H


def lmg_spectrum(ops: CollectiveOps, g, omega=1.0, parity=0, k=None):
    """Eigenvalues in one parity sector (0: even excitation number, 1: odd).

    Jx^2 only couples m to m +- 2, so each sector is tridiagonal.
    """
    idx = np.arange(parity, ops.dim, 2)
    diag = -omega * ops.m[idx] - g**2 * omega / ops.N * ops.jx2_diag[idx]
    off = -g**2 * omega / ops.N * ops.jx2_off[idx[:-1]]
    sel = None if k is None else (0, min(k, len(idx)) - 1)
    return linalg.eigvalsh_tridiagonal(diag, off, select="a" if sel is None else "i",
                                       select_range=sel)


def lmg_gap(N, g=1.0, omega=1.0, sector="parity"):
    """Lowest excitation energy at coupling g.

    ``sector="parity"`` gives E_2 - E_0 inside the even sector reached by the
    cycle; ``sector="full"`` gives the overall first gap.
    """
    ops = build_collective_ops(N)
    even = lmg_spectrum(ops, g, omega, 0, k=2)
    if sector == "parity":
        return float(even[1] - even[0])
    if sector == "full":
        odd = lmg_spectrum(ops, g, omega, 1, k=1)
        return float(min(odd[0], even[1]) - even[0])
    raise DomainError(f"unknown sector {sector!r}")


@dataclass(frozen=True)
class SpinState:
    amplitudes: np.ndarray
    N: int

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (self.N + 1,):
            raise DomainError("amplitude vector must have length N + 1")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def density(self) -> "SpinDensityMatrix":
        a = self.amplitudes
        return SpinDensityMatrix(np.outer(a, a.conj()), self.N)

    csv_header = ("m", "re_amp", "im_amp")

    def rows(self):
        m = self.N / 2 - np.arange(self.N + 1)
        for mi, a in zip(m, self.amplitudes):
            yield (mi, a.real, a.imag)


@dataclass(frozen=True)
class SpinDensityMatrix:
    rho: np.ndarray
    N: int

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (self.N + 1, self.N + 1):
            raise DomainError("density matrix must be (N+1) x (N+1)")
        object.__setattr__(self, "rho", rho)

    @property
    def trace(self):
        return float(np.trace(self.rho).real)

    def min_eigenvalue(self):
        return float(linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))[0])

    def density(self):
        return self

    def to_json(self):
        if self.N > JSON_CEILING:
            raise CapacityError(f"JSON export of density matrices is limited to N <= {JSON_CEILING}")
        return {"N": self.N, "basis": "m = J .. -J",
                "re": self.rho.real.tolist(), "im": self.rho.imag.tolist()}


def coherent_top_state(N) -> SpinState:
    """|J, m = J>, the ground state at g = 0."""
    a = np.zeros(N + 1, dtype=complex)
    a[0] = 1.0
    return SpinState(a, N)


# ------------------------------------------------------------------ evolution

def _spectral_bound(ops, spec, kappa=0.0):
    w = spec.omega
    return w * ops.N + spec.g_c**2 * w * ops.J * (ops.J + 1) / ops.N + kappa * ops.J * (ops.J + 1) * 2


def _step_size(ops, spec, tol, kappa=0.0):
    h_acc = STEP_FACTOR * tol**0.25 / spec.omega
    h_stab = STEP_FACTOR / _spectral_bound(ops, spec, kappa)
    return min(h_acc, h_stab)


def _stage_coefficients(spec, a, b, n, N):
    h = (b - a) / n
    t0 = a + h * np.arange(n)
    times = np.stack([t0, t0 + 0.5 * h, t0 + h], axis=1)
    times[-1, 2] = b
    coef = eval_g(spec, times.ravel()).reshape(n, 3) ** 2 * spec.omega / N
    return np.ascontiguousarray(coef), h


def _banded_parts(ops, spec):
    # shift by omega J so the top state has zero energy; only a global phase changes
    a = spec.omega * (ops.J - ops.m)
    return (np.ascontiguousarray(a), np.ascontiguousarray(ops.jx2_diag),
            np.ascontiguousarray(ops.jx2_off))


def _check_tol(tol):
    if not 1e-14 <= tol <= 1e-4:
        raise DomainError("tol must lie in [1e-14, 1e-4]")


def evolve_pure_cycles(N, spec: ProtocolSpec, tol=1e-10, initial=None) -> list:
    """Schrodinger evolution from |J, J>; returns the state after each cycle."""
    _check_tol(tol)
    ops = build_collective_ops(N)
    psi = (coherent_top_state(N) if initial is None else initial).amplitudes.copy()
    a, d, e = _banded_parts(ops, spec)
    h_max = _step_size(ops, spec, tol)
    bps = breakpoints(spec)
    out = []
    for i, (t0, t1) in enumerate(zip(bps[:-1], bps[1:])):
        n = max(1, int(math.ceil((t1 - t0) / h_max)))
        coef, h = _stage_coefficients(spec, t0, t1, n, ops.N)
        psi = kernels.pure_rk4(psi, a, d, e, coef, h)
        if i % 2 == 1:
            drift = abs(np.linalg.norm(psi) - 1.0)
            if drift > 1e-6:
                raise IntegrityError(f"norm drift {drift:.3g} exceeds 1e-6")
            out.append(SpinState(psi.copy(), ops.N))
    return out


def evolve_pure(N, spec: ProtocolSpec, tol=1e-10) -> SpinState:
    """State after all cycles of ``spec``."""
    return evolve_pure_cycles(N, spec, tol)[-1]


def evolve_lindblad_cycles(N, spec: ProtocolSpec, kappa, tol=1e-10, initial=None) -> list:
    """Master-equation evolution with collapse operator J+ at rate kappa.

    d rho/dt = -i[H, rho] + kappa (J+ rho J- - {J- J+, rho}/2), which relaxes
    toward |J, J>. Returns the density matrix after each cycle.
    """
    if kappa < 0:
        raise DomainError("kappa must be non-negative")
    _check_tol(tol)
    ops = build_collective_ops(N)
    if ops.N > DENSITY_CEILING:
        raise DomainError(f"density-matrix evolution supports N <= {DENSITY_CEILING}")
    if initial is None:
        initial = coherent_top_state(N)
    rho = np.array(initial.density().rho, dtype=complex)
    a, d, e = _banded_parts(ops, spec)
    jp = np.ascontiguousarray(ops.jp)
    dd = np.ascontiguousarray(ops.jm_jp_diag)
    h_max = _step_size(ops, spec, tol, kappa)
    bps = breakpoints(spec)
    out = []
    for i, (t0, t1) in enumerate(zip(bps[:-1], bps[1:])):
        n = max(1, int(math.ceil((t1 - t0) / h_max)))
        coef, h = _stage_coefficients(spec, t0, t1, n, ops.N)
        rho = kernels.lindblad_rk4(rho, a, d, e, jp, dd, kappa, coef, h)
        rho = 0.5 * (rho + rho.conj().T)
        if i % 2 == 1:
            state = SpinDensityMatrix(rho.copy(), ops.N)
            if abs(state.trace - 1.0) > 1e-8:
                raise IntegrityError(f"trace drift {state.trace - 1.0:.3g}")
            if state.min_eigenvalue() < -1e-8:
                raise IntegrityError("density matrix lost positivity")
            out.append(state)
    return out


def evolve_lindblad(N, spec: ProtocolSpec, kappa, tol=1e-10, initial=None) -> SpinDensityMatrix:
    return evolve_lindblad_cycles(N, spec, kappa, tol, initial)[-1]


# ------------------------------------------------------------ spin squeezing

@lru_cache(maxsize=16)
def _squeeze_generator(N):
    """Eigen-decomposition of G = (J+^2 - J-^2)/2 on the even-excitation sector.

    G is real antisymmetric, so iG is Hermitian and exp(x G) = V exp(-i x w) V^dag.
    Returns (w, V, V^dag e_0) restricted to indices 0, 2, 4, ...
    """
    ops = build_collective_ops(N)
    idx = np.arange(0, ops.dim, 2)
    # <i|J+^2|i+2> on the even sublattice
    up = ops.jp[1:-1] * ops.jp[2:]
    u = up[idx[:-1]]
    G = np.diag(0.5 * u, 1) - np.diag(0.5 * u, -1)
    w, V = linalg.eigh(1j * G)
    return w, V, V.conj()[0].copy()


def _squeezed_sector(N, mags):
    """Amplitudes exp(|xi| G)|J,J> on the even sector for each magnitude."""
    w, V, c0 = _squeeze_generator(N)
    mags = np.atleast_1d(mags)
    return (np.exp(-1j * np.outer(mags, w)) * c0) @ V.T


def spin_squeeze_state(N, xi) -> SpinState:
    """S(xi)|J, J> with S(xi) = exp(xi* J+^2/2 - xi J-^2/2).

    Uses exp(-i beta Jz/2) J+^2 exp(i beta Jz/2) = e^{-i beta} J+^2 to reduce
    any phase beta = arg xi to the real generator.
    """
    if xi == 0:
        return coherent_top_state(N)
    ops = build_collective_ops(N)
    amp = np.zeros(ops.dim, dtype=complex)
    amp[0::2] = _squeezed_sector(ops.N, abs(xi))[0]
    beta = np.angle(xi) if xi != 0 else 0.0
    amp *= np.exp(-0.5j * beta * (ops.m - ops.J))
    return SpinState(amp, ops.N)


@dataclass(frozen=True)
class SqueezeFit:
    xi_magnitude: float
    xi_phase: float
    fidelity: float
    N: int

    @property
    def xi_times_N(self):
        return self.xi_magnitude * self.N


def _fidelity_surface(state, mags, betas):
    """F(|xi|, beta) on a grid for a SpinState or SpinDensityMatrix."""
    N = state.N
    ops = build_collective_ops(N)
    sec = _squeezed_sector(N, mags)  # (n_mag, n_even)
    phase = np.exp(-0.5j * np.outer(betas, (ops.m - ops.J)[0::2]))  # (n_beta, n_even)
    if isinstance(state, SpinState):
        psi = state.amplitudes[0::2]
        A = sec.conj() * psi  # (n_mag, n_even)
        return np.abs(A @ phase.conj().T) ** 2
    rho = state.rho[0::2, 0::2]
    vec = sec[:, None, :] * phase[None, :, :]  # (n_mag, n_beta, n_even)
    return np.einsum("abi,ij,abj->ab", vec.conj(), rho, vec).real


def fit_spin_squeezing(state, grid=FIT_GRID, span=FIT_SPAN) -> SqueezeFit:
    """Spin-squeezed state maximising F = <xi|rho|xi>.

    Coarse grid over |xi| N in [0, span] and beta in [0, 2 pi), then a
    Nelder-Mead refinement from the best grid point.
    """
    N = state.N
    mags = np.linspace(0.0, span, grid) / N
    betas = np.linspace(0.0, 2 * math.pi, grid, endpoint=False)
    F = _fidelity_surface(state, mags, betas)
    i, j = np.unravel_index(np.argmax(F), F.shape)

    def neg(x):
        return -_fidelity_surface(state, np.array([abs(x[0]) / N]), np.array([x[1]]))[0, 0]

    res = optimize.minimize(neg, [mags[i] * N, betas[j]], method="Nelder-Mead",
                            options={"xatol": 1e-9, "fatol": 1e-14, "maxiter": 4000})
    xN, beta = res.x
    fid = -res.fun
    if fid < F[i, j]:
        xN, beta, fid = mags[i] * N, betas[j], F[i, j]
    return SqueezeFit(float(abs(xN) / N), float(np.mod(beta, 2 * math.pi)), float(fid), N)


def ground_state_fidelity(state) -> float:
    """Population of |J, J>."""
    if isinstance(state, SpinState):
        return float(abs(state.amplitudes[0]) ** 2)
    return float(state.rho[0, 0].real)


def excitation_number(state) -> float:
    """J - <Jz>, the Holstein-Primakoff boson number."""
    if isinstance(state, SpinState):
        p = np.abs(state.amplitudes) ** 2
    else:
        p = state.rho.diagonal().real
    return float(np.dot(np.arange(len(p)), p))
