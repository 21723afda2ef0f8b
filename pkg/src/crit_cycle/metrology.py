"""Entanglement witness chi^2_min = min_n N / (4 Var(R_n)).

R_n solves {R_n, rho} = i[J_n, rho]; 4 Var(R_n) is the quantum Fisher
information for rotations about n. R_n is linear in n, so Var(R_n) is the
quadratic form n^T Gamma n with a 3x3 matrix Gamma built once per state; the
angular search then costs nothing per direction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np
from scipy import linalg, optimize

from .errors import DomainError
from .lmg import CollectiveOps, SpinDensityMatrix, SpinState, build_collective_ops

POPULATION_THRESHOLD = 1e-12
GRID_THETA = 64
GRID_PHI = 128
REFINE_ROUNDS = 3
WITNESS_MARGIN = 1e-9  # chi^2 must beat 1 by more than rounding to count as entangled


def unit_vector(theta, phi):
    return np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi),
                     math.cos(theta)])


def direction_operator(ops: CollectiveOps, theta, phi):
    """J_n = Jx sin(theta) cos(phi) + Jy sin(theta) sin(phi) + Jz cos(theta)."""
    n = unit_vector(theta, phi)
    return n[0] * ops.Jx + n[1] * ops.Jy + n[2] * ops.Jz


def _r_in_eigenbasis(p, Jn_eig, threshold):
    denom = p[:, None] + p[None, :]
    keep = denom >= threshold
    R = np.zeros_like(Jn_eig)
    R[keep] = 1j * Jn_eig[keep] * (p[None, :] - p[:, None])[keep] / denom[keep]
    return R


def solve_R_operator(rho, J_n, threshold=POPULATION_THRESHOLD):
    """Solution of {R, rho} = i[J_n, rho] in the original basis.

    In the eigenbasis of rho, R_ij = i (J_n)_ij (p_j - p_i) / (p_i + p_j);
    elements with p_i + p_j below ``threshold`` are set to zero.
    """
    rho = np.asarray(getattr(rho, "rho", rho))
    p, U = linalg.eigh(0.5 * (rho + rho.conj().T))
    R = _r_in_eigenbasis(p, U.conj().T @ J_n @ U, threshold)
    return U @ R @ U.conj().T


def variance(op, rho):
    rho = np.asarray(getattr(rho, "rho", rho))
    mean = np.trace(rho @ op)
    return float((np.trace(rho @ op @ op) - mean**2).real)


@dataclass(frozen=True)
class WitnessResult:
    chi2_min: float
    theta_opt: float
    phi_opt: float
    qfi: float
    entangled: bool

    def to_json(self):
        return asdict(self)


def fisher_matrix(state, ops: CollectiveOps = None, threshold=POPULATION_THRESHOLD):
    """3x3 matrix Gamma with Var(R_n) = n^T Gamma n.

    For a pure state R_n reduces to J_n, so Gamma is the symmetrised
    covariance matrix of (Jx, Jy, Jz).
    """
    ops = ops or build_collective_ops(state.N)
    J = (ops.Jx, ops.Jy, ops.Jz)
    if isinstance(state, SpinState):
        psi = state.amplitudes
        v = [op @ psi for op in J]
        mean = np.array([np.vdot(psi, x).real for x in v])
        S = np.array([[np.vdot(x, y).real for y in v] for x in v])
        return S - np.outer(mean, mean)
    rho = state.rho
    p, U = linalg.eigh(0.5 * (rho + rho.conj().T))
    Rs = [_r_in_eigenbasis(p, U.conj().T @ op @ U, threshold) for op in J]
    # <R_a> = 0 since R has no diagonal in the eigenbasis of rho
    G = np.empty((3, 3))
    for a in range(3):
        for b in range(3):
            G[a, b] = 0.5 * np.sum(p * np.einsum("ij,ji->i", Rs[a], Rs[b]) +
                                   p * np.einsum("ij,ji->i", Rs[b], Rs[a])).real
    return G


def chi_squared_min(state, ops: CollectiveOps = None, grid=(GRID_THETA, GRID_PHI),
                    rounds=REFINE_ROUNDS) -> WitnessResult:
    """Minimise N / (4 Var(R_n)) over directions; chi^2 < 1 witnesses entanglement.

    Coarse (theta, phi) grid followed by golden-section refinement on each
    angle in turn.
    """
    if isinstance(state, np.ndarray):
        raise DomainError("pass a SpinState or SpinDensityMatrix")
    N = state.N
    G = fisher_matrix(state, ops)
    if np.max(np.abs(G)) < 1e-14:
        raise DomainError("variance vanishes in every direction")

    def var(theta, phi):
        n = unit_vector(theta, phi)
        return float(n @ G @ n)

    th = np.linspace(0.0, math.pi, grid[0])
    ph = np.linspace(0.0, 2 * math.pi, grid[1], endpoint=False)
    st, ct = np.sin(th)[:, None], np.cos(th)[:, None]
    n = np.stack([st * np.cos(ph)[None, :], st * np.sin(ph)[None, :],
                  np.broadcast_to(ct, (grid[0], grid[1]))], axis=-1)
    V = np.einsum("abi,ij,abj->ab", n, G, n)
    i, j = np.unravel_index(np.argmax(V), V.shape)
    theta, phi = th[i], ph[j]
    dth, dph = th[1] - th[0], ph[1] - ph[0]
    for _ in range(rounds):
        theta = _golden_max(lambda x: var(x, phi), theta, dth)
        phi = _golden_max(lambda x: var(theta, x), phi, dph)
        dth, dph = dth / 4, dph / 4
    best = var(theta, phi)
    if best <= 0:
        raise DomainError("variance vanishes in every direction")
    # fold onto theta in [0, pi/2]: n and -n give the same variance
    if theta > math.pi / 2:
        theta, phi = math.pi - theta, phi + math.pi
    chi2 = N / (4.0 * best)
    return WitnessResult(float(chi2), float(theta), float(np.mod(phi, 2 * math.pi)),
                         float(4.0 * best), bool(chi2 < 1.0 - WITNESS_MARGIN))


def _golden_max(f, x0, step):
    """Maximise f on [x0 - step, x0 + step] (bounded Brent: golden section with parabolic steps)."""
    res = optimize.minimize_scalar(lambda x: -f(x), bounds=(x0 - step, x0 + step),
                                   method="bounded", options={"xatol": 1e-12})
    return float(res.x) if -res.fun >= f(x0) else float(x0)
