"""Per-point runners for each experiment kind.

A runner takes (config, point) and returns a ``PointResult``: rows for the
summary table plus optional extra files. Runners are module-level so they
pickle into worker processes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import battery, lmg, metrology, open_gaussian, oscillator, protocols, spin_wigner
from .protocols import ProtocolSpec


@dataclass
class PointResult:
    rows: list
    files: dict = field(default_factory=dict)  # name -> (header, rows)
    notes: dict = field(default_factory=dict)


def _spec(cfg, point, cycles=None):
    p = cfg.protocol
    return ProtocolSpec(p["family"], float(point.get("r", p["exponent"])),
                        float(point.get("tau", p["tau"])), omega=float(p["omega"]),
                        cycles=int(cycles or point.get("M", p["cycles"])),
                        z_nu=float(p["z_nu"]))


def _tag(point):
    return "_".join(f"{k}{point[k]}" for k in sorted(point))


# ------------------------------------------------------------------ bosonic

def run_cycle(cfg, point):
    spec = _spec(cfg, point)
    tol = cfg.numerics["tol"]
    traj = oscillator.integrate_b(spec, tol)
    rows = []
    for m, b in enumerate(traj.cycle_marks, 1):
        s, th = oscillator.squeezing_from_b(b)
        rows.append((spec.exponent, spec.omega * spec.tau, m, s, th,
                     oscillator.predicted_squeezing(spec.exponent, spec.z_nu),
                     math.sinh(s) ** 2))
    res = PointResult(rows)
    if cfg.numerics["export_trajectories"]:
        res.files[f"trajectory_{_tag(point)}.csv"] = (traj.csv_header, list(traj.rows()))
    return res


CYCLE_HEADER = ("r", "omega_tau", "cycle", "abs_s", "theta", "abs_s_predicted", "n_excitations")


def run_battery(cfg, point):
    spec = _spec(cfg, point, cycles=1)
    s, th = oscillator.squeezing_from_b(oscillator.integrate_b(spec, cfg.numerics["tol"]).final)
    omega = spec.omega
    dist = battery.work_distribution(s, omega, cfg.numerics["tail_bound"])
    row = (spec.exponent, omega * spec.tau, s, dist.mean, dist.variance,
           battery.mean_work(s, omega), battery.variance_work(s, omega),
           math.sqrt(dist.variance) / dist.mean if dist.mean > 0 else float("nan"),
           battery.work_fluctuations(spec.exponent, spec.z_nu),
           battery.ergotropy_squeezed_vacuum(s, omega), dist.tail_mass)
    res = PointResult([row])
    res.files[f"work_distribution_{_tag(point)}.csv"] = (dist.csv_header, list(dist.rows()))
    return res


BATTERY_HEADER = ("r", "omega_tau", "abs_s", "mean_work", "variance", "mean_work_closed",
                  "variance_closed", "fluctuation_ratio", "fluctuation_ratio_predicted",
                  "ergotropy", "tail_mass")


def run_multi_cycle(cfg, point):
    spec = _spec(cfg, point)
    recs = oscillator.multi_cycle(spec, cfg.numerics["tol"])
    s1 = recs[0].abs_s
    interference = protocols.predicted_arg_b(spec).interference
    rows = []
    for rec in recs:
        gain = (math.sinh(rec.abs_s) / math.sinh(s1)) ** 2 if s1 > 0 else float("nan")
        formula = battery.multi_cycle_gain(rec.m, s1).exact if s1 > 0 else float("nan")
        rows.append((spec.exponent, spec.omega * spec.tau, rec.m, rec.abs_s, rec.theta,
                     interference, gain, formula))
    return PointResult(rows)


MULTI_HEADER = ("r", "omega_tau", "cycle", "abs_s", "theta", "interference_predicted",
                "work_gain", "work_gain_coherent")


def run_noisy_battery(cfg, point):
    spec = _spec(cfg, point)
    kappa = float(point.get("kappa", 0.0))
    traj = open_gaussian.integrate_lindblad(spec, kappa, cfg.numerics["tol"])
    rows = []
    for m, c in enumerate(traj.cycle_marks, 1):
        rows.append((spec.exponent, spec.omega * spec.tau, kappa, m, c.sigma,
                     abs(c.sigma01), open_gaussian.squeezing_from_covariance(c),
                     open_gaussian.work_from_covariance(c, spec.omega),
                     open_gaussian.gaussian_ergotropy(c, spec.omega), _fock_ergotropy(c, spec.omega),
                     open_gaussian.purity(c)))
    res = PointResult(rows)
    if cfg.numerics["export_trajectories"]:
        res.files[f"covariance_{_tag(point)}.csv"] = (traj.csv_header, list(traj.rows()))
    return res


NOISY_HEADER = ("r", "omega_tau", "kappa", "cycle", "sigma", "abs_sigma01", "abs_s",
                "stored_work", "ergotropy", "ergotropy_fock", "purity")
FOCK_SIGMA_MAX = 4.0


def _fock_ergotropy(c, omega):
    """Ergotropy from the truncated Fock density matrix; blank when the state is too wide."""
    if c.sigma > FOCK_SIGMA_MAX:
        return None
    return battery.ergotropy_general(battery.squeezed_thermal_state(c.sigma, c.sigma01, omega))


def run_protocol_scan(cfg, point):
    spec = _spec(cfg, point, cycles=1)
    phase = protocols.accumulated_phase(spec)
    pred = protocols.predicted_arg_b(spec)
    s, th = oscillator.squeezing_from_b(oscillator.integrate_b(spec, cfg.numerics["tol"]).final)
    dth = abs(math.remainder(th - pred.theta, 2 * math.pi))
    return PointResult([(spec.family, spec.exponent, spec.omega * spec.tau, phase, pred.theta,
                         pred.interference, th, s, dth)])


SCAN_HEADER = ("family", "exponent", "omega_tau", "accumulated_phase", "theta_predicted",
               "interference", "theta_integrated", "abs_s", "theta_mismatch")


# --------------------------------------------------------------------- LMG

def _lmg_states(cfg, point, kappa=0.0):
    spec = _spec(cfg, point)
    N = int(point["N"])
    tol = max(cfg.numerics["tol"], 1e-12)
    if kappa > 0:
        return spec, lmg.evolve_lindblad_cycles(N, spec, kappa, tol)
    return spec, lmg.evolve_pure_cycles(N, spec, tol)


def run_lmg_squeeze(cfg, point):
    spec, states = _lmg_states(cfg, point)
    rows = []
    res = PointResult(rows)
    for m, st in enumerate(states, 1):
        fit = lmg.fit_spin_squeezing(st)
        rows.append((st.N, spec.exponent, spec.omega * spec.tau, m, fit.xi_times_N,
                     fit.xi_phase, fit.fidelity, lmg.ground_state_fidelity(st),
                     lmg.excitation_number(st)))
        if cfg.numerics["export_states"]:
            res.files[f"state_{_tag(point)}_cycle{m}.csv"] = (st.csv_header, list(st.rows()))
    return res


LMG_HEADER = ("N", "r", "omega_tau", "cycle", "xi_N", "xi_phase", "F_xi", "F0", "n_excitations")


def run_lmg_noise(cfg, point):
    kappa = float(point.get("kappa", 0.0))
    spec, states = _lmg_states(cfg, point, kappa)
    rows = []
    for m, st in enumerate(states, 1):
        fit = lmg.fit_spin_squeezing(st)
        w = metrology.chi_squared_min(st)
        rows.append((st.N, spec.exponent, spec.omega * spec.tau, kappa, m, fit.xi_times_N,
                     fit.fidelity, lmg.ground_state_fidelity(st), w.chi2_min))
    return PointResult(rows)


LMG_NOISE_HEADER = ("N", "r", "omega_tau", "kappa", "cycle", "xi_N", "F_xi", "F0", "chi2_min")


def run_chi2(cfg, point):
    spec, states = _lmg_states(cfg, point)
    rows = [(states[0].N, spec.exponent, spec.omega * spec.tau, 0, 1.0, 0.0, 0.0, False)]
    ops = lmg.build_collective_ops(states[0].N)
    for m, st in enumerate(states, 1):
        w = metrology.chi_squared_min(st, ops)
        rows.append((st.N, spec.exponent, spec.omega * spec.tau, m, w.chi2_min,
                     w.theta_opt, w.phi_opt, w.entangled))
    return PointResult(rows)


CHI2_HEADER = ("N", "r", "omega_tau", "cycle", "chi2_min", "theta_opt", "phi_opt", "entangled")


def run_wigner(cfg, point):
    spec, states = _lmg_states(cfg, point)
    basis = spin_wigner.build_multipoles(states[0].N)
    grid = tuple(cfg.numerics["grid"])
    rows = []
    res = PointResult(rows)
    for m, st in enumerate(states, 1):
        W = spin_wigner.wigner_function(st, grid, basis=basis)
        rows.append((st.N, spec.exponent, spec.omega * spec.tau, m, W.normalization,
                     W.expected_normalization, float(W.values.min()), float(W.values.max()),
                     W.imag_residue))
        name = f"wigner_{_tag(point)}_cycle{m}.csv"
        if cfg.numerics["wigner_format"] == "matrix":
            res.files[name] = (None, list(W.matrix_rows()))
        else:
            res.files[name] = (W.csv_header, list(W.rows()))
    return res


WIGNER_HEADER = ("N", "r", "omega_tau", "cycle", "normalization", "normalization_expected",
                 "W_min", "W_max", "imag_residue")


RUNNERS = {
    "cycle": (run_cycle, CYCLE_HEADER),
    "battery": (run_battery, BATTERY_HEADER),
    "noisy_battery": (run_noisy_battery, NOISY_HEADER),
    "multi_cycle": (run_multi_cycle, MULTI_HEADER),
    "lmg_squeeze": (run_lmg_squeeze, LMG_HEADER),
    "lmg_noise": (run_lmg_noise, LMG_NOISE_HEADER),
    "chi2": (run_chi2, CHI2_HEADER),
    "wigner": (run_wigner, WIGNER_HEADER),
    "protocol_scan": (run_protocol_scan, SCAN_HEADER),
}
