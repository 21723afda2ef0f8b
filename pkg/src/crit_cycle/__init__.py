"""Cyclic squeezing of a bosonic mode and the LMG model near criticality."""
__version__ = "0.1.0"

from ._backend import backend_name
from .battery import (ergotropy_general, mean_work, multi_cycle_gain, squeezed_vacuum_state,
                      variance_work, work_distribution, work_fluctuations)
from .errors import CapacityError, DomainError, IntegrityError
from .lmg import (build_collective_ops, evolve_lindblad, evolve_pure, evolve_pure_cycles,
                  fit_spin_squeezing, ground_state_fidelity, lmg_gap, spin_squeeze_state)
from .metrology import chi_squared_min, solve_R_operator
from .open_gaussian import integrate_lindblad
from .oscillator import (ermakov_oracle, integrate_b, multi_cycle, predicted_squeezing,
                         squeezing_from_b)
from .protocols import ProtocolSpec, eval_g, eval_rate, power_law, trigonometric
from .spin_wigner import build_multipoles, wigner_3j, wigner_function

__all__ = [
    "CapacityError", "DomainError", "IntegrityError", "ProtocolSpec", "backend_name",
    "build_collective_ops", "build_multipoles", "chi_squared_min", "ergotropy_general",
    "ermakov_oracle", "eval_g", "eval_rate", "evolve_lindblad", "evolve_pure",
    "evolve_pure_cycles", "fit_spin_squeezing", "ground_state_fidelity", "integrate_b",
    "integrate_lindblad", "lmg_gap", "mean_work", "multi_cycle", "multi_cycle_gain",
    "power_law", "predicted_squeezing", "solve_R_operator", "spin_squeeze_state",
    "squeezed_vacuum_state", "squeezing_from_b", "trigonometric", "variance_work",
    "wigner_3j", "wigner_function", "work_distribution", "work_fluctuations",
]
