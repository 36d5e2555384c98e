"""Machine checks of the single-photon W-state all-versus-nothing argument.

The quantum side lives in :mod:`statevector` and :mod:`constraints`, the
local-model side in :mod:`lhv`, and the comparison in :mod:`analysis`.
"""

from .analysis import gap_sweep, quantum_all_x_equal
from .constraints import all_constraints, verify_constraints
from .lhv import LhvAssignment, filter_survivors, mixture_prediction, verify_theorem
from .statevector import Basis, MeasurementSpec, SparseState, build_w_state, probability

__all__ = [
    "Basis",
    "LhvAssignment",
    "MeasurementSpec",
    "SparseState",
    "all_constraints",
    "build_w_state",
    "filter_survivors",
    "gap_sweep",
    "mixture_prediction",
    "probability",
    "quantum_all_x_equal",
    "verify_constraints",
    "verify_theorem",
]
