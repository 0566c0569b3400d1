"""Standard quantum and elementary-state (local hidden-variable) simulators
for double-slit, delayed-choice, EPR and teleportation experiments."""
from .kernels import BACKEND
from .linalg import ContractViolation, StateVector

__version__ = "0.1.0"
__all__ = ["BACKEND", "ContractViolation", "StateVector", "__version__"]
