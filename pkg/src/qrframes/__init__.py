"""Simulation of directional quantum reference frames made of spins."""
from .errors import DimensionError, InputError, QrfError, ShapeError
from .spin import SpinJ, as_spin
from .twirl import QrfParams, singlet, twirl_alice, twirl_both

__version__ = "0.1.0"

__all__ = [
    "DimensionError", "InputError", "QrfError", "ShapeError",
    "SpinJ", "as_spin", "QrfParams", "singlet", "twirl_alice", "twirl_both",
    "__version__",
]
