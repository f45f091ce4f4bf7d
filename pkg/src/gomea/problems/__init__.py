from .functions import (
    HIFF, KINDS, BimodalTrap, MaxCut, MaxSat, NKLandscape, OneMax,
    ProblemInstance, SpinGlass, Trap,
)
from .generators import generate_instance
from .io import InstanceFormatError, read_instance, write_instance
from .optimum import attach_optimum, brute_force_optimum, nk_dp_optimum

__all__ = [
    "HIFF", "KINDS", "BimodalTrap", "MaxCut", "MaxSat", "NKLandscape", "OneMax",
    "ProblemInstance", "SpinGlass", "Trap", "generate_instance",
    "InstanceFormatError", "read_instance", "write_instance",
    "attach_optimum", "brute_force_optimum", "nk_dp_optimum",
]
