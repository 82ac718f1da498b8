"""okdrop: a numerical laboratory for the 3-d Ohta-Kawasaki energy.

Periodic spectral fields and screened torus kernels, the diffuse and
sharp-interface energies with mass-constrained gradient-flow minimization,
droplet statistics, the Gamow liquid-drop competitors, and the quadratic
limit energy with its threshold bracket.
"""

from ._kernels import BACKEND as kernel_backend
from .energy import EnergyReport, ModelParams, WellPotential, diffuse_energy, diffuse_gradient, sharp_energy
from .flow import FlowConfig, InitSpec, MinimizerResult, minimize
from .gamow import DropEnergy, StarShape, ball_energy, f_star_bounds, optimal_ball
from .greens import KernelSpec, NearFarSplit, lattice_sum, solve
from .grid import Field3, Multiplier, integrate, spectral_apply
from .limit import LimitMinimizer, LimitParams, e0_uniform, lambda_c_bracket, minimize_e0

__version__ = "0.1.0"

__all__ = [
    "kernel_backend",
    "Field3", "Multiplier", "integrate", "spectral_apply",
    "KernelSpec", "NearFarSplit", "lattice_sum", "solve",
    "WellPotential", "ModelParams", "EnergyReport",
    "diffuse_energy", "diffuse_gradient", "sharp_energy",
    "FlowConfig", "InitSpec", "MinimizerResult", "minimize",
    "StarShape", "DropEnergy", "ball_energy", "optimal_ball", "f_star_bounds",
    "LimitParams", "LimitMinimizer", "e0_uniform", "minimize_e0", "lambda_c_bracket",
    "__version__",
]
