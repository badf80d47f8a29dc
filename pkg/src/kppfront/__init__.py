"""Desk-scale laboratory for Fisher-KPP front drift laws.

Submodules: special (self-similar profile machinery), waves (minimal wave and
damped profiles), sim (co-moving IMEX solver), frontfit (drift-law fits and
wave distance), ansatz (sub/super-solution certificates), heatkernel (linear
heat quadrature), cli (command-line front end).
"""

__version__ = "0.1.0"

from .errors import DomainError, LevelNotAttainedError, NumericsError, TailFitError
from .grid import GridFunction
from .special import (
    SelfSimProfile,
    gamma,
    kummer_1f1,
    kummer_1f1_prime,
    w_asymptotic_constant,
    w_eval,
    w_ode_oracle,
    w_prime_eval,
)
from .waves import WaveProfile, minimal_wave, ode_residual, phi_gamma, wave_B_constant
from .sim import (
    FrontTrace,
    SimConfig,
    SimResult,
    discrete_residual,
    extract_level,
    init_front_data,
    load_config,
    simulate,
    step,
)
from .frontfit import FitResult, fit_critical, fit_log_correction, wave_distance
from .report import VerificationReport

__all__ = [
    "DomainError",
    "FitResult",
    "FrontTrace",
    "GridFunction",
    "LevelNotAttainedError",
    "NumericsError",
    "SelfSimProfile",
    "SimConfig",
    "SimResult",
    "TailFitError",
    "VerificationReport",
    "WaveProfile",
    "discrete_residual",
    "extract_level",
    "fit_critical",
    "fit_log_correction",
    "gamma",
    "init_front_data",
    "kummer_1f1",
    "kummer_1f1_prime",
    "load_config",
    "minimal_wave",
    "ode_residual",
    "phi_gamma",
    "simulate",
    "step",
    "w_asymptotic_constant",
    "w_eval",
    "w_ode_oracle",
    "w_prime_eval",
    "wave_B_constant",
    "wave_distance",
]
