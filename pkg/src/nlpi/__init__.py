"""Nonlinear PI and Nussbaum-gain control of first-order plants with fast
parasitic dynamics: simulation, Lyapunov monitoring and certificate checks."""

from ._backend import BACKEND
from .certify import CertificateReport, certify, select_c
from .control import ControllerConfig
from .gains import BUILTIN_GAINS, GainSpec, get_gain, nussbaum_scan
from .plant import PlantConfig, SectorNonlinearity, get_nonlinearity
from .sim import Scenario, Trajectory, detect_outcome, simulate

__all__ = [
    "BACKEND",
    "BUILTIN_GAINS",
    "CertificateReport",
    "ControllerConfig",
    "GainSpec",
    "PlantConfig",
    "Scenario",
    "SectorNonlinearity",
    "Trajectory",
    "certify",
    "detect_outcome",
    "get_gain",
    "get_nonlinearity",
    "nussbaum_scan",
    "select_c",
    "simulate",
]

__version__ = "0.1.0"
