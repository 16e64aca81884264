from .oscillator import OscillatorSpec, oscillator_build
from .peridynamics import PeridynamicsSpec, pd_build, pd_exact, stiffness_matrix, micromodulus
from .maxwell import MaxwellSpec, maxwell_build, fdtd_run, curl_matrix

__all__ = [
    "OscillatorSpec",
    "oscillator_build",
    "PeridynamicsSpec",
    "pd_build",
    "pd_exact",
    "stiffness_matrix",
    "micromodulus",
    "MaxwellSpec",
    "maxwell_build",
    "fdtd_run",
    "curl_matrix",
]
