"""Harmonic oscillator ``x'' + a^2 x = 0`` as a first-order system ``u = [x, v]``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..integrator import LinearSystem


@dataclass(frozen=True)
class OscillatorSpec:
    a: float = 1.0
    x0: float = 1.0
    v0: float = 0.0
    T: float = 80.0

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("angular frequency a must be positive")
        if not self.T > 0:
            raise ValueError("final time T must be positive")


def oscillator_build(spec: OscillatorSpec) -> LinearSystem:
    a, x0, v0 = spec.a, spec.x0, spec.v0
    a2 = a * a

    def apply_L(u):
        return np.array([u[1], -a2 * u[0]])

    def energy(u):
        return 0.5 * (a2 * u[0] ** 2 + u[1] ** 2)

    def exact(t):
        ct, st = np.cos(a * t), np.sin(a * t)
        return np.array([x0 * ct + (v0 / a) * st, -a * x0 * st + v0 * ct])

    return LinearSystem(
        dim=2,
        apply_L=apply_L,
        energy=energy,
        exact=exact,
        norm_L=a,
        initial=np.array([x0, v0], dtype=float),
        name="oscillator",
    )
