"""1D Maxwell equations on a staggered (Yee) grid with PEC walls.

State layout is ``[E_0..E_N, H_{1/2}..H_{N+1/2}]``; ``E_0``, ``E_N`` and
``H_{N+1/2}`` are pinned to zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..integrator import LinearSystem, SimulationRecord

EPS0 = 8.8541878128e-12
MU0 = 1.25663706212e-6


@dataclass(frozen=True)
class MaxwellSpec:
    x_lo: float = -5.0
    x_hi: float = 5.0
    n_x: int = 2000
    lambda0: float = 0.2
    T: float = 1e-8
    eps0: float = EPS0
    mu0: float = MU0
    envelope_rate: float = 10.0
    pulse_floor: float = 1e-8
    # allow the pulse to hit the walls; the free-space exact solution is then invalid
    reflect: bool = False

    def __post_init__(self):
        if self.n_x < 4:
            raise ValueError("n_x must be >= 4")
        if not self.T > 0:
            raise ValueError("T must be positive")
        room = min(-self.x_lo, self.x_hi) - self.pulse_radius
        if not self.reflect and not self.c * self.T < room:
            raise ValueError(
                f"pulse reaches the boundary: c*T = {self.c * self.T:.4g} >= {room:.4g}"
            )

    @property
    def c(self) -> float:
        return 1.0 / math.sqrt(self.eps0 * self.mu0)

    @property
    def dx(self) -> float:
        return (self.x_hi - self.x_lo) / self.n_x

    @property
    def pulse_radius(self) -> float:
        # envelope exp(-rate x^2) drops below pulse_floor
        return math.sqrt(-math.log(self.pulse_floor) / self.envelope_rate)

    @property
    def e_nodes(self) -> np.ndarray:
        return self.x_lo + np.arange(self.n_x + 1) * self.dx

    @property
    def h_nodes(self) -> np.ndarray:
        return self.x_lo + (np.arange(self.n_x + 1) + 0.5) * self.dx

    def pulse(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-self.envelope_rate * x * x) * np.sin(2.0 * math.pi * x / self.lambda0)

    def exact_e(self, t: float) -> np.ndarray:
        x, ct = self.e_nodes, self.c * t
        e = 0.5 * (self.pulse(x + ct) + self.pulse(x - ct))
        e[0] = e[-1] = 0.0
        return e

    def exact_h(self, t: float) -> np.ndarray:
        x, ct = self.h_nodes, self.c * t
        h = 0.5 * self.eps0 * self.c * (self.pulse(x + ct) - self.pulse(x - ct))
        h[-1] = 0.0
        return h


def curl_matrix(n_x: int, dx: float) -> np.ndarray:
    """Dense ``(N+1) x (N+1)`` lower-bidiagonal difference matrix ``C``."""
    C = np.eye(n_x + 1) - np.eye(n_x + 1, k=-1)
    return C / dx


def _curl(h, dx):
    # (C H)_j = (H_{j+1/2} - H_{j-1/2}) / dx with H_{-1/2} = 0
    out = h.copy()
    out[1:] -= h[:-1]
    return out / dx


def _curl_t(e, dx):
    # (C^T E)_j = (E_j - E_{j+1}) / dx with E_{N+1} = 0
    out = e.copy()
    out[:-1] -= e[1:]
    return out / dx


def _pin(e, h):
    e[0] = 0.0
    e[-1] = 0.0
    h[-1] = 0.0


def maxwell_build(spec: MaxwellSpec) -> LinearSystem:
    n1 = spec.n_x + 1
    dx, eps0, mu0 = spec.dx, spec.eps0, spec.mu0

    def apply_L(u):
        e, h = u[:n1].copy(), u[n1:].copy()
        _pin(e, h)
        de = _curl(h, dx) / eps0
        dh = -_curl_t(e, dx) / mu0
        _pin(de, dh)
        return np.concatenate([de, dh])

    def energy(u):
        e, h = u[:n1], u[n1:]
        return 0.5 * (eps0 * float(e @ e) + mu0 * float(h @ h))

    def exact(t):
        return np.concatenate([spec.exact_e(t), spec.exact_h(t)])

    u0 = np.concatenate([spec.exact_e(0.0), np.zeros(n1)])
    return LinearSystem(
        dim=2 * n1, apply_L=apply_L, energy=energy, exact=exact,
        norm_L=2.0 * spec.c / dx, initial=u0, name="maxwell",
    )


def fdtd_run(spec: MaxwellSpec, courant: float = 1.0, n_steps: int | None = None,
             record_every: int = 1, h_init: str = "half_step") -> SimulationRecord:
    """Yee leapfrog with ``dt = courant * dx / c``.

    ``n_steps`` defaults to ``round(T / dt)``.  ``h_init="half_step"`` starts
    from ``H^{1/2} = H(0) - (dt/2 mu0) C^T E(0)``; ``"zero"`` sets
    ``H^{1/2} = 0``.  ``energies`` holds the plain energy with ``H^n`` taken as
    the mean of its neighbouring half steps; ``extra["staggered"]`` holds the
    leapfrog invariant.
    """
    if not 0.0 < courant <= 1.0:
        raise ValueError(f"courant must be in (0, 1], got {courant}")
    dx, eps0, mu0 = spec.dx, spec.eps0, spec.mu0
    dt = courant * dx / spec.c
    if n_steps is None:
        n_steps = int(round(spec.T / dt))
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")

    if h_init not in ("half_step", "zero"):
        raise ValueError(f"unknown h_init {h_init!r}")
    e = spec.exact_e(0.0)
    kick = -(dt / mu0) * _curl_t(e, dx)
    kick[-1] = 0.0
    # H^{-1/2} is defined so that the first leapfrog relation also holds at n = 0
    h_next = 0.5 * kick if h_init == "half_step" else np.zeros(spec.n_x + 1)
    h_prev = h_next - kick

    def plain(e, hm, hp):
        hn = 0.5 * (hm + hp)
        return 0.5 * (eps0 * float(e @ e) + mu0 * float(hn @ hn))

    def staggered(e, hm, hp):
        return 0.5 * (eps0 * float(e @ e) + mu0 * float(hm @ hp))

    steps, times = [0], [0.0]
    energies, stag = [plain(e, h_prev, h_next)], [staggered(e, h_prev, h_next)]
    for n in range(1, n_steps + 1):
        e = e + (dt / eps0) * _curl(h_next, dx)
        e[0] = e[-1] = 0.0
        h_prev = h_next
        h_next = h_prev - (dt / mu0) * _curl_t(e, dx)
        h_next[-1] = 0.0
        if n % record_every == 0 or n == n_steps:
            steps.append(n)
            times.append(n * dt)
            energies.append(plain(e, h_prev, h_next))
            stag.append(staggered(e, h_prev, h_next))
    return SimulationRecord(
        times=np.array(times),
        energies=np.array(energies),
        final_state=np.concatenate([e, 0.5 * (h_prev + h_next)]),
        steps=np.array(steps),
        extra={"staggered": np.array(stag), "dt": dt, "h_half": h_next},
    )
