"""Matrix-free time stepping of linear systems with monomial RK methods."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .catalog import MethodDescriptor
from .rk_core import RKCoefficients, stage_ratios

__all__ = [
    "LinearSystem",
    "SimulationRecord",
    "InstabilityError",
    "NormEstimate",
    "rk_step",
    "integrate",
    "operator_norm_estimate",
    "max_stable_step",
]


class InstabilityError(ArithmeticError):
    """Non-finite values appeared inside a stage."""

    def __init__(self, stage: int, step: Optional[int] = None):
        self.stage = stage
        self.step = step
        where = f"overflow/NaN in stage {stage}"
        if step is not None:
            where += f" of step {step}"
        super().__init__(where)


@dataclass
class LinearSystem:
    """``u' = L u`` with ``L`` antisymmetric in the energy inner product.

    ``apply_L`` must be linear and reentrant.  ``energy`` is ``0.5 ||u||_H^2``.
    """

    dim: int
    apply_L: Callable[[np.ndarray], np.ndarray]
    energy: Callable[[np.ndarray], float]
    exact: Optional[Callable[[float], np.ndarray]] = None
    norm_L: Optional[float] = None
    initial: Optional[np.ndarray] = None
    name: str = ""


@dataclass
class SimulationRecord:
    times: np.ndarray
    energies: np.ndarray
    final_state: np.ndarray
    steps: np.ndarray
    states: Optional[np.ndarray] = None
    extra: dict = field(default_factory=dict)

    @property
    def initial_energy(self) -> float:
        return float(self.energies[0])

    @property
    def final_energy(self) -> float:
        return float(self.energies[-1])

    @property
    def relative_energy_deviation(self) -> np.ndarray:
        e0 = self.energies[0]
        return (self.energies - e0) / e0


def _ratios(method) -> np.ndarray:
    if isinstance(method, MethodDescriptor):
        return stage_ratios(method.coefficients)
    if isinstance(method, RKCoefficients):
        return stage_ratios(method)
    return np.asarray(method, dtype=float)


def rk_step(system: LinearSystem, c, h: float, u: np.ndarray) -> np.ndarray:
    """One step ``k_j = c_j h L(u + k_{j-1})``, ``u_new = u + k_s``."""
    c = np.asarray(c, dtype=float)
    k = np.zeros_like(u)
    # overflow is reported through InstabilityError instead of warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for j, cj in enumerate(c, start=1):
            k = (cj * h) * system.apply_L(u + k)
            if not np.all(np.isfinite(k)):
                raise InstabilityError(j)
        return u + k


def integrate(
    system: LinearSystem,
    method,
    h: float,
    u0: np.ndarray,
    n_steps: int,
    record_every: int = 1,
    *,
    h_last: Optional[float] = None,
    keep_states: bool = False,
) -> SimulationRecord:
    """Advance ``n_steps`` steps of size ``h`` (the last one ``h_last`` if given).

    Energy is recorded at step 0, every ``record_every`` steps, and at the end.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    c = _ratios(method)
    u = np.array(u0, dtype=float)
    steps, times, energies = [0], [0.0], [system.energy(u)]
    states = [u.copy()] if keep_states else None
    for n in range(1, n_steps + 1):
        dt = h_last if (n == n_steps and h_last is not None) else h
        try:
            u = rk_step(system, c, dt, u)
        except InstabilityError as exc:
            raise InstabilityError(exc.stage, n) from None
        t = (n - 1) * h + dt
        if n % record_every == 0 or n == n_steps:
            steps.append(n)
            times.append(t)
            energies.append(system.energy(u))
            if keep_states:
                states.append(u.copy())
    return SimulationRecord(
        times=np.array(times),
        energies=np.array(energies),
        final_state=u,
        steps=np.array(steps),
        states=np.array(states) if keep_states else None,
    )


class NormEstimate(NamedTuple):
    value: float
    converged: bool
    iterations: int


def _hnorm(system, v):
    e = system.energy(v)
    return math.sqrt(2.0 * e) if e > 0 else float(np.linalg.norm(v))


def operator_norm_estimate(
    system: LinearSystem, tol: float = 1e-10, max_iter: int = 5000, seed: int = 0
) -> NormEstimate:
    """Estimate ``||L||_H`` by power iteration on ``L* L = -L^2``.

    The H-adjoint of an antisymmetric ``L`` is ``-L``, so no transpose is needed.
    """
    rng = np.random.default_rng(seed)
    v = None
    for _ in range(4):
        cand = rng.standard_normal(system.dim)
        if _hnorm(system, cand) > 0 and np.any(system.apply_L(cand)):
            v = cand
            break
    if v is None:
        raise ArithmeticError("power iteration broke down: operator annihilates start vectors")
    v /= _hnorm(system, v)
    prev = 0.0
    est = 0.0
    for it in range(1, max_iter + 1):
        lv = system.apply_L(v)
        est = _hnorm(system, lv)
        if est == 0.0:
            return NormEstimate(0.0, True, it)
        if it > 1 and abs(est - prev) <= tol * est:
            return NormEstimate(est, True, it)
        prev = est
        w = -system.apply_L(lv)
        nw = _hnorm(system, w)
        if nw == 0.0:
            return NormEstimate(est, True, it)
        v = w / nw
    return NormEstimate(est, False, max_iter)


def max_stable_step(method: MethodDescriptor, norm_L: float) -> float:
    """Largest ``h`` with ``h ||L|| <= lambda``."""
    if norm_L <= 0:
        raise ValueError("norm_L must be positive")
    if method.lam is None:
        raise ValueError(f"{method.name} has no strong stability bound")
    return method.lam / norm_L
