"""Drivers that turn one (problem, method, resolution) into a table row.

Error norms use the normalised spacing ``1/N`` (``N`` = number of time levels
for the oscillator, number of cells for the PDE problems).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .analysis import ConvergenceRow, ConvergenceTable, convergence_orders, error_norms
from .catalog import MethodDescriptor, get_method
from .integrator import InstabilityError, SimulationRecord, integrate, max_stable_step
from .problems import (
    MaxwellSpec,
    OscillatorSpec,
    PeridynamicsSpec,
    fdtd_run,
    maxwell_build,
    oscillator_build,
    pd_build,
    pd_exact,
)

PROBLEMS = ("oscillator", "peridynamics", "maxwell")


@dataclass
class CaseResult:
    n: int
    n_t: int
    dt: float
    eps1: float
    eps2: float
    eps_inf: float
    eps_e: float
    record: SimulationRecord

    def row(self) -> ConvergenceRow:
        return ConvergenceRow(self.n, self.eps1, self.eps2, self.eps_inf, self.eps_e, n_t=self.n_t)


def _method(method) -> MethodDescriptor:
    return method if isinstance(method, MethodDescriptor) else get_method(method)


def _result(n, n_t, dt, errors, record) -> CaseResult:
    eps1, eps2, eps_inf = error_norms(errors, 1.0 / n)
    eps_e = float(record.relative_energy_deviation[-1])
    return CaseResult(n, n_t, dt, eps1, eps2, eps_inf, eps_e, record)


def oscillator_case(method, n_t: int, spec: OscillatorSpec = OscillatorSpec(),
                    record_every: int = 1) -> CaseResult:
    """Uniform steps ``T/n_t``; displacement error over every time level ``1..n_t``."""
    m = _method(method)
    system = oscillator_build(spec)
    h = spec.T / n_t
    rec = integrate(system, m, h, system.initial, n_t, record_every, keep_states=True)
    exact = np.array([system.exact(t)[0] for t in rec.times[1:]])
    errors = rec.states[1:, 0] - exact
    return _result(len(errors), n_t, h, errors, rec)


def peridynamics_case(method, n_x: int, T: float = 5.0, **spec_kw) -> CaseResult:
    """``dt = dx`` and ``ceil(T/dx)`` full steps; compared at the reached time."""
    m = _method(method)
    spec = PeridynamicsSpec(n_x=n_x, T=T, **spec_kw)
    system = pd_build(spec)
    dt = spec.dx
    n_t = math.ceil(T / dt - 1e-9)
    rec = integrate(system, m, dt, system.initial, n_t, record_every=n_t)
    t_end = rec.times[-1]
    errors = rec.final_state[:n_x] - pd_exact(spec.centers, t_end)
    return _result(n_x, n_t, dt, errors, rec)


def maxwell_case(method, n_x: int, courant: Optional[float] = None, T: float = 1e-8,
                 h_init: str = "half_step", **spec_kw) -> CaseResult:
    """RK run at ``courant`` (default ``lambda/2``) or FDTD when ``method == "fdtd"``.

    RK runs take ``ceil(T/dt_max)`` steps shrunk to land on ``T``.
    """
    spec = MaxwellSpec(n_x=n_x, T=T, **spec_kw)
    if isinstance(method, str) and method.lower() == "fdtd":
        c = 1.0 if courant is None else courant
        rec = fdtd_run(spec, c, h_init=h_init, record_every=10**9)
        rec.energies = rec.extra["staggered"]
        dt, n_t = rec.extra["dt"], int(rec.steps[-1])
    else:
        m = _method(method)
        system = maxwell_build(spec)
        if courant is None:
            dt_max = max_stable_step(m, system.norm_L)
        else:
            dt_max = courant * spec.dx / spec.c
        n_t = math.ceil(T / dt_max * (1 - 1e-12))
        dt = T / n_t
        rec = integrate(system, m, dt, system.initial, n_t, record_every=n_t)
    errors = rec.final_state[: n_x + 1] - spec.exact_e(rec.times[-1])
    return _result(n_x, n_t, dt, errors, rec)


def run_case(problem: str, method, n: int, **kw) -> CaseResult:
    if problem == "oscillator":
        return oscillator_case(method, n, **kw)
    if problem == "peridynamics":
        return peridynamics_case(method, n, **kw)
    if problem == "maxwell":
        return maxwell_case(method, n, **kw)
    raise ValueError(f"unknown problem {problem!r}; expected one of {PROBLEMS}")


def convergence_study(problem: str, method, resolutions: Sequence[int], **kw) -> ConvergenceTable:
    """One row per resolution; unstable runs become ``UNSTABLE`` rows."""
    if not resolutions:
        raise ValueError("no resolutions given")
    rows = []
    for n in sorted(resolutions):
        try:
            rows.append(run_case(problem, method, n, **kw).row())
        except InstabilityError:
            rows.append(ConvergenceRow(n, unstable=True))
    label = method if isinstance(method, str) else method.name
    return convergence_orders(ConvergenceTable(rows, f"{problem}:{label}"))


def energy_history(problem: str, method, n: int, n_steps: int, record_every: int = 1,
                   courant: Optional[float] = None, T: Optional[float] = None,
                   **spec_kw) -> SimulationRecord:
    """Long run recording the energy every ``record_every`` steps.

    ``n`` is the grid size for the PDE problems and ignored for the oscillator,
    whose step is ``T/n_steps``.  Maxwell runs default to Courant ``0.5`` and
    let the pulse reflect off the walls.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if record_every < 1:
        raise ValueError("record_every must be >= 1")
    fdtd = isinstance(method, str) and method.lower() == "fdtd"
    if problem == "oscillator":
        spec = OscillatorSpec(T=1000.0 if T is None else T, **spec_kw)
        system, h = oscillator_build(spec), spec.T / n_steps
    elif problem == "peridynamics":
        spec = PeridynamicsSpec(n_x=n, **({} if T is None else {"T": T}), **spec_kw)
        system, h = pd_build(spec), spec.dx
    elif problem == "maxwell":
        spec = MaxwellSpec(n_x=n, reflect=True, **({} if T is None else {"T": T}), **spec_kw)
        c = 0.5 if courant is None else courant
        if fdtd:
            return fdtd_run(spec, c, n_steps=n_steps, record_every=record_every)
        system, h = maxwell_build(spec), c * spec.dx / spec.c
    else:
        raise ValueError(f"unknown problem {problem!r}; expected one of {PROBLEMS}")
    if fdtd:
        raise ValueError("fdtd is only available for the maxwell problem")
    return integrate(system, _method(method), h, system.initial, n_steps, record_every)
