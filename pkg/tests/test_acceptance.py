"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` to see the lines inline, or
``python tests/test_acceptance.py`` for the summary alone.  The long Maxwell
energy run is marked ``slow``.
"""
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import random_antisymmetric_system  # noqa: E402
from escrk.analysis import fit_order, imaginary_axis_interval  # noqa: E402
from escrk.catalog import catalog, get_method, solve_esc  # noqa: E402
from escrk.experiments import (  # noqa: E402
    convergence_study,
    energy_history,
    oscillator_case,
    run_case,
)
from escrk.integrator import integrate, rk_step  # noqa: E402
from escrk.problems import MaxwellSpec, OscillatorSpec, fdtd_run, oscillator_build  # noqa: E402
from escrk.rk_core import energy_coefficients, stage_ratios, strong_stability_bound  # noqa: E402

R2, R5, R10 = math.sqrt(2.0), math.sqrt(5.0), math.sqrt(10.0)
P4 = ["RK(4,4,5)", "RK(5,4,7)", "RK(6,4,9)", "RK(7,4,11)"]
# -b variants are pre-asymptotic (or unstable) at these step counts
TABLED = ["RK(3,2,5)", "RK(4,2,7)-a", "RK(5,2,9)-a"] + P4

# closed forms written out independently of the catalog module
A_TAIL = {
    "RK(3,2,5)": [1 / 8],
    "RK(4,2,7)-a": [(2 - R2) / 4, (3 - 2 * R2) / 8],
    "RK(4,2,7)-b": [(2 + R2) / 4, (3 + 2 * R2) / 8],
    "RK(5,2,9)-a": [(R5 - 1) / 8, (R5 - 2) / 8, (R5 - 2) ** 2 / (16 * (R5 - 1))],
    "RK(5,2,9)-b": [1 / 4, 1 / 8, 1 / 32],
}
P4_CLOSED = {  # name: (leading b_m, b_{s-1}, lambda)
    "RK(4,4,5)": (-1 / 72, -1 / 72, 2 * R2),
    "RK(5,4,7)": (-1 / 1728, -1 / 1728, 2 * math.sqrt(3)),
    "RK(6,4,9)": (-5 / 442368, -5 / 442368, math.sqrt(15)),
    "RK(7,4,11)": (
        -(math.sqrt(9610) - math.sqrt(9604)) / 248832,
        -(math.sqrt(9610) - math.sqrt(9604)) / 248832,
        4 * math.sqrt(3 * (31 * R10 - 98) / (5 * (253 - 80 * R10))),
    ),
}


def report(label: str, ok: bool, detail: str = "") -> bool:
    line = f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  [{detail}]" if detail else "")
    print(line, flush=True)
    return ok


def rel(a, b):
    return abs(a - b) / abs(b)


# ---------------------------------------------------------------------------


def check_1():
    t0 = time.perf_counter()
    worst = 0.0
    ok = True
    for m in catalog():
        b = energy_coefficients(m.coefficients)
        mi = m.profile.m
        ok &= bool(np.all(np.abs(b[: mi - 1]) < 1e-14))
        if m.name in P4_CLOSED:
            bm, bs1, lam = P4_CLOSED[m.name]
            errs = [rel(b[mi - 1], bm), rel(b[m.s - 2], bs1), rel(m.lam, lam)]
        else:
            a_s = A_TAIL[m.name][-1]
            # second-order family: leading index is s, so b_m = a_s^2 and b_{s-1} = 0
            errs = [rel(b[mi - 1], a_s**2)]
            ok &= mi == m.s and abs(b[m.s - 2]) < 1e-14 and m.lam is None
        worst = max(worst, *errs)
    dt = time.perf_counter() - t0
    ok &= worst < 1e-12 and dt < 1.0
    return report("1 coefficient identities", ok,
                  f"max rel err {worst:.1e}; lambda(RK(7,4,11)) = {get_method('RK(7,4,11)').lam:.10f}; {dt:.2f}s")


def check_2():
    t0 = time.perf_counter()
    roots = solve_esc(7, 4)
    target = np.array([(R10 - 2) / 144, (R10 - 3) / 144, (8 * R10 - 25) / 3456])
    errs = [np.max(np.abs(np.array(r.a[5:]) - target)) for r in roots]
    ok = min(errs) < 1e-10
    b_roots = solve_esc(4, 2)
    for name in ("RK(4,2,7)-a", "RK(4,2,7)-b"):
        want = np.array(A_TAIL[name])
        ok &= any(np.max(np.abs(np.array(r.a[3:]) - want)) < 1e-10 for r in b_roots)
    dt = time.perf_counter() - t0
    ok &= dt < 5.0
    return report("2 ESC re-derivation", ok, f"RK(7,4,11) err {min(errs):.1e}; {len(b_roots)} p=2 roots; {dt:.2f}s")


def check_3():
    t0 = time.perf_counter()
    ns = [100, 200, 400, 800, 1600]
    ok = True
    notes = []
    for name in TABLED:
        m = get_method(name)
        tab = convergence_study("oscillator", name, ns)
        o1 = fit_order(ns, tab.column("eps1"))
        o2 = fit_order(ns, tab.column("eps2"))
        oi = fit_order(ns, tab.column("eps_inf"))
        oe = fit_order(ns, tab.column("eps_e"), floor=1e-14)
        eps_e = tab.column("eps_e")
        good = (abs(o1 - m.p) <= 0.15 and abs(oi - m.p) <= 0.15 and abs(o2 - (m.p + 0.5)) <= 0.15
                and abs(oe - m.r) <= 0.2)
        # sign is read where the energy error is above rounding
        big = eps_e[np.abs(eps_e) > 1e-14]
        good &= bool(np.all(big > 0) if m.p == 2 else np.all(big < 0))
        if not good:
            notes.append(f"{name}: {o1:.2f}/{o2:.2f}/{oi:.2f}/{oe:.2f}")
        ok &= good
    tiny_a = abs(oscillator_case("RK(5,2,9)-a", 1600).eps_e)
    tiny_b = abs(oscillator_case("RK(7,4,11)", 800).eps_e)
    ok &= tiny_a < 1e-14 and tiny_b < 1e-14
    dt = time.perf_counter() - t0
    ok &= dt < 10.0
    return report("3 oscillator convergence", ok,
                  f"{len(TABLED)} methods; |epsE| {tiny_a:.1e}, {tiny_b:.1e}; {dt:.1f}s"
                  + ("; " + ", ".join(notes) if notes else ""))


def check_4():
    e100 = oscillator_case("RK(4,4,5)", 100).eps_e
    e1600 = oscillator_case("RK(4,4,5)", 1600).eps_e
    ok = rel(e100, -2.85e-1) <= 0.01 and rel(e1600, -3.47e-7) <= 0.01
    return report("4 oscillator spot values", ok, f"{e100:.4e}, {e1600:.4e}")


def check_5():
    system = oscillator_build(OscillatorSpec())
    ok = True
    first_up = {}
    for name in P4:
        m = get_method(name)
        h = 0.999 * m.lam / system.norm_L
        rec = integrate(system, m, h, system.initial, 10_000)
        ok &= bool(np.all(np.diff(rec.energies) <= 0.0))
        # growth above the bound eventually overflows the energy itself
        with np.errstate(over="ignore", invalid="ignore"):
            rec = integrate(system, m, 1.05 * m.lam / system.norm_L, system.initial, 1000)
            up = np.flatnonzero(np.diff(rec.energies) > 0)
        ok &= up.size > 0
        first_up[name] = int(up[0]) + 1 if up.size else None
    return report("5 strong stability threshold", ok, f"first increase above bound: {first_up}")


def check_6():
    t0 = time.perf_counter()
    ns = [100, 200, 400]
    ok = True
    out = []
    for name in ("RK(4,4,5)", "RK(7,4,11)"):
        m = get_method(name)
        tab = convergence_study("peridynamics", name, ns)
        for row in tab.rows[1:]:
            ok &= (abs(row.order1 - 4) <= 0.25 and abs(row.order2 - 4.5) <= 0.25
                   and abs(row.order_inf - 4) <= 0.25 and abs(row.order_e - m.r) <= 0.5)
            out.append(f"{name}@{row.n}: {row.order1:.2f}/{row.order2:.2f}/{row.order_inf:.2f}/{row.order_e:.2f}")
        if name == "RK(7,4,11)":
            e200 = tab.rows[1].eps_e
            ok &= 0.1 <= e200 / -2.43e-12 <= 10.0
    dt = time.perf_counter() - t0
    ok &= dt < 60.0
    return report("6 peridynamics convergence", ok, f"{'; '.join(out)}; epsE(200) {e200:.3e}; {dt:.1f}s")


def check_7():
    t0 = time.perf_counter()
    ok = True
    out = []
    for name in P4:
        tab = convergence_study("maxwell", name, [2000, 4000])
        row = tab.rows[1]
        ok &= abs(row.order1 - 2) <= 0.2 and abs(row.order2 - 2.5) <= 0.2 and abs(row.order_inf - 2) <= 0.2
        out.append(f"{name}: {row.order1:.2f}/{row.order2:.2f}/{row.order_inf:.2f}")
        if name == "RK(4,4,5)":
            e2000, oe = tab.rows[0].eps_e, row.order_e
            ok &= rel(e2000, -8.07e-4) <= 0.05 and abs(oe - 5) <= 0.2
    fd = fdtd_run(MaxwellSpec(n_x=2000), 1.0, record_every=1)
    stag = fd.extra["staggered"]
    drift = float(np.max(np.abs(stag - stag[0])) / stag[0])
    ok &= drift < 1e-13
    dt = time.perf_counter() - t0
    ok &= dt < 60.0
    return report("7 maxwell convergence", ok,
                  f"{'; '.join(out)}; RK4 epsE {e2000:.4e} order {oe:.2f}; FDTD drift {drift:.1e}; {dt:.1f}s")


def check_8():
    ok = True
    worst = 0.0
    for name in P4:
        m = get_method(name)
        lam, _ = strong_stability_bound(m.coefficients)
        d = abs(imaginary_axis_interval(m.coefficients) - lam)
        worst = max(worst, d)
        ok &= d <= 1e-8
    zeros = [imaginary_axis_interval([1.0, 1.0])]
    zeros += [imaginary_axis_interval(m.coefficients) for m in catalog() if m.p == 2]
    ok &= all(z == 0.0 for z in zeros)
    return report("8 imaginary-axis interval equals lambda", ok, f"max diff {worst:.1e}")


def dense_step(a, L, h, u):
    out, power = np.zeros_like(u), u.copy()
    for ak in a:
        out += ak * power
        power = h * (L @ power)
    return out


def check_9():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        system, L = random_antisymmetric_system(rng, int(rng.integers(2, 9)))
        u = rng.standard_normal(system.dim)
        h = float(rng.uniform(0.1, 1.0)) / np.linalg.norm(L, 2)
        for m in catalog():
            got = rk_step(system, stage_ratios(m.coefficients), h, u)
            ref = dense_step(m.coefficients.a, L, h, u)
            worst = max(worst, np.linalg.norm(got - ref) / np.linalg.norm(ref))
    return report("9 low-storage step equals dense powers", worst < 1e-12, f"max rel err {worst:.1e}")


def check_10():
    t0 = time.perf_counter()
    finals = []
    for name in P4:
        rec = energy_history("oscillator", name, 0, 5000, record_every=50, T=1000.0)
        finals.append(abs(rec.relative_energy_deviation[-1]))
    ratios = [a / b for a, b in zip(finals, finals[1:])]
    dt = time.perf_counter() - t0
    ok = all(r >= 1e2 for r in ratios) and dt < 120.0
    return report("10 long-run energy separation (oscillator)", ok,
                  "final |epsE| " + ", ".join(f"{v:.1e}" for v in finals) + f"; {dt:.1f}s")


def check_10_maxwell():
    t0 = time.perf_counter()
    want = {"RK(4,4,5)": 0.02, "RK(7,4,11)": 4.7e-12}
    got = {}
    for name, target in want.items():
        rec = energy_history("maxwell", name, 1000, 100_000, record_every=1000, courant=0.5)
        got[name] = abs(rec.relative_energy_deviation[-1])
    ok = all(0.1 <= got[n] / want[n] <= 10.0 for n in want)
    return report("10 long-run energy (maxwell, 100000 steps)", ok,
                  ", ".join(f"{n} {v:.2e}" for n, v in got.items()) + f"; {time.perf_counter() - t0:.0f}s")


def check_efficiency():
    ok = True
    out = []
    for problem, pairs in (("oscillator", [(400, 800), (800, 1600)]),
                           ("peridynamics", [(100, 200), (200, 400)])):
        for lo, hi in pairs:
            fast = run_case(problem, "RK(7,4,11)", lo)
            ref = run_case(problem, "RK(4,4,5)", hi)
            ok &= fast.eps2 < ref.eps2 and abs(fast.eps_e) < abs(ref.eps_e)
            out.append(f"{problem} {lo} vs {hi}: {fast.eps2:.1e}<{ref.eps2:.1e}")
    return report("relative efficiency RK(7,4,11) at half resolution", ok, "; ".join(out))


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8, check_9,
          check_10, check_efficiency]


@pytest.mark.parametrize("check", CHECKS, ids=lambda c: c.__name__)
def test_criterion(check, capsys):
    with capsys.disabled():
        ok = check()
    assert ok


@pytest.mark.slow
def test_criterion_10_maxwell_long_run(capsys):
    with capsys.disabled():
        ok = check_10_maxwell()
    assert ok


if __name__ == "__main__":
    results = [c() for c in CHECKS]
    if "--slow" in sys.argv:
        results.append(check_10_maxwell())
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
