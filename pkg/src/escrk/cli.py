"""Command-line harness: method tables, re-derivation, convergence studies,
energy histories and stability-region boundaries.

Exit codes: 0 on success, 2 for usage errors, 3 for numerical failures.
"""
from __future__ import annotations

import argparse
import io
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import analysis, experiments
from .catalog import catalog, get_method, solve_esc
from .integrator import InstabilityError
from .rk_core import energy_coefficients, energy_profile

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

CONVERGENCE_HEADER = ("N", "eps1", "order1", "eps2", "order2", "epsInf", "orderInf", "epsE", "orderE")
HISTORY_HEADER = ("step", "time", "energy", "eps_E", "|eps_E|")
REGION_HEADER = ("re", "im")
MATCH_TOL = 1e-9


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """Shortest round-trip scientific notation; empty for missing values."""
    if x is None:
        return ""
    x = float(x)
    if not math.isfinite(x):
        return repr(x)
    return np.format_float_scientific(x, unique=True, trim="-")


def _fmt_lam(lam) -> str:
    return "-" if lam is None else f"{lam:.10g}"


# ---------------------------------------------------------------------------
# Config handling
# ---------------------------------------------------------------------------

def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` file; blank lines and ``#`` comments are ignored."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_").lower()] = value
    return out


def _settings(args) -> dict:
    """Merge the config file (if any) with flags; flags win."""
    merged = read_config(args.config) if getattr(args, "config", None) else {}
    for key, value in vars(args).items():
        if key in ("config", "func", "command") or value is None:
            continue
        merged[key.lower()] = value
    return merged


def _int_list(value) -> list[int]:
    if isinstance(value, (list, tuple)):
        items = value
    else:
        items = [v for v in str(value).replace(" ", "").split(",") if v]
    try:
        return [int(v) for v in items]
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated list of integers, got {value!r}") from exc


def _get(cfg, key, cast, default=None):
    if key not in cfg:
        return default
    try:
        return cast(cfg[key])
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad value for {key}: {cfg[key]!r}") from exc


def _problem(cfg) -> str:
    problem = cfg.get("problem")
    if problem is None:
        raise UsageError("--problem is required")
    if problem not in experiments.PROBLEMS:
        raise UsageError(f"unknown problem {problem!r}; choose from {', '.join(experiments.PROBLEMS)}")
    return problem


def _method_name(cfg, problem: Optional[str] = None) -> str:
    name = cfg.get("method")
    if name is None:
        raise UsageError("--method is required")
    if name.lower() == "fdtd":
        if problem != "maxwell":
            raise UsageError("method fdtd is only available for the maxwell problem")
        return "fdtd"
    try:
        return get_method(name).name
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc


def _case_kwargs(problem: str, cfg) -> dict:
    kw = {}
    T = _get(cfg, "t", float)
    if T is not None:
        if not T > 0:
            raise UsageError("--T must be positive")
        if problem == "oscillator":
            kw["spec"] = experiments.OscillatorSpec(T=T)
        else:
            kw["T"] = T
    courant = _get(cfg, "courant", float)
    if courant is not None:
        if problem != "maxwell":
            raise UsageError("--courant only applies to the maxwell problem")
        if not courant > 0:
            raise UsageError("--courant must be positive")
        kw["courant"] = courant
    h_init = cfg.get("h_init")
    if h_init is not None:
        if problem != "maxwell":
            raise UsageError("--h-init only applies to the maxwell problem")
        kw["h_init"] = h_init
    return kw


def _resolutions(cfg, problem: str) -> list[int]:
    key = "nt" if problem == "oscillator" else "nx"
    raw = cfg.get(key, cfg.get("resolutions"))
    if raw is None:
        raise UsageError(f"--{key} is required (comma-separated resolutions)")
    ns = _int_list(raw)
    if not ns:
        raise UsageError("empty resolution list")
    if any(n <= 0 for n in ns):
        raise UsageError("resolutions must be positive")
    if any(b != 2 * a for a, b in zip(ns, ns[1:])):
        raise UsageError("resolutions must be increasing and double each time")
    return ns


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _write_csv(out, header, rows, footer=()):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(row) + "\n")
    for line in footer:
        buf.write(f"# {line}\n")
    _emit(out, buf.getvalue())


def _emit(out, text: str):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def methods_table() -> str:
    lines = [f"{'name':<12} {'s':>2} {'p':>2} {'r':>3} {'lambda':>14} {'b_(s-1)':>24}"]
    for m in catalog():
        prof = m.profile
        lines.append(
            f"{m.name:<12} {m.s:>2} {m.p:>2} {m.r:>3} {_fmt_lam(m.lam):>14} {fmt(prof.b_sm1):>24}"
        )
    return "\n".join(lines) + "\n"


def cmd_methods(args) -> int:
    if args.action == "list":
        sys.stdout.write(methods_table())
        return EXIT_OK
    if not args.name:
        raise UsageError("methods show needs a method name")
    try:
        m = get_method(args.name)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from exc
    b = energy_coefficients(m.coefficients)
    out = [f"name    {m.name}", f"s       {m.s}", f"p       {m.p}", f"r       {m.r}",
           f"lambda  {_fmt_lam(m.lam)}"]
    out += [f"a_{k:<5} {fmt(v)}" for k, v in enumerate(m.coefficients.a)]
    out += [f"b_{k:<5} {fmt(v)}" for k, v in enumerate(b, 1)]
    sys.stdout.write("\n".join(out) + "\n")
    return EXIT_OK


def derive_report(s: int, p: int) -> str:
    roots = solve_esc(s, p)
    lines = [f"solve_esc(s={s}, p={p}): {len(roots)} root(s)"]
    for i, a in enumerate(roots, 1):
        prof = energy_profile(a)
        tail = ", ".join(fmt(v) for v in a.a[p + 1:])
        match = [m.name for m in catalog()
                 if m.s == s and np.allclose(m.coefficients.as_array(), a.as_array(),
                                             rtol=MATCH_TOL, atol=0.0)]
        lines.append(
            f"root {i}: a_{p + 1}..a_{s} = [{tail}]  p={prof.p} r={prof.r} "
            f"lambda={_fmt_lam(prof.lam)}  catalog={match[0] if match else '-'}"
        )
    return "\n".join(lines) + "\n"


def cmd_derive(args) -> int:
    s, p = args.s, args.p
    if p < 2 or p % 2:
        raise UsageError(f"p must be even and >= 2, got {p}")
    if not p < s <= p + 3:
        raise UsageError(f"need p < s <= p + 3, got s={s}, p={p}")
    text = derive_report(s, p)
    if "0 root(s)" in text.splitlines()[0]:
        sys.stdout.write(text)
        sys.stderr.write("error: Newton iteration found no admissible root\n")
        return EXIT_NUMERIC
    sys.stdout.write(text)
    return EXIT_OK


def convergence_rows(table: analysis.ConvergenceTable) -> list[list[str]]:
    rows = []
    for r in table.rows:
        if r.unstable:
            rows.append([str(r.n)] + ["UNSTABLE", ""] * 4)
        else:
            rows.append([str(r.n), fmt(r.eps1), fmt(r.order1), fmt(r.eps2), fmt(r.order2),
                         fmt(r.eps_inf), fmt(r.order_inf), fmt(r.eps_e), fmt(r.order_e)])
    return rows


def cmd_convergence(args) -> int:
    cfg = _settings(args)
    problem = _problem(cfg)
    method = _method_name(cfg, problem)
    ns = _resolutions(cfg, problem)
    table = experiments.convergence_study(problem, method, ns, **_case_kwargs(problem, cfg))
    footer = [f"problem={problem}", f"method={method}"]
    _write_csv(cfg.get("out"), CONVERGENCE_HEADER, convergence_rows(table), footer)
    return EXIT_OK


def cmd_energy_history(args) -> int:
    cfg = _settings(args)
    problem = _problem(cfg)
    method = _method_name(cfg, problem)
    n_steps = _get(cfg, "iterations", int, _get(cfg, "nt", int))
    if n_steps is None:
        raise UsageError("--iterations (or --nt) is required")
    if n_steps < 1:
        raise UsageError("number of iterations must be >= 1")
    every = _get(cfg, "record_every", int, 1)
    if every < 1:
        raise UsageError("--record-every must be >= 1")
    n = _get(cfg, "nx", int, 1000 if problem == "maxwell" else 100)
    if n < 2:
        raise UsageError("--nx must be >= 2")
    kw = {}
    if "t" in cfg:
        kw["T"] = _get(cfg, "t", float)
    if "courant" in cfg:
        kw["courant"] = _get(cfg, "courant", float)
    rec = experiments.energy_history(problem, method, n, n_steps, every, **kw)
    e0 = rec.energies[0]
    eps = (rec.energies - e0) / e0
    rows = [[str(int(k)), fmt(t), fmt(e), fmt(d), fmt(abs(d))]
            for k, t, e, d in zip(rec.steps, rec.times, rec.energies, eps)]
    try:
        slope, intercept = analysis.energy_decay_fit(rec)
        footer = [f"fit log10|eps_E| = slope*log10(t) + intercept: slope={fmt(slope)} "
                  f"intercept={fmt(intercept)}"]
    except ValueError as exc:
        footer = [f"fit unavailable: {exc}"]
    _write_csv(cfg.get("out"), HISTORY_HEADER, rows, footer)
    return EXIT_OK


def _window(value) -> tuple[float, float, float, float]:
    if isinstance(value, (list, tuple)):
        parts = value
    else:
        parts = [v for v in str(value).split(",") if v.strip()]
    try:
        w = tuple(float(v) for v in parts)
    except ValueError as exc:
        raise UsageError(f"bad window {value!r}") from exc
    if len(w) != 4 or not (w[0] < w[1] and w[2] < w[3]):
        raise UsageError("window must be re_lo,re_hi,im_lo,im_hi with lo < hi")
    return w


def cmd_stability_region(args) -> int:
    cfg = _settings(args)
    method = get_method(_method_name(cfg))
    res = _get(cfg, "resolution", int, 1024)
    if res < 16:
        raise UsageError("--resolution must be >= 16")
    window = _window(cfg.get("window", analysis.DEFAULT_WINDOW))
    region = analysis.stability_region(method.coefficients, window, res)
    rows = [[fmt(z.real), fmt(z.imag)] for z in region.ordered_boundary()]
    footer = [f"method={method.name}", f"area={fmt(analysis.region_area(region))}"]
    _write_csv(cfg.get("out"), REGION_HEADER, rows, footer)
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _settings(args)
    problem = args.problem
    method = _method_name(cfg, problem)
    key = "nt" if problem == "oscillator" else "nx"
    default = {"oscillator": 100, "peridynamics": 100, "maxwell": 2000}[problem]
    n = _get(cfg, key, int, default)
    if n < 2:
        raise UsageError(f"--{key} must be >= 2")
    res = experiments.run_case(problem, method, n, **_case_kwargs(problem, cfg))
    out = [f"problem={problem}", f"method={method}", f"N={res.n}", f"N_t={res.n_t}",
           f"dt={fmt(res.dt)}", f"eps1={fmt(res.eps1)}", f"eps2={fmt(res.eps2)}",
           f"epsInf={fmt(res.eps_inf)}", f"epsE={fmt(res.eps_e)}"]
    _emit(cfg.get("out"), "\n".join(out) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p, *, resolutions=False):
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--method")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--T", dest="t", type=float, help="final time")
    p.add_argument("--courant", type=float, help="Courant number (maxwell)")
    if resolutions:
        p.add_argument("--nx", help="grid size(s), comma separated")
        p.add_argument("--nt", help="step count(s), comma separated")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="escrk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("methods", help="list or show catalog methods")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_methods)

    p = sub.add_parser("derive", help="re-derive coefficients by Newton iteration")
    p.add_argument("s", type=int)
    p.add_argument("p", type=int)
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("convergence", help="convergence study to CSV")
    _common(p, resolutions=True)
    p.add_argument("--problem")
    p.add_argument("--h-init", dest="h_init", choices=("half_step", "zero"))
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("energy-history", help="long-run energy history to CSV")
    _common(p)
    p.add_argument("--problem")
    p.add_argument("--nx", type=int, help="grid size (PDE problems)")
    p.add_argument("--nt", "--iterations", dest="iterations", type=int, help="number of steps")
    p.add_argument("--record-every", dest="record_every", type=int)
    p.set_defaults(func=cmd_energy_history)

    p = sub.add_parser("stability-region", help="boundary of |G(z)| <= 1 to CSV")
    p.add_argument("--config")
    p.add_argument("--method")
    p.add_argument("--out")
    p.add_argument("--resolution", type=int)
    p.add_argument("--window", help="re_lo,re_hi,im_lo,im_hi")
    p.set_defaults(func=cmd_stability_region)

    p = sub.add_parser("run", help="single run with error norms")
    p.add_argument("problem", choices=experiments.PROBLEMS)
    _common(p, resolutions=True)
    p.add_argument("--h-init", dest="h_init", choices=("half_step", "zero"))
    p.set_defaults(func=cmd_run)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (InstabilityError, ArithmeticError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
