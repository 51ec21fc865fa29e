"""tailnorms - reproducible verification runs emitting CSV tables.

Usage::

    tailnorms norms          [--profile sqrt-log] [--p-grid 1,2,3,4]
    tailnorms counterexample [--beta 1] [--profile constant] [--p-grid k:6:20]
    tailnorms montecarlo     [--seed 0] [--count 100000] [--u-grid 0.5,1.5,2.5]
    tailnorms embedding      [--mode gls|orlicz] --phi SPEC --psi SPEC

Every command is a pure function of its configuration.  ``--config FILE``
reads a JSON object of option values; flags given on the command line win.
``--out DIR`` writes one ``<table>.csv`` per table, otherwise tables go to
stdout, each preceded by a ``# <table>`` line.

Exit codes: 0 success, 1 invalid configuration, 2 a certified check
failed, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import counterexample as cx
from . import measure, montecarlo, norms, psi
from .measure import QuadratureConfig, QuadratureError

EXIT_OK, EXIT_CONFIG, EXIT_CHECK, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULTS = {
    "beta": 1.0,
    "profile": "constant",
    "nmax": 100_000,
    "seed": 0,
    "out": None,
    "p_grid": None,
    "u_grid": None,
    "tol": 1e-9,
    "count": 100_000,
    "blocks": 20,
    "mode": "gls",
    "phi": "power-singular:0.125:4",
    "psi": "power-singular:0:4",
    "lambdas": "0.5,1,2,10",
}


class ConfigError(ValueError):
    def __init__(self, problems):
        super().__init__("; ".join(problems))
        self.problems = list(problems)


class CheckFailed(RuntimeError):
    pass


@dataclass
class RunConfig:
    command: str
    beta: float = 1.0
    profile: str = "constant"
    nmax: int = 100_000
    seed: int = 0
    out: Optional[str] = None
    p_grid: Optional[str] = None
    u_grid: Optional[str] = None
    tol: float = 1e-9
    count: int = 100_000
    blocks: int = 20
    mode: str = "gls"
    phi: str = DEFAULTS["phi"]
    psi: str = DEFAULTS["psi"]
    lambdas: str = DEFAULTS["lambdas"]
    problems: list = field(default_factory=list)

    @property
    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(rel_tol=self.tol)


# ---------------------------------------------------------------- parsing


def parse_profile(text: str):
    """``constant[:c]``, ``sqrt-log`` or ``indicator:mass[:value]``."""
    name, *args = text.split(":")
    vals = [float(a) for a in args]
    if name == "constant" and len(vals) <= 1:
        c = vals[0] if vals else 1.0
        return measure.constant(c), {"tag": "constant", "c": c}
    if name == "sqrt-log" and not vals:
        return measure.sqrt_log(), {"tag": "sqrt-log"}
    if name == "indicator" and 1 <= len(vals) <= 2:
        value = vals[1] if len(vals) > 1 else 1.0
        return measure.indicator(vals[0], value), {"tag": "indicator", "mass": vals[0],
                                                   "value": value}
    raise ValueError(f"unknown profile {text!r}")


def parse_psi(text: str) -> psi.PsiFunction:
    """``power-singular:beta:b``, ``constant[:value[:a:b]]``, ``degenerate:r`` or ``sqrt``."""
    name, *args = text.split(":")
    vals = [float(a) for a in args]
    if name == "power-singular" and len(vals) == 2:
        return psi.power_singular(*vals)
    if name == "constant" and len(vals) in (0, 1, 3):
        return psi.constant_psi(*vals)
    if name == "degenerate" and len(vals) == 1:
        return psi.degenerate(vals[0])
    if name == "sqrt" and len(vals) in (0, 2):
        return psi.sqrt_psi(*vals)
    raise ValueError(f"unknown psi-function {text!r}")


def parse_young(text: str) -> psi.YoungFunction:
    """``power:p``, ``exp-square`` or ``exp``."""
    name, *args = text.split(":")
    if name == "power" and len(args) == 1:
        return psi.young_power(float(args[0]))
    if name == "exp-square" and not args:
        return psi.young_exp_square()
    if name == "exp" and not args:
        return psi.young_exp()
    raise ValueError(f"unknown Young function {text!r}")


def parse_floats(text: str) -> list:
    return [float(t) for t in text.split(",") if t.strip()]


def parse_p_grid(text: str) -> list:
    """``k:KMIN:KMAX`` for ``p = 4 - 2**-k``, or a comma list of exponents.

    Returns ``(label, p, 4 - p)`` triples; the gap is exact for the ``k`` form.
    """
    if text.startswith("k:"):
        _, lo, hi = text.split(":")
        lo, hi = int(lo), int(hi)
        if not 1 <= lo <= hi <= 60:
            raise ValueError("k range must satisfy 1 <= kmin <= kmax <= 60")
        return [(k, p, h) for k, p, h in cx.asymptotic_grid(lo, hi)]
    return [(p, p, 4.0 - p) for p in parse_floats(text)]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tailnorms", description=__doc__.split("\n")[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of option values")
    common.add_argument("--beta", type=float)
    common.add_argument("--profile")
    common.add_argument("--nmax", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out")
    common.add_argument("--p-grid", dest="p_grid")
    common.add_argument("--u-grid", dest="u_grid")
    common.add_argument("--tol", type=float, help="relative quadrature tolerance")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("norms", parents=[common], help="norm table for one profile")
    c = sub.add_parser("counterexample", parents=[common], help="verify the block process")
    c.add_argument("--blocks", type=int, help="blocks listed in the block/continuity tables")
    m = sub.add_parser("montecarlo", parents=[common], help="sampling diagnostics")
    m.add_argument("--count", type=int, help="draws per batch")
    e = sub.add_parser("embedding", parents=[common], help="significantly-weaker verdicts")
    e.add_argument("--mode", choices=["gls", "orlicz"])
    e.add_argument("--phi")
    e.add_argument("--psi")
    e.add_argument("--lambdas")
    return parser


def load_config(argv=None) -> RunConfig:
    """Defaults, then the ``--config`` file, then explicit flags."""
    args = build_parser().parse_args(argv)
    values = dict(DEFAULTS)
    problems = []
    if args.config:
        try:
            with open(args.config) as fh:
                file_vals = json.load(fh)
            unknown = set(file_vals) - set(DEFAULTS)
            if unknown:
                problems.append(f"unknown config keys: {', '.join(sorted(unknown))}")
            values.update({k: v for k, v in file_vals.items() if k in DEFAULTS})
        except (OSError, ValueError) as exc:
            problems.append(f"cannot read config file: {exc}")
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    cfg = RunConfig(args.command, **values)
    cfg.problems = problems + validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> list:
    problems = []
    if not (isinstance(cfg.beta, (int, float)) and cfg.beta > 0):
        problems.append(f"beta must be positive, got {cfg.beta!r}")
    if not (isinstance(cfg.nmax, int) and cfg.nmax >= 10):
        problems.append(f"nmax must be an integer >= 10, got {cfg.nmax!r}")
    if not (isinstance(cfg.tol, (int, float)) and 0 < cfg.tol < 1):
        problems.append(f"tol must lie in (0, 1), got {cfg.tol!r}")
    if not (isinstance(cfg.count, int) and cfg.count >= 2):
        problems.append(f"count must be an integer >= 2, got {cfg.count!r}")
    if not (isinstance(cfg.blocks, int) and 1 <= cfg.blocks <= min(cfg.nmax, 1000)
            if isinstance(cfg.nmax, int) else False):
        problems.append(f"blocks must be an integer in 1..min(nmax, 1000), got {cfg.blocks!r}")
    if not isinstance(cfg.seed, int):
        problems.append(f"seed must be an integer, got {cfg.seed!r}")
    try:
        parse_profile(cfg.profile)
    except (ValueError, TypeError, AttributeError) as exc:
        problems.append(f"profile: {exc}")
    for name, parser in (("p_grid", parse_p_grid), ("u_grid", parse_floats)):
        text = getattr(cfg, name)
        if text is not None:
            try:
                parser(text)
            except (ValueError, TypeError, AttributeError) as exc:
                problems.append(f"{name.replace('_', '-')}: {exc}")
    if cfg.command == "embedding":
        parse = parse_psi if cfg.mode == "gls" else parse_young
        for name in ("phi", "psi"):
            try:
                parse(getattr(cfg, name))
            except (ValueError, TypeError, AttributeError) as exc:
                problems.append(f"{name}: {exc}")
        try:
            if any(l <= 0 for l in parse_floats(cfg.lambdas)):
                problems.append("lambdas must be positive")
        except ValueError as exc:
            problems.append(f"lambdas: {exc}")
    return problems


# ---------------------------------------------------------------- output


def fmt(x) -> str:
    """Locale-free number format; scientific outside ``1e-6 <= |x| < 1e6``."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"
    if 1e-6 <= abs(x) < 1e6:
        return np.format_float_positional(x, precision=15, unique=False, fractional=False,
                                          trim="-")
    return f"{x:.15e}"


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def emit(tables: dict, out: Optional[str], stream=None):
    stream = stream or sys.stdout
    if out:
        os.makedirs(out, exist_ok=True)
        for name, (header, rows) in tables.items():
            with open(os.path.join(out, f"{name}.csv"), "w", newline="") as fh:
                fh.write(render_csv(header, rows))
    else:
        for name, (header, rows) in tables.items():
            stream.write(f"# {name}\n")
            stream.write(render_csv(header, rows))


# ---------------------------------------------------------------- commands


def cmd_norms(cfg: RunConfig) -> tuple:
    f, _ = parse_profile(cfg.profile)
    q = cfg.quadrature
    ps = [p for _, p, _ in parse_p_grid(cfg.p_grid or "1,2,3,4")]
    rows = []

    def add(name, param, rep):
        r = rep.to_row()
        rows.append((name, param, r["value"], r["method"], r["error"], r["argmax"]))

    for p in ps:
        add("lp", fmt(p), norms.lp_norm(f, p, q))
    for p in ps:
        add("gls", f"degenerate:{fmt(p)}", norms.gls_norm(f, psi.degenerate(p), q))
    add("gls", "power-singular:0:4", norms.gls_norm(f, psi.power_singular(0.0, 4.0), q))
    add("gls", "power-singular:0.125:4", norms.gls_norm(f, psi.power_singular(0.125, 4.0), q))
    for spec in ("exp-square", "exp", "power:2"):
        add("luxemburg", spec, norms.luxemburg_norm(f, parse_young(spec), q))
    for alpha in (1.0, 0.5):
        add("lorentz", f"t^{fmt(alpha)}", norms.lorentz_norm(f, norms.LorentzWeight.power(alpha),
                                                             cfg=q))
    header = ("norm", "parameter", "value", "method", "error", "argmax")
    return {"norms": (header, rows)}, []


BLOCK_PS = (1.0, 1.5, 2.0, 3.0, 3.9)


def cmd_counterexample(cfg: RunConfig) -> tuple:
    f, tag = parse_profile(cfg.profile)
    q = cfg.quadrature
    spec = cx.build_spec(cfg.beta, f, cfg.nmax, q, tag)
    proc = cx.CounterexampleProcess(spec)
    failures = []

    block_rows, worst = [], 0.0
    for n in range(1, cfg.blocks + 1):
        g = cx.block(spec, n)
        for p in BLOCK_PS:
            closed = cx.block_lp_closed_form(spec, n, p)
            quad = norms.lp_norm(g, p, q).value
            rel = abs(quad - closed) / closed
            worst = max(worst, rel)
            block_rows.append((n, p, closed, quad, rel))
    if worst > 1e-6:
        failures.append(f"block-norm closed form (worst relative error {worst:.3g})")
    bound = spec.C * spec.nu(4.0) ** 4
    top = max(r[3] ** r[1] for r in block_rows)
    if top > bound * (1 + 1e-9):
        failures.append("uniform L4 bound on the blocks")

    grid = parse_p_grid(cfg.p_grid or "k:6:20")
    asym_rows = []
    for label, p, h in grid:
        sv = cx.sup_lp_series(spec, p, gap=h)
        asym_rows.append((label, p, sv.bracket.lower, sv.bracket.upper, sv.norm,
                          h * sv.value, h ** 0.25 * sv.norm))
    last = [r[-1] for r in asym_rows[-3:]]
    if len(last) < 3 or (max(last) - min(last)) > 0.02 * abs(last[-1]):
        failures.append("blow-up law (4-p)^(1/4) |sup g|_p not stabilising")

    phi0 = psi.power_singular(0.125, 4.0)
    window = min(10, len(grid))
    cert = cx.weaker_norm_divergence(spec, phi0, gaps=[h for _, _, h in grid], window=window)
    cert_rows = [(label,) + row for (label, _, _), row in zip(grid, cert.rows)]
    if not cert.certified:
        failures.append(f"divergence of the weaker-space norm of the supremum ({cert.verdict})")

    psi4 = psi.degenerate(4.0)
    cont_rows, prev = [], math.inf
    for n in range(1, cfg.blocks + 1):
        closed = cx.block_lp_closed_form(spec, n, 4.0)
        rep = cx.gls_continuity_modulus(proc, psi4, n, cfg=q)
        rel = abs(rep.value - closed) / closed
        cont_rows.append((n, cx.MetricSpaceT(spec.nmax).distance(n, cx.INF), closed, rep.value,
                          rel))
        if rel > 1e-6 or not rep.value < prev:
            failures.append(f"continuity modulus at n={n}")
        prev = rep.value

    tables = {
        "blocks": (("n", "p", "closed_form", "quadrature", "rel_error"), block_rows),
        "asymptotic": (("k", "p", "series_lower", "series_upper", "sup_norm",
                        "gap_times_series", "gap_quarter_times_norm"), asym_rows),
        "certificate": (("k", "p", "sup_norm", "phi0", "ratio"), cert_rows),
        "certificate_verdict": (("verdict", "log_slope", "growth"),
                                [(cert.verdict, cert.slope, cert.growth)]),
        "continuity": (("n", "distance_to_inf", "closed_form", "gls_norm", "rel_error"),
                       cont_rows),
    }
    return tables, failures


def cmd_montecarlo(cfg: RunConfig) -> tuple:
    f, tag = parse_profile(cfg.profile)
    spec = cx.build_spec(cfg.beta, f, cfg.nmax, cfg.quadrature, tag)
    proc = cx.CounterexampleProcess(spec)
    batch = montecarlo.make_batch(cfg.seed, cfg.count)
    failures = []

    ugrid = parse_floats(cfg.u_grid or "0.5,1.5,2.5,5")
    tail_rows = [(t.u, t.estimate, t.stderr, t.exact)
                 for t in montecarlo.tail_curve(proc, ugrid, batch)]
    ps = [p for _, p, _ in parse_p_grid(cfg.p_grid or "1,2,3")]
    lp_rows = []
    for p in ps:
        m = montecarlo.estimate_lp(proc, p, batch)
        lp_rows.append((p, m.estimate, m.stderr, m.exact))
    bc_rows = []
    for eps in (0.5, 1.5, 10.0):
        r = montecarlo.borel_cantelli_diagnostic(spec, eps)
        bc_rows.append((eps, r.partial_sums[-1], r.total.lower, r.total.upper, r.bound.lower,
                        r.holds))
        if not r.holds:
            failures.append(f"Borel-Cantelli bound at epsilon={eps:g}")
    union_rows = []
    partitions = {
        "singleton": montecarlo.singleton_partition(spec.nmax),
        "dyadic": montecarlo.dyadic_partition(spec.nmax),
        "whole": [range(1, spec.nmax + 1), [cx.INF]],
    }
    for name, part in partitions.items():
        idx = montecarlo.PartitionIndex(part, spec.nmax)
        for u in ugrid:
            r = montecarlo.union_bound_check(proc, idx, u, batch)
            union_rows.append((name, u, r.lhs, r.rhs, r.slack, r.combined_stderr))
            if not r.holds():
                failures.append(f"union bound, {name} partition, u={u:g}")
    tables = {
        "tail": (("u", "estimate", "stderr", "exact"), tail_rows),
        "lp": (("p", "estimate", "stderr", "series"), lp_rows),
        "borel_cantelli": (("epsilon", "partial_sum", "total_lower", "total_upper", "bound",
                            "holds"), bc_rows),
        "union_bound": (("partition", "u", "lhs", "rhs", "slack", "stderr"), union_rows),
    }
    return tables, failures


def cmd_embedding(cfg: RunConfig) -> tuple:
    if cfg.mode == "gls":
        phi, psi_ = parse_psi(cfg.phi), parse_psi(cfg.psi)
        v = psi.gls_weaker(phi, psi_)
        trace = (("p", "phi", "psi", "ratio"), list(v.trace))
    else:
        Psi, Phi = parse_young(cfg.phi), parse_young(cfg.psi)
        v = psi.orlicz_weaker(Psi, Phi, parse_floats(cfg.lambdas))
        trace = (("lambda", "u", "log_ratio"), list(v.trace))
    return {"verdict": (("mode", "phi", "psi", "verdict", "log_slope"),
                        [(cfg.mode, cfg.phi, cfg.psi, v.verdict, v.slope)]),
            "trace": trace}, []


COMMANDS = {
    "norms": cmd_norms,
    "counterexample": cmd_counterexample,
    "montecarlo": cmd_montecarlo,
    "embedding": cmd_embedding,
}


def run(cfg: RunConfig, stream=None) -> int:
    err = sys.stderr
    if cfg.problems:
        for p in cfg.problems:
            print(f"tailnorms: config error: {p}", file=err)
        return EXIT_CONFIG
    try:
        tables, failures = COMMANDS[cfg.command](cfg)
    except (QuadratureError, norms.RearrangementError) as exc:
        print(f"tailnorms: numerical failure: {exc}", file=err)
        return EXIT_NUMERIC
    emit(tables, cfg.out, stream)
    if failures:
        for msg in failures:
            print(f"tailnorms: check failed: {msg}", file=err)
        return EXIT_CHECK
    return EXIT_OK


def main(argv=None) -> int:
    try:
        return run(load_config(argv))
    except BrokenPipeError:
        # downstream reader closed early (e.g. ``| head``); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
