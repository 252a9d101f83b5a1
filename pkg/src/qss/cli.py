"""Command-line interface: ``qss <verb> ...``."""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import analysis, bell, fidelity, oracle, states
from .qmath import ConvergenceError

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FAIL = 2

MSR_DELTA_TOL = 1e-6
CSR_ORACLE_TOL = 1e-6
TELEPORT_ABS_TOL = 2e-3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # malformed command lines share the input-error exit code
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def fmt(x) -> str:
    """Fixed 12-decimal rendering with trailing zeros trimmed (keeps one)."""
    if x is None:
        return "n/a"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    s = f"{float(x):.12f}".rstrip("0")
    if s.endswith("."):
        s += "0"
    return "0.0" if s == "-0.0" else s


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _workers_default():
    return analysis.default_workers()


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qss", description="Secret-sharing and teleportation analysis of three-qubit states.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="analyse one state file")
    a.add_argument("statefile")
    a.add_argument("--json", action="store_true", help="single-line key=value output")

    def sweep_opts(sp, with_phase=True):
        sp.add_argument("--n", type=_positive_int, required=True)
        sp.add_argument("--seed", type=int, required=True)
        if with_phase:
            sp.add_argument("--phase", action="store_true", help="randomise the relative phase")
        sp.add_argument("--workers", type=_positive_int, default=None,
                        help="worker processes (default: $QSS_WORKERS or 1)")

    s = sub.add_parser("sweep", help="seeded random sweep to CSV")
    sweep_opts(s)
    s.add_argument("--out", required=True)

    f = sub.add_parser("figure", help="scatter data, boundary curve and gnuplot script")
    f.add_argument("kind", choices=["rf-vs-tf", "rf-vs-bell"])
    sweep_opts(f)
    f.add_argument("--out", required=True, help="output prefix")

    v = sub.add_parser("verify", help="check the three inequalities on a sweep")
    sweep_opts(v)
    v.add_argument("--tol", type=float, default=analysis.VIOL_TOL)

    m = sub.add_parser("msr", help="maximal-reconstruction family table")
    m.add_argument("--grid", type=_positive_int, required=True)

    o = sub.add_parser("oracle", help="brute-force cross-check of one state")
    o.add_argument("kind", choices=["teleport", "csr"])
    o.add_argument("statefile")
    o.add_argument("--mc", type=_positive_int, default=200_000, help="Monte Carlo samples")
    o.add_argument("--seed", type=int, default=0)
    return p


# ---------------------------------------------------------------------------
# record rendering


def record_fields(rec: analysis.AnalysisRecord) -> list[tuple[str, object]]:
    """Record fields in CSV column order (without the sample index)."""
    if rec.params is not None:
        lam = list(rec.params.lambdas) + [rec.params.phi]
    else:
        lam = [None] * 6
    f, b = rec.fidelity, rec.bell
    vals = lam + [f.theta2_ab, f.theta2_ac, f.f_ab, f.f_ac, f.f_max, f.theta3, f.f_csr,
                  b.m_ab, b.m_ac, b.s_max, rec.flags["secret_shareable"],
                  rec.flags["msr_boundary"], rec.slacks["thm1"], rec.slacks["thm2"]]
    return list(zip(analysis.CSV_COLUMNS[1:], vals))


def render_kv(rec) -> str:
    parts = []
    for k, v in record_fields(rec):
        if isinstance(v, (bool, np.bool_)):
            parts.append(f"{k}={'true' if v else 'false'}")
        else:
            parts.append(f"{k}={analysis.fmt_float(v)}")
    return " ".join(parts)


def render_table(rec) -> str:
    labels = dict(theta2_ab="theta2_AB", theta2_ac="theta2_AC", f_ab="F_AB", f_ac="F_AC",
                  f_max="F_max", theta3="theta3", f_csr="F_CSR", m_ab="M_AB", m_ac="M_AC",
                  s_max="S_max", thm1_slack="thm1 slack", thm2_slack="thm2 slack")
    rows = [(labels.get(k, k), fmt(v)) for k, v in record_fields(rec)]
    axis = " ".join(fmt(c) for c in rec.fidelity.best_axis)
    rows.append(("assistant axis", axis))
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)


# ---------------------------------------------------------------------------
# verbs


def cmd_analyze(args, out):
    psi, params = states.read_state_file(args.statefile)
    rec = analysis.analyze(psi, params)
    out.write((render_kv(rec) if args.json else render_table(rec)) + "\n")
    return EXIT_OK


def cmd_sweep(args, out):
    table = analysis.sweep_table(args.n, args.seed, args.phase, args.workers)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        analysis.write_csv(table, fh)
    out.write(f"wrote {len(table)} rows to {args.out}\n")
    return EXIT_OK


GNUPLOT = """\
# run from the directory holding the data files
set datafile separator ','
set key top left
set xlabel '{xlabel}'
set ylabel 'F_CSR'
set xrange [{xmin}:{xmax}]
set yrange [0.5:1.02]
set object 1 rect from graph 0, first 2.0/3 to graph 1, graph 1 fc rgb '#f4f4f4' behind
plot '{data}' using 2:(strcol(6) eq 'sample' ? $3 : 1/0) with points pt 7 ps 0.2 lc rgb '#4060c0' title 'random states', \\
     '{boundary}' using 1:2 with lines lw 2 lc rgb 'red' title 'maximal reconstruction', \\
     '{data}' using 2:(strcol(6) eq 'ghz' ? $3 : 1/0) with points pt 7 ps 1.6 lc rgb '#20a020' title 'GHZ'
"""


def cmd_figure(args, out):
    kind = args.kind.replace("-", "_")
    fig = analysis.figure_data(kind, args.n, args.seed, args.phase, args.workers)
    data, boundary, script = (args.out + ext for ext in (".csv", ".boundary.csv", ".gp"))
    with open(data, "w", encoding="utf-8", newline="") as fh:
        analysis.write_figure_csv(fig, fh)
    with open(boundary, "w", encoding="utf-8", newline="") as fh:
        analysis.write_boundary_csv(fig, fh)
    xlabel, (xmin, xmax) = (("max teleportation fidelity", (0.5, 1.0)) if kind == "rf_vs_tf"
                            else ("max CHSH value", (0.0, 2.0 * math.sqrt(2.0))))
    with open(script, "w", encoding="utf-8", newline="") as fh:
        fh.write(GNUPLOT.format(xlabel=xlabel, xmin=xmin, xmax=xmax,
                                data=os.path.basename(data),
                                boundary=os.path.basename(boundary)))
    out.write(f"wrote {data}, {boundary}, {script}\n")
    return EXIT_OK


def cmd_verify(args, out):
    table = analysis.sweep_table(args.n, args.seed, args.phase, args.workers)
    rep = analysis.theorem_report(table, args.tol)
    counts = rep.violation_counts()
    out.write(f"samples: {rep.samples}\n")
    for name in analysis.THEOREMS:
        ms = rep.min_slack[name]
        out.write(f"{name}: premise hits: {rep.premise_hits[name]}, "
                  f"min slack: {fmt(ms) if math.isfinite(ms) else 'n/a'}, "
                  f"violations: {counts[name]}\n")
    if rep.ok:
        return EXIT_OK
    out.write("counterexamples:\n")
    for name, idx, rec in rep.violations:
        out.write(f"{name} idx={idx} {render_kv(rec)}\n")
    return EXIT_FAIL


def msr_rows(k: int):
    thetas = np.linspace(0.0, math.pi / 2, k) if k > 1 else np.array([0.0])
    for th in thetas:
        psi = states.from_msr(float(th))
        rec = analysis.analyze(psi)
        c2, c3 = fidelity.msr_closed_forms(float(th))
        m = max(rec.bell.m_ab, rec.bell.m_ac)
        t2 = max(rec.fidelity.theta2_ab, rec.fidelity.theta2_ac)
        yield dict(theta_deg=math.degrees(th), theta2=t2, theta3=rec.fidelity.theta3,
                   f_max=rec.fidelity.f_max, f_csr=rec.fidelity.f_csr, s_max=rec.bell.s_max,
                   d_theta2=abs(t2 - c2), d_theta3=abs(rec.fidelity.theta3 - c3),
                   d_m=abs(m - math.cos(th) ** 2))


def cmd_msr(args, out):
    cols = ("theta_deg", "theta2", "theta3", "f_max", "f_csr", "s_max",
            "d_theta2", "d_theta3", "d_m")
    out.write(" ".join(f"{c:>16}" for c in cols) + "\n")
    worst = 0.0
    for row in msr_rows(args.grid):
        worst = max(worst, row["d_theta2"], row["d_theta3"], row["d_m"])
        cells = [fmt(row[c]) if not c.startswith("d_") else f"{row[c]:.3e}" for c in cols]
        out.write(" ".join(f"{c:>16}" for c in cells) + "\n")
    out.write(f"max delta: {worst:.3e}\n")
    return EXIT_OK if worst <= MSR_DELTA_TOL else EXIT_FAIL


def cmd_oracle(args, out):
    psi, _ = states.read_state_file(args.statefile)
    ok = True
    if args.kind == "teleport":
        cfg = oracle.McConfig(args.mc, args.seed)
        for ch in (states.AB, states.AC):
            rho2 = states.reduced_pair(psi, ch)
            formula = fidelity.tele_fidelity(rho2)
            mean, se = oracle.mc_teleport_fidelity(rho2, cfg)
            tol = max(3.0 * se, TELEPORT_ABS_TOL)
            agree = abs(mean - formula) <= tol
            ok &= agree
            out.write(f"{ch.label}: formula {fmt(formula)} monte-carlo {fmt(mean)} "
                      f"stderr {se:.3e} tol {tol:.3e} {'agree' if agree else 'DISAGREE'}\n")
    else:
        formula = fidelity.csr_fidelity(psi)
        best, axis = oracle.csr_oracle_max(psi)
        agree = abs(best - formula) <= CSR_ORACLE_TOL
        ok &= agree
        out.write(f"formula {fmt(formula)} conditioned {fmt(best)} "
                  f"axis {' '.join(fmt(c) for c in axis)} {'agree' if agree else 'DISAGREE'}\n")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = dict(analyze=cmd_analyze, sweep=cmd_sweep, figure=cmd_figure,
                verify=cmd_verify, msr=cmd_msr, oracle=cmd_oracle)


def run(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "workers", 1) is None:
            args.workers = _workers_default()
        return COMMANDS[args.verb](args, out)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_INPUT
    except (states.StateFileError, states.ParameterError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except ConvergenceError as exc:
        err.write(f"numerical failure: {exc}\n")
        return EXIT_FAIL


def main() -> None:
    sys.exit(run())
