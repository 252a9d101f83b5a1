"""Classification, theorem checks, seeded sweeps and figure datasets."""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import qmath
from .bell import BellSummary, m_from_correlation, s_from_m
from .correlations import pure_pauli_tables
from .fidelity import (FidelitySummary, TIE_TOL, fidelity_from_theta2,
                       fidelity_from_theta3, maximize_axis)
from .states import AcinParams, check_state, from_acin, ghz, sample_acin, stream_seed

CLASS_TOL = 1e-9
VIOL_TOL = 1e-6
MSR_TOL = 1e-6
BELL_TOL = 1e-9
BLOCK = 1000
TWO_THIRDS = 2.0 / 3.0

THEOREMS = ("thm1", "thm2", "exclusivity")

CSV_COLUMNS = ("idx", "l0", "l1", "l2", "l3", "l4", "phi", "theta2_ab", "theta2_ac",
               "f_ab", "f_ac", "f_max", "theta3", "f_csr", "m_ab", "m_ac", "s_max",
               "secret_shareable", "msr_boundary", "thm1_slack", "thm2_slack")


@dataclass(frozen=True)
class AnalysisRecord:
    params: AcinParams | None
    fidelity: FidelitySummary
    bell: BellSummary
    flags: dict
    slacks: dict  # thm1 / thm2, None where the premise fails


# ---------------------------------------------------------------------------
# batched core


def _analyze_tables(tables: np.ndarray) -> dict:
    """All scalar quantities for a stack of (N, 4, 4, 4) Pauli tables."""
    Q = tables[:, 1:, 1:, 0]
    R = tables[:, 1:, 0, 1:]
    tau = tables[:, 1:, 1:, 1:]
    t2_ab = np.atleast_1d(qmath.trace_norm(Q))
    t2_ac = np.atleast_1d(qmath.trace_norm(R))
    t3, axes = maximize_axis(R, tau)
    t3 = np.atleast_1d(t3)
    axes = np.atleast_2d(axes)
    m_ab = np.atleast_1d(m_from_correlation(Q))
    m_ac = np.atleast_1d(m_from_correlation(R))
    cols = dict(theta2_ab=t2_ab, theta2_ac=t2_ac, theta3=t3, best_axis=axes,
                m_ab=m_ab, m_ac=m_ac)
    cols.update(_derived(cols))
    return cols


def _derived(c: dict) -> dict:
    f_ab = fidelity_from_theta2(c["theta2_ab"])
    f_ac = fidelity_from_theta2(c["theta2_ac"])
    f_max = np.maximum(f_ab, f_ac)
    f_csr = fidelity_from_theta3(c["theta3"])
    s_ab, s_ac = s_from_m(c["m_ab"]), s_from_m(c["m_ac"])
    s_max = np.maximum(s_ab, s_ac)
    t2max = np.maximum(c["theta2_ab"], c["theta2_ac"])
    m_max = np.maximum(c["m_ab"], c["m_ac"])
    ss = ((f_ab <= TWO_THIRDS + CLASS_TOL) & (f_ac <= TWO_THIRDS + CLASS_TOL)
          & (f_csr > TWO_THIRDS + CLASS_TOL))
    thm1 = 1.0 + 2.0 * t2max - c["theta3"]
    thm2 = 2.0 * np.sqrt(np.maximum(m_max, 0.0)) + 1.0 - c["theta3"]
    thm2_premise = (f_max <= TWO_THIRDS + CLASS_TOL) & (f_csr >= TWO_THIRDS - CLASS_TOL)
    return dict(
        f_ab=f_ab, f_ac=f_ac, f_max=f_max, f_csr=f_csr, s_ab=s_ab, s_ac=s_ac,
        s_max=s_max, secret_shareable=ss,
        msr_boundary=ss & (np.abs(thm1) <= MSR_TOL),
        tie_ab_ac=np.abs(c["theta2_ab"] - c["theta2_ac"]) <= TIE_TOL,
        thm1_slack=np.where(ss, thm1, np.nan),
        thm2_slack=np.where(thm2_premise, thm2, np.nan),
        excl_slack=np.where(ss, 2.0 - s_max, np.nan),
    )


def _record_from_columns(c: dict, i: int, params: AcinParams | None) -> AnalysisRecord:
    fid = FidelitySummary(
        theta2_ab=float(c["theta2_ab"][i]), theta2_ac=float(c["theta2_ac"][i]),
        f_ab=float(c["f_ab"][i]), f_ac=float(c["f_ac"][i]), f_max=float(c["f_max"][i]),
        theta3=float(c["theta3"][i]), f_csr=float(c["f_csr"][i]),
        best_axis=np.array(c["best_axis"][i]), tie_ab_ac=bool(c["tie_ab_ac"][i]))
    bell = BellSummary(m_ab=float(c["m_ab"][i]), m_ac=float(c["m_ac"][i]),
                       s_ab=float(c["s_ab"][i]), s_ac=float(c["s_ac"][i]),
                       s_max=float(c["s_max"][i]))
    flags = dict(secret_shareable=bool(c["secret_shareable"][i]),
                 msr_boundary=bool(c["msr_boundary"][i]),
                 tie_ab_ac=bool(c["tie_ab_ac"][i]))

    def opt(x):
        return None if np.isnan(x) else float(x)

    slacks = dict(thm1=opt(c["thm1_slack"][i]), thm2=opt(c["thm2_slack"][i]))
    return AnalysisRecord(params, fid, bell, flags, slacks)


def analyze(psi, params: AcinParams | None = None) -> AnalysisRecord:
    """Full record for one pure three-qubit state."""
    psi = check_state(psi)
    cols = _analyze_tables(pure_pauli_tables(psi)[None])
    return _record_from_columns(cols, 0, params)


def analyze_batch(psis) -> dict:
    """Column arrays for a stack of (N, 8) pure states."""
    psis = np.asarray(psis, dtype=complex).reshape(-1, 8)
    return _analyze_tables(pure_pauli_tables(psis))


# ---------------------------------------------------------------------------
# theorem checks on single records


def check_theorem1(record: AnalysisRecord) -> float | None:
    """1 + 2 theta2_max - theta3, or None when the state is not secret-shareable."""
    return record.slacks["thm1"]


def check_theorem2(record: AnalysisRecord) -> float | None:
    """2 sqrt(M_max) + 1 - theta3, or None outside the premise region."""
    return record.slacks["thm2"]


def check_mutual_exclusivity(record: AnalysisRecord) -> bool:
    """False only for a secret-shareable state that violates CHSH."""
    return not (record.flags["secret_shareable"] and record.bell.s_max > 2.0 + BELL_TOL)


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepTable:
    """Column store for a sweep; row ``k`` is sample ``idx[k]``."""

    idx: np.ndarray
    lambdas: np.ndarray  # (N, 5)
    phi: np.ndarray
    cols: dict

    def __len__(self) -> int:
        return len(self.idx)

    def params(self, k: int) -> AcinParams:
        return AcinParams.from_lambdas(self.lambdas[k], self.phi[k])

    def record(self, k: int) -> AnalysisRecord:
        return _record_from_columns(self.cols, k, self.params(k))

    def records(self):
        for k in range(len(self)):
            yield self.record(k)

    def __getitem__(self, name: str) -> np.ndarray:
        return self.cols[name]


@dataclass
class TheoremReport:
    samples: int = 0
    premise_hits: dict = field(default_factory=lambda: dict.fromkeys(THEOREMS, 0))
    min_slack: dict = field(default_factory=lambda: dict.fromkeys(THEOREMS, math.inf))
    violations: list = field(default_factory=list)  # (theorem, idx, record)

    @property
    def ok(self) -> bool:
        return not self.violations

    def violation_counts(self) -> dict:
        counts = dict.fromkeys(THEOREMS, 0)
        for name, _, _ in self.violations:
            counts[name] += 1
        return counts


def _sample_block(start: int, stop: int, seed: int, include_phase: bool):
    params = [sample_acin(stream_seed(seed, i), include_phase) for i in range(start, stop)]
    lam = np.array([p.lambdas for p in params])
    phi = np.array([p.phi for p in params])
    psis = np.array([from_acin(p) for p in params])
    return lam, phi, psis


def _run_block(args):
    start, stop, seed, include_phase = args
    lam, phi, psis = _sample_block(start, stop, seed, include_phase)
    cols = analyze_batch(psis)
    return lam, phi, cols


def _blocks(n: int, seed: int, include_phase: bool):
    return [(s, min(s + BLOCK, n), seed, include_phase) for s in range(0, n, BLOCK)]


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("QSS_WORKERS", "1")))
    except ValueError:
        return 1


def sweep_table(n: int, seed: int, include_phase: bool = False,
                workers: int | None = None) -> SweepTable:
    """Analyse ``n`` seeded random canonical states.

    Sample ``i`` is drawn from its own seed stream, and blocks are merged in
    index order, so the result does not depend on ``workers``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    workers = default_workers() if workers is None else max(1, int(workers))
    jobs = _blocks(n, seed, include_phase)
    if workers == 1 or len(jobs) == 1:
        parts = [_run_block(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_block, jobs))
    lam = np.concatenate([p[0] for p in parts])
    phi = np.concatenate([p[1] for p in parts])
    cols = {k: np.concatenate([p[2][k] for p in parts]) for k in parts[0][2]}
    return SweepTable(np.arange(n), lam, phi, cols)


def theorem_report(table: SweepTable, tol: float = VIOL_TOL) -> TheoremReport:
    """Premise counts, minimum slacks and violations (slack below ``-tol``)."""
    rep = TheoremReport(samples=len(table))
    slack_cols = dict(thm1="thm1_slack", thm2="thm2_slack", exclusivity="excl_slack")
    bad_rows = {}
    for name, col in slack_cols.items():
        s = table[col]
        hit = ~np.isnan(s)
        rep.premise_hits[name] = int(hit.sum())
        if hit.any():
            rep.min_slack[name] = float(np.min(s[hit]))
        for k in np.nonzero(hit & (s < -tol))[0]:
            bad_rows.setdefault(int(k), []).append(name)
    for k in sorted(bad_rows):
        rec = table.record(k)
        for name in bad_rows[k]:
            rep.violations.append((name, int(table.idx[k]), rec))
    return rep


def sweep(n: int, seed: int, include_phase: bool = False, workers: int | None = None):
    """Seeded sweep: returns (iterator of AnalysisRecord, TheoremReport)."""
    table = sweep_table(n, seed, include_phase, workers)
    return table.records(), theorem_report(table)


def msr_distance(lambdas) -> np.ndarray:
    """Euclidean distance of coefficient vectors to the maximal-reconstruction family.

    The family is (cos t, sin t, 0, 0, 1) / sqrt 2, so the nearest member only
    depends on the radius of the (l0, l1) pair.
    """
    lam = np.atleast_2d(np.asarray(lambdas, dtype=float))
    r = math.sqrt(0.5)
    d = np.sqrt(lam[:, 2] ** 2 + lam[:, 3] ** 2 + (lam[:, 4] - r) ** 2
                + (np.hypot(lam[:, 0], lam[:, 1]) - r) ** 2)
    return d if np.ndim(lambdas) > 1 else float(d[0])


def _near_msr_params(seed: int, index: int, scale: float, decades: float) -> AcinParams:
    rng = np.random.default_rng(stream_seed(seed, index))
    theta = rng.uniform(0.0, math.pi / 2)
    base = np.array([math.cos(theta), math.sin(theta), 0.0, 0.0, 1.0]) / math.sqrt(2.0)
    direction = rng.normal(size=5)
    direction /= np.linalg.norm(direction)
    radius = scale * 10.0 ** (-decades * rng.random())
    lam = np.abs(base + radius * direction)
    return AcinParams.from_lambdas(lam / np.linalg.norm(lam))


def sweep_near_msr(n: int, seed: int, scale: float = 0.1, decades: float = 4.0) -> SweepTable:
    """Real-slice states scattered around the maximal-reconstruction family.

    Perturbation radii are log-uniform over ``decades`` decades below ``scale``.
    """
    params = [_near_msr_params(seed, i, scale, decades) for i in range(n)]
    lam = np.array([p.lambdas for p in params])
    cols = analyze_batch(np.array([from_acin(p) for p in params]))
    return SweepTable(np.arange(n), lam, np.zeros(n), cols)


def boundary_approach(table: SweepTable, edges=(0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0)) -> list:
    """Minimum theorem-1 slack of secret-shareable samples binned by MSR distance.

    Returns rows ``(lo, hi, count, min_slack)``; empty bins have ``min_slack = nan``.
    """
    dist = msr_distance(table.lambdas)
    s = table["thm1_slack"]
    rows = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (dist >= lo) & (dist < hi) & ~np.isnan(s)
        rows.append((lo, hi, int(sel.sum()), float(np.min(s[sel])) if sel.any() else math.nan))
    return rows


# ---------------------------------------------------------------------------
# CSV


def fmt_float(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return "%.12g" % x


def _fmt_bool(b) -> str:
    return "true" if b else "false"


def write_csv(table: SweepTable, fh) -> None:
    fh.write(",".join(CSV_COLUMNS) + "\n")
    c = table.cols
    float_cols = ("theta2_ab", "theta2_ac", "f_ab", "f_ac", "f_max", "theta3", "f_csr",
                  "m_ab", "m_ac", "s_max")
    for k in range(len(table)):
        row = [str(int(table.idx[k]))]
        row += [fmt_float(v) for v in table.lambdas[k]]
        row.append(fmt_float(table.phi[k]))
        row += [fmt_float(c[name][k]) for name in float_cols]
        row += [_fmt_bool(c["secret_shareable"][k]), _fmt_bool(c["msr_boundary"][k])]
        row += [fmt_float(c["thm1_slack"][k]), fmt_float(c["thm2_slack"][k])]
        fh.write(",".join(row) + "\n")


def csv_text(table: SweepTable) -> str:
    buf = io.StringIO()
    write_csv(table, buf)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# figure datasets

FIGURE_KINDS = ("rf_vs_tf", "rf_vs_bell")
BOUNDARY_POINTS = 200


def boundary_curve(kind: str, points: int = BOUNDARY_POINTS) -> np.ndarray:
    """Analytic maximal-reconstruction curve as (points, 2) rows of (x, y)."""
    if kind == "rf_vs_tf":
        x = np.linspace(0.5, TWO_THIRDS, points)
        y = 2.0 * x - 1.0 / 3.0
    elif kind == "rf_vs_bell":
        x = np.linspace(0.0, 2.0, points)
        y = (x + 4.0) / 6.0
    else:
        raise ValueError(f"unknown figure kind {kind!r}; expected one of {FIGURE_KINDS}")
    return np.column_stack([x, y])


@dataclass
class FigureData:
    kind: str
    x_label: str
    columns: dict  # idx, x, y, secret_shareable, msr_boundary, marker
    boundary: np.ndarray


def figure_data(kind: str, n: int, seed: int, include_phase: bool = False,
                workers: int | None = None) -> FigureData:
    boundary = boundary_curve(kind)
    table = sweep_table(n, seed, include_phase, workers)
    xname = "f_max" if kind == "rf_vs_tf" else "s_max"
    g = analyze(ghz())
    gx = g.fidelity.f_max if kind == "rf_vs_tf" else g.bell.s_max
    cols = dict(
        idx=np.append(table.idx, -1),
        x=np.append(table[xname], gx),
        y=np.append(table["f_csr"], g.fidelity.f_csr),
        secret_shareable=np.append(table["secret_shareable"], g.flags["secret_shareable"]),
        msr_boundary=np.append(table["msr_boundary"], g.flags["msr_boundary"]),
        marker=np.array(["sample"] * len(table) + ["ghz"]),
    )
    return FigureData(kind, xname, cols, boundary)


def write_figure_csv(fig: FigureData, fh) -> None:
    c = fig.columns
    fh.write(f"idx,{fig.x_label},f_csr,secret_shareable,msr_boundary,marker\n")
    for k in range(len(c["x"])):
        fh.write(",".join([str(int(c["idx"][k])), fmt_float(c["x"][k]), fmt_float(c["y"][k]),
                           _fmt_bool(c["secret_shareable"][k]),
                           _fmt_bool(c["msr_boundary"][k]), str(c["marker"][k])]) + "\n")


def write_boundary_csv(fig: FigureData, fh) -> None:
    fh.write(f"{fig.x_label},f_csr\n")
    for x, y in fig.boundary:
        fh.write(f"{fmt_float(x)},{fmt_float(y)}\n")
