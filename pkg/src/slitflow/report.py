"""Tables, verdicts and plots for the report bundle.

Everything here is deterministic: rows are built from exact data, JSON is
dumped with sorted keys, and SVGs carry no timestamp and a fixed hash salt.
"""
from __future__ import annotations

import csv
import io
import json
import platform
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import resources
from math import log
from pathlib import Path

from . import __version__, cfrac
from .cfrac import DEFAULT, ContinuedFraction
from .dynamics import (
    SkewState,
    build_skew,
    control_trace,
    iterate,
    oscillation_stats,
)
from .flatsurf import make_surface
from .interval import RationalInterval
from .witness import (
    DISCLAIMER,
    StageConfig,
    StageRecord,
    Verdict,
    check_filling,
    check_gap_growth,
    check_slit_decay,
    check_thickness,
    curve_graph_diagnostics,
    run_stages,
)

SCHEMA_VERSION = "1.0"

STAGES_HEADER = (
    "k,n_k,q,t_lo,t_hi,gap_lo,gap_hi,systole_lo,systole_hi,zeta_h_lo,zeta_h_hi,"
    "zeta_v_lo,zeta_v_hi,zeta_len_lo,zeta_len_hi,len_times_a_lo,len_times_a_hi,"
    "hyp_upper_lo,hyp_upper_hi,gapmax_lo,gapmax_hi,filling,i_minus3,i_plus3"
).split(",")
CONVERGENTS_HEADER = ["k", "a_k", "p_k", "q_k"]
ASSUMPTIONS_HEADER = [
    "k", "a_2k+2", "partial_sum", "partial_sum_lo", "partial_sum_hi",
    "a_2k+1", "r_k_lo", "r_k_hi", "r_k_k4_lo", "r_k_k4_hi",
]
BIRKHOFF_HEADER = ["N", "count", "A_N", "flips", "control_count", "control_A_N"]
SIG = 17


@dataclass
class RunConfig:
    sequence: str = "squares"
    k_from: int = 1
    k_to: int = 10
    c: Fraction = Fraction(0)
    tol: Fraction = Fraction(1, 10**12)
    n: int = 10**6
    start: Fraction = Fraction(1, 3)
    checkpoints: str = "auto"
    out: Path = Path("slitflow-out")
    cache: Path | None = None
    constants: Path | None = None
    disclaimer: str = DISCLAIMER
    workers: int = 1
    max_k: int = 10  # convergents / assumptions tables

    def validate(self) -> None:
        if self.sequence != "squares":
            raise ValueError(f"unknown sequence rule {self.sequence!r}")
        if not -1 < self.c < 1:
            raise ValueError("c must lie in (-1, 1)")
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if self.k_from < 1 or self.k_from > self.k_to:
            raise ValueError(f"bad stage range {self.k_from}..{self.k_to}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 <= self.start < 1:
            raise ValueError("start must lie in [0, 1)")
        if self.max_k < 1:
            raise ValueError("max_k must be >= 1")
        if self.checkpoints not in ("auto",):
            raise ValueError("checkpoint schedule must be 'auto'")

    def stage_config(self, c: Fraction | None = None, intersections: bool = True) -> StageConfig:
        return StageConfig(c=self.c if c is None else c, precision_k=max(self.k_to, 10),
                           sequence=self.sequence, intersections=intersections)

    def public(self) -> dict:
        d = asdict(self)
        for k in ("out", "cache"):
            d.pop(k)  # location-dependent, excluded so bundles compare byte-for-byte
        d["constants"] = None if self.constants is None else Path(self.constants).name
        return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in d.items()}


def jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, RationalInterval):
        return [str(x.lo), str(x.hi)]
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, Path):
        return str(x)
    return x


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _iv(x: RationalInterval | None) -> list[str]:
    return ["", ""] if x is None else list(x.sci(SIG))


def _opt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    return str(x)


# -- tables -------------------------------------------------------------------

def convergent_rows(max_k: int, cf: ContinuedFraction = DEFAULT) -> list[list]:
    return [[k, cf.coefficient(k), *cf.pq(k)] for k in range(1, max_k + 1)]


def stage_rows(records: list[StageRecord]) -> list[list]:
    rows = []
    for r in records:
        rows.append([
            r.k, r.n_k, r.q, *_iv(r.t), *_iv(r.gap), *_iv(r.systole), *_iv(r.zeta_h),
            *_iv(r.zeta_v), *_iv(r.zeta_len), *_iv(r.len_times_a), *_iv(r.hyp_upper),
            *_iv(r.gapmax), _opt(r.filling), _opt(r.i_minus3), _opt(r.i_plus3),
        ])
    return rows


def assumption_rows(max_k: int, cf: ContinuedFraction = DEFAULT) -> list[list]:
    rep = cf.check_assumptions(max(max_k, 2))
    rows = []
    for k in range(1, max_k + 1):
        s = rep.a_partial_sums[k - 1]
        rows.append([
            k, cf.coefficient(2 * k + 2), str(s), *RationalInterval.point(s).sci(SIG),
            cf.coefficient(2 * k + 1), *_iv(rep.c_ratios[k - 1]), *_iv(rep.c_scaled[k - 1]),
        ])
    return rows


def birkhoff_rows(trace, control=None) -> list[list]:
    rows = []
    for i, (n, c) in enumerate(zip(trace.checkpoints, trace.counts)):
        a = RationalInterval.point(Fraction(c, n)).sci(SIG)[0]
        row = [n, c, a, trace.flip_counts[i] if trace.flip_counts else ""]
        if control is not None:
            cc = control.counts[i]
            row += [cc, RationalInterval.point(Fraction(cc, n)).sci(SIG)[0]]
        else:
            row += ["", ""]
        rows.append(row)
    return rows


# -- verdicts -----------------------------------------------------------------

def _bottom_up(coeffs: list[int]) -> Fraction:
    x = Fraction(0)
    for a in reversed(coeffs):
        x = 1 / (a + x)
    return x


def verdict_convergents(cf: ContinuedFraction = DEFAULT) -> Verdict:
    expect = {3: (37, 46), 5: (14937, 18571)}
    match = all(cf.pq(k) == pq for k, pq in expect.items())
    oracle = all(
        Fraction(*cf.pq(k)) == _bottom_up([cf.coefficient(i) for i in range(1, k + 1)])
        for k in (3, 5, 12, 30)
    )
    det = all(
        cf.pq(k)[0] * cf.q(k - 1) - cf.pq(k - 1)[0] * cf.q(k) == (-1) ** (k + 1)
        for k in range(2, 51)
    )
    return Verdict("convergents", match and oracle and det,
                   {"p3_q3": cf.pq(3), "p5_q5": cf.pq(5), "bottom_up": oracle, "determinant": det})


def verdict_assumptions(constants: dict, cf: ContinuedFraction = DEFAULT) -> Verdict:
    rep = cf.check_assumptions(10)
    s10 = rep.a_partial_sums[9]
    s_ok = abs(s10 - Fraction(13951, 100000)) <= Fraction(1, 10**5)
    ck4 = max(v.hi for v in rep.c_scaled[2:10])
    c_ok = ck4 <= Fraction(str(constants["assumption_c_k4_bound"]))
    dec = rep.c_decreasing_from is not None and rep.c_decreasing_from <= 3
    ok = rep.a_ok and s_ok and c_ok and dec
    return Verdict("assumptions", ok, {
        "A_sum_K10": float(s10), "A_limit": float(rep.a_limit.hi), "A_increasing_bounded": rep.a_ok,
        "C_rk_k4_max": float(ck4), "C_bound": constants["assumption_c_k4_bound"],
        "C_decreasing_from": rep.c_decreasing_from,
    })


def verdict_b(tol: Fraction, cf: ContinuedFraction = DEFAULT) -> Verdict:
    b1 = cf.compute_b(tol)
    b2 = cf.compute_b(Fraction(1, 10**30))
    ok = b1.enclosure.width <= tol and b1.enclosure.intersects(b2.enclosure)
    return Verdict("b_value", ok, {
        "enclosure": list(b1.enclosure.sci(SIG)), "width": float(b1.enclosure.width),
        "truncation": b1.truncation_index, "intersects_1e-30": b1.enclosure.intersects(b2.enclosure),
    })


def verdict_dynamics(surface, n: int, start: Fraction, cf: ContinuedFraction = DEFAULT) -> tuple[Verdict, tuple]:
    system = build_skew(surface, n, cf)
    deeper = build_skew(surface, n, cf, depth=system.depth + 1)
    s0 = iterate(system, SkewState(start, 0), n, cf=cf)
    s1 = iterate(system, SkewState(start, 1), n, cf=cf)
    sd = iterate(deeper, SkewState(start, 0), n, cf=cf)
    empty = build_skew(RationalInterval.point(0), n, cf)
    se = iterate(empty, SkewState(start, 0), n, cf=cf)
    ctrl = control_trace(system, SkewState(start, 0), n, cf=cf)
    sym = all(a + b == m for a, b, m in zip(s0.counts, s1.counts, s0.checkpoints))
    robust = s0.counts == sd.counts and s0.flips == sd.flips
    zero = se.flips == 0 and all(c == m for c, m in zip(se.counts, se.checkpoints))
    dev = abs(Fraction(ctrl.counts[-1], n) - Fraction(1, 2))
    ok = sym and robust and zero and dev <= Fraction(1, 100)
    return Verdict("dynamics", ok, {
        "Q": system.Q, "depth": system.depth, "flips": s0.flips, "sheet_symmetry": sym,
        "precision_robust": robust, "zero_flip_decoupled": zero, "control_deviation": float(dev),
        "A_N": float(s0.averages[-1]),
    }), (s0, ctrl)


def verdict_oscillation(surface, constants: dict, cf: ContinuedFraction = DEFAULT) -> Verdict:
    osc = constants["oscillation"]
    n, start = int(osc["n"]), Fraction(osc["start"])
    system = build_skew(surface, n, cf)
    tr = iterate(system, SkewState(start, int(osc["sheet"])), n, cf=cf)
    ctrl = control_trace(system, SkewState(start, 0), n, cf=cf)
    st = oscillation_stats(tr, control=ctrl, cf=cf)
    ref = Fraction(osc["amplitude"])
    rel = abs(st.amplitude - ref) / ref
    ok = rel <= Fraction(str(osc["rel_tol"])) and st.ratio >= float(osc["control_ratio_min"])
    return Verdict("oscillation", ok, {
        "n": n, "amplitude": float(st.amplitude), "reference": float(ref), "rel_diff": float(rel),
        "control_amplitude": float(st.control_amplitude), "ratio": st.ratio,
        "ratio_min": osc["control_ratio_min"],
    })


def stage_verdicts(records: list[StageRecord], constants: dict, notices: list[str],
                   suffix: str = "") -> list[Verdict]:
    out = []
    if len(records) >= 2:
        out.append(check_gap_growth(records, c_bound=constants["gap_growth_C_bound"]))
    else:
        notices.append(f"gap_growth{suffix}: fewer than 2 stages, skipped")
    out.append(check_thickness(records, eps_floor=0.5))
    if len(records) >= 2:
        out.append(check_slit_decay(records, window=tuple(constants["length_product_window"])))
    else:
        notices.append(f"slit_decay{suffix}: fewer than 2 stages, skipped")
    if records[-1].k - records[0].k + 1 >= 7:
        out.append(check_filling(records, gap_k4_bound=constants["gap_k4_bound"]))
    else:
        notices.append(f"filling{suffix}: range spans fewer than 7 stages, skipped")
    for v in out:
        v.name += suffix
    return out


def verdict_c_family(config: RunConfig, constants: dict, notices: list[str],
                     cf: ContinuedFraction = DEFAULT) -> Verdict:
    base = make_surface(0, max(config.k_to, 10), cf)
    lo, hi = config.k_from, config.k_to
    ref = run_stages(lo, hi, config.stage_config(Fraction(0), False), cf, config.cache)
    details, ok = {}, True
    for c in (Fraction(1, 4), Fraction(1, 2)):
        plus = run_stages(lo, hi, config.stage_config(c, False), cf, config.cache)
        minus = run_stages(lo, hi, config.stage_config(-c, False), cf, config.cache)
        avg_b = (base.with_c(c).b_c + base.with_c(-c).b_c) / 2 == base.b_c
        avg_h = all((p.zeta_h + m.zeta_h) / 2 == r.zeta_h for p, m, r in zip(plus, minus, ref))
        sub = stage_verdicts(plus, constants, notices, f"[c={c}]")
        sub_ok = all(v.passed for v in sub)
        ok &= avg_b and avg_h and sub_ok
        details[str(c)] = {"b_average_exact": avg_b, "slit_h_average_exact": avg_h,
                           "checks": {v.name: v.passed for v in sub}}
    return Verdict("c_family", ok, details)


# -- plots --------------------------------------------------------------------

def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "slitflow"
    plt.rcParams["svg.fonttype"] = "none"
    return plt


def _save(fig, path: Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})


def write_plots(outdir: Path, records: list[StageRecord], trace, control, notices: list[str]) -> list[str]:
    plt = _pyplot()
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    ks = [r.k for r in records]
    if len(records) >= 2:
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.plot(ks, [float(r.gap) for r in records], "o-", label="t_{k+1} - t_k")
        ax.plot(ks, [4 * log(2 * k) for k in ks], "--", label="4 log(2k)")
        ax.set_xlabel("k")
        ax.legend()
        _save(fig, outdir / "gap.svg")
        plt.close(fig)
        written.append("gap.svg")
    else:
        notices.append("gap plot skipped: needs at least 2 stages")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(ks, [float(r.len_times_a) for r in records], "o-")
    ax.set_xlabel("k")
    ax.set_ylabel("|zeta_k| a_{2k+2}")
    _save(fig, outdir / "slit_products.svg")
    plt.close(fig)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(ks, [float(r.systole) for r in records], "o-")
    ax.set_xlabel("k")
    ax.set_ylabel("systole at t_k")
    _save(fig, outdir / "systoles.svg")
    plt.close(fig)
    written += ["slit_products.svg", "systoles.svg"]
    if trace is not None:
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.semilogx(trace.checkpoints, [float(a) for a in trace.averages], "o-", label="skew, sheet 0")
        if control is not None:
            ax.semilogx(control.checkpoints, [float(a) for a in control.averages], "s--", label="rotation, [0,1/2)")
        ax.set_xlabel("N")
        ax.set_ylabel("A_N")
        ax.legend()
        _save(fig, outdir / "birkhoff.svg")
        plt.close(fig)
        written.append("birkhoff.svg")
    return written


# -- bundle -------------------------------------------------------------------

def versions() -> dict:
    import mpmath
    import numpy

    return {"slitflow": __version__, "python": platform.python_version(),
            "numpy": numpy.__version__, "mpmath": mpmath.__version__}


def schema() -> dict:
    return json.loads(resources.files("slitflow").joinpath("summary.schema.json").read_text())


@dataclass
class Bundle:
    files: dict[str, str] = field(default_factory=dict)  # relative path -> text
    summary: dict = field(default_factory=dict)
    records: list = field(default_factory=list)
    trace: object = None
    control: object = None

    @property
    def passed(self) -> bool:
        return self.summary.get("passed", False)


def build_report(config: RunConfig, constants: dict, cf: ContinuedFraction = DEFAULT) -> Bundle:
    notices: list[str] = []
    records = run_stages(config.k_from, config.k_to, config.stage_config(), cf, config.cache, config.workers)
    surface = make_surface(config.c, max(config.k_to, 10), cf)
    dyn, (trace, control) = verdict_dynamics(surface, config.n, config.start, cf)
    verdicts = [verdict_convergents(cf), verdict_assumptions(constants, cf), verdict_b(config.tol, cf)]
    verdicts += stage_verdicts(records, constants, notices)
    verdicts += [dyn, verdict_oscillation(make_surface(0, 10, cf), constants, cf)]
    verdicts.append(verdict_c_family(config, constants, notices, cf))
    failing = [v.name for v in verdicts if not v.passed]
    summary = {
        "schema_version": SCHEMA_VERSION,
        "versions": versions(),
        "config": config.public(),
        "constants": constants,
        "verdicts": [{"name": v.name, "passed": bool(v.passed), "details": jsonable(v.details)} for v in verdicts],
        "failing": failing,
        "passed": not failing,
        "notices": notices,
        "diagnostics": {"curve_graph": curve_graph_diagnostics(records, config.disclaimer)},
    }
    files = {
        "stages.csv": csv_text(STAGES_HEADER, stage_rows(records)),
        "assumptions.csv": csv_text(ASSUMPTIONS_HEADER, assumption_rows(config.max_k, cf)),
        "birkhoff.csv": csv_text(BIRKHOFF_HEADER, birkhoff_rows(trace, control)),
    }
    b = Bundle(files, summary, records, trace, control)
    return b


def write_bundle(bundle: Bundle, outdir: Path) -> None:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    notices = bundle.summary["notices"]
    write_plots(outdir / "plots", bundle.records, bundle.trace, bundle.control, notices)
    for name, text in bundle.files.items():
        (outdir / name).write_text(text)
    (outdir / "summary.json").write_text(dumps(bundle.summary))
