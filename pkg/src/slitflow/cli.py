"""Command-line front end.

Exit codes: 0 success, 1 verdict failure, 2 usage, 3 precision, 4 resource
(including unwritable output).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields
from fractions import Fraction
from pathlib import Path

from . import cfrac
from .constants import load_constants
from .dynamics import BoundaryAmbiguityError, SkewState, build_skew, control_trace, iterate
from .flatsurf import ResourceError, make_surface, stage_time
from .interval import PrecisionError, RationalInterval
from .report import (
    ASSUMPTIONS_HEADER,
    BIRKHOFF_HEADER,
    CONVERGENTS_HEADER,
    SIG,
    STAGES_HEADER,
    RunConfig,
    assumption_rows,
    birkhoff_rows,
    build_report,
    convergent_rows,
    csv_text,
    stage_rows,
    write_bundle,
)
from .witness import run_stages

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PRECISION, EXIT_RESOURCE = 0, 1, 2, 3, 4

# config-file key -> RunConfig field
KEYS = {
    "sequence": "sequence", "from": "k_from", "to": "k_to", "c": "c", "tol": "tol", "n": "n",
    "start": "start", "checkpoints": "checkpoints", "out": "out", "cache": "cache",
    "constants": "constants", "disclaimer": "disclaimer", "workers": "workers", "max_k": "max_k",
}


class UsageError(Exception):
    pass


def _convert(name: str, raw: str):
    kinds = {f.name: f.type for f in fields(RunConfig)}
    kind = kinds[name]
    try:
        if kind in ("int",):
            return int(raw)
        if kind == "Fraction":
            return Fraction(raw)
        if kind.startswith("Path"):
            return Path(raw) if raw not in ("", "none") else None
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"bad value for {name}: {raw!r}") from e
    return raw


def parse_config_file(path: Path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read config {path}: {e}") from e
    for i, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{i}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise UsageError(f"{path}:{i}: unknown key {key!r}")
        out[KEYS[key]] = _convert(KEYS[key], val)
    return out


def make_config(args) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(parse_config_file(args.config))
    flag_map = {"k_from": "k_from", "k_to": "k_to", "c": "c", "tol": "tol", "n": "n",
                "start": "start", "out": "out", "max_k": "max_k", "workers": "workers"}
    for attr, name in flag_map.items():
        v = getattr(args, attr, None)
        if v is not None:
            values[name] = _convert(name, str(v))
    if "cache" not in values:
        env = os.environ.get("SLITFLOW_CACHE")
        values["cache"] = Path(env) if env else Path.home() / ".cache" / "slitflow"
    if getattr(args, "no_cache", False):
        values["cache"] = None
    cfg = RunConfig(**values)
    try:
        cfg.validate()
    except ValueError as e:
        raise UsageError(str(e)) from e
    return cfg


def _constants(cfg: RunConfig) -> dict:
    try:
        return load_constants(cfg.constants)
    except (OSError, ValueError) as e:
        raise UsageError(f"constants file: {e}") from e


def emit(args, name: str, header, rows) -> None:
    fmt = args.format
    if fmt == "json":
        text = json.dumps([dict(zip(header, map(_jsonval, r))) for r in rows], indent=2) + "\n"
    else:
        text = csv_text(header, rows)
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{name}.{fmt}").write_text(text)


def _jsonval(v):
    if isinstance(v, int) and abs(v) >= 2**53:
        return str(v)  # exact integers beyond double range stay strings
    return v


# -- subcommands --------------------------------------------------------------

def cmd_convergents(args) -> int:
    if args.max_k is None or args.max_k < 1:
        raise UsageError("--max-k must be >= 1")
    emit(args, "convergents", CONVERGENTS_HEADER, convergent_rows(args.max_k))
    return EXIT_OK


def cmd_assumptions(args) -> int:
    cfg = make_config(args)
    emit(args, "assumptions", ASSUMPTIONS_HEADER, assumption_rows(cfg.max_k))
    return EXIT_OK


def cmd_b(args) -> int:
    cfg = make_config(args)
    b = cfrac.compute_b(cfg.tol)
    bc = b.enclosure * (1 + cfg.c)
    rows = [[str(cfg.c), b.truncation_index, *b.enclosure.sci(SIG), *bc.sci(SIG)]]
    emit(args, "b", ["c", "truncation", "b_lo", "b_hi", "b_c_lo", "b_c_hi"], rows)
    return EXIT_OK


def cmd_stages(args) -> int:
    cfg = make_config(args)
    recs = run_stages(cfg.k_from, cfg.k_to, cfg.stage_config(), cache_dir=cfg.cache, workers=cfg.workers)
    emit(args, "stages", STAGES_HEADER, stage_rows(recs))
    return EXIT_OK


def cmd_systole(args) -> int:
    cfg = make_config(args)
    s = make_surface(cfg.c, max(cfg.k_to, 10))
    rows = []
    for k in range(cfg.k_from, cfg.k_to + 1):
        rep = s.systole(stage_time(k))
        rows.append([k, *rep.plus.sci(SIG), *rep.minus.sci(SIG), *rep.branch_loop.sci(SIG)])
    header = ["k", "plus_lo", "plus_hi", "minus_lo", "minus_hi", "branch_loop_lo", "branch_loop_hi"]
    emit(args, "systole", header, rows)
    return EXIT_OK


def cmd_slits(args) -> int:
    cfg = make_config(args)
    s = make_surface(cfg.c, max(cfg.k_to, 10))
    rows = []
    for k in range(cfg.k_from, cfg.k_to + 1):
        z = s.slit_curve(k)
        M, N = z.connection.lattice_part
        rows.append([k, M, N, *z.horizontal.sci(SIG), *z.vertical.sci(SIG), *z.length.sci(SIG),
                     *z.length_times_a.sci(SIG)])
    header = ["k", "M", "N", "h_lo", "h_hi", "v_lo", "v_hi", "len_lo", "len_hi", "len_times_a_lo", "len_times_a_hi"]
    emit(args, "slits", header, rows)
    return EXIT_OK


def cmd_birkhoff(args) -> int:
    cfg = make_config(args)
    surface = make_surface(cfg.c, 10)
    flip = RationalInterval.point(0) if args.empty_flip else surface
    system = build_skew(flip, cfg.n)
    start = SkewState(cfg.start, args.sheet)
    trace = iterate(system, start, cfg.n)
    control = control_trace(system, SkewState(cfg.start, 0), cfg.n) if args.control else None
    emit(args, "birkhoff", BIRKHOFF_HEADER, birkhoff_rows(trace, control))
    if args.out is not None:
        _birkhoff_plot(args.out, trace, control)
    return EXIT_OK


def _birkhoff_plot(out, trace, control) -> None:
    from .report import _pyplot, _save

    plt = _pyplot()
    d = Path(out) / "plots"
    d.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.semilogx(trace.checkpoints, [float(a) for a in trace.averages], "o-", label="skew, sheet 0")
    if control is not None:
        ax.semilogx(control.checkpoints, [float(a) for a in control.averages], "s--", label="rotation, [0,1/2)")
    ax.set_xlabel("N")
    ax.set_ylabel("A_N")
    ax.legend()
    _save(fig, d / "birkhoff.svg")
    plt.close(fig)


def cmd_report(args) -> int:
    cfg = make_config(args)
    constants = _constants(cfg)
    bundle = build_report(cfg, constants)
    write_bundle(bundle, cfg.out)
    for v in bundle.summary["verdicts"]:
        print(f"{'PASS' if v['passed'] else 'FAIL'} {v['name']}")
    for note in bundle.summary["notices"]:
        print(f"note: {note}")
    print(f"bundle written to {cfg.out}")
    return EXIT_OK if bundle.passed else EXIT_FAIL


# -- parser -------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="slitflow", description="Certified computations for a slit double torus.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, stages=False, output=True):
        sp.add_argument("--config", type=Path, help="flat key = value config file")
        sp.add_argument("--c", help="slit parameter in (-1, 1), e.g. 1/4")
        sp.add_argument("--tol", help="tolerance for b, e.g. 1e-12")
        sp.add_argument("--no-cache", action="store_true")
        sp.add_argument("--workers", type=int)
        if stages:
            sp.add_argument("--from", dest="k_from", type=int)
            sp.add_argument("--to", dest="k_to", type=int)
        if output:
            sp.add_argument("--format", choices=("csv", "json"), default="csv")
            sp.add_argument("--out", help="output directory (default: stdout)")

    sp = sub.add_parser("convergents", help="rows k, a_k, p_k, q_k")
    sp.add_argument("--max-k", type=int, required=True)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_convergents)

    sp = sub.add_parser("assumptions", help="growth conditions on the coefficients")
    common(sp)
    sp.add_argument("--max-k", type=int)
    sp.set_defaults(func=cmd_assumptions)

    sp = sub.add_parser("b", help="enclosure of the slit length")
    common(sp)
    sp.set_defaults(func=cmd_b)

    for name, fn, text in (("stages", cmd_stages, "per-stage records"),
                           ("systole", cmd_systole, "systoles at stage times"),
                           ("slits", cmd_slits, "slit curves")):
        sp = sub.add_parser(name, help=text)
        common(sp, stages=True)
        sp.add_argument("--max-k", dest="k_to", type=int, help="alias for --to")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("birkhoff", help="skew-product running averages")
    common(sp)
    sp.add_argument("--n", type=int)
    sp.add_argument("--start", help="start position in [0, 1), e.g. 1/3")
    sp.add_argument("--sheet", type=int, choices=(0, 1), default=0)
    sp.add_argument("--control", action="store_true", help="add the rotation control columns")
    sp.add_argument("--empty-flip", action="store_true", help="use an empty flip interval")
    sp.set_defaults(func=cmd_birkhoff)

    sp = sub.add_parser("report", help="full bundle with verdicts")
    sp.add_argument("--config", type=Path)
    sp.add_argument("--from", dest="k_from", type=int)
    sp.add_argument("--to", dest="k_to", type=int)
    sp.add_argument("--max-k", dest="k_to", type=int)
    sp.add_argument("--c")
    sp.add_argument("--tol")
    sp.add_argument("--n", type=int)
    sp.add_argument("--start")
    sp.add_argument("--out")
    sp.add_argument("--no-cache", action="store_true")
    sp.add_argument("--workers", type=int)
    sp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BoundaryAmbiguityError as e:
        print(f"precision error at step {e.step}: {e}", file=sys.stderr)
        return EXIT_PRECISION
    except PrecisionError as e:
        print(f"precision error: {e}", file=sys.stderr)
        return EXIT_PRECISION
    except (ResourceError, MemoryError) as e:
        print(f"resource error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
