"""Per-stage records and the verdict checks built on them.

Records are computed once per ``(k, config)``; every check below is a pure
function of a list of records and never touches the geometry again.
"""
from __future__ import annotations

import hashlib
import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .cfrac import DEFAULT, ContinuedFraction
from .flatsurf import (
    NoCertificateError,
    SlitSurface,
    intersection_number,
    make_surface,
    stage_time,
)
from .interval import PrecisionError, RationalInterval

__all__ = [
    "StageRecord",
    "Verdict",
    "StageConfig",
    "run_stages",
    "check_gap_growth",
    "check_thickness",
    "check_slit_decay",
    "check_filling",
    "curve_graph_diagnostics",
    "RECORD_FIELDS",
    "DISCLAIMER",
    "clear_caches",
]

DISCLAIMER = (
    "diagnostic only - no lower bound computed; curve-graph distances and "
    "subsurface projections are out of scope"
)

# serialized field order
RECORD_FIELDS = (
    "k", "n_k", "q", "t", "gap", "systole_plus", "systole_minus", "zeta_h", "zeta_v",
    "zeta_len", "len_times_a", "modulus_lower", "extremal_upper", "hyp_upper",
    "gapmax", "filling", "i_minus3", "i_plus3",
)


@dataclass(frozen=True)
class StageConfig:
    c: Fraction = Fraction(0)
    precision_k: int = 10  # alpha and b are enclosed for stages up to precision_k + 3
    sequence: str = "squares"
    slit_mode: str = "reweighted"
    intersections: bool = True

    def digest(self) -> str:
        blob = json.dumps(
            {"c": str(self.c), "precision_k": self.precision_k, "sequence": self.sequence,
             "slit_mode": self.slit_mode, "intersections": self.intersections},
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class StageRecord:
    k: int
    n_k: int
    q: int
    t: RationalInterval
    gap: RationalInterval  # t_{k+1} - t_k
    systole_plus: RationalInterval
    systole_minus: RationalInterval
    zeta_h: RationalInterval
    zeta_v: RationalInterval
    zeta_len: RationalInterval
    len_times_a: RationalInterval
    modulus_lower: RationalInterval | None
    extremal_upper: RationalInterval | None
    hyp_upper: RationalInterval | None
    gapmax: RationalInterval  # largest horizontal gap of zeta_{k+3} at t_k
    filling: bool | None  # zeta_{k-3}, zeta_{k+3} pass the grid criterion
    i_minus3: int | None
    i_plus3: int | None

    @property
    def systole(self) -> RationalInterval:
        return RationalInterval(min(self.systole_plus.lo, self.systole_minus.lo),
                                min(self.systole_plus.hi, self.systole_minus.hi))

    def to_dict(self) -> dict:
        out = {}
        for name in RECORD_FIELDS:
            v = getattr(self, name)
            if isinstance(v, RationalInterval):
                v = [str(v.lo), str(v.hi)]
            out[name] = v
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "StageRecord":
        kw = {}
        for name in RECORD_FIELDS:
            v = d[name]
            if isinstance(v, list):
                v = RationalInterval(Fraction(v[0]), Fraction(v[1]))
            kw[name] = v
        return cls(**kw)


@dataclass
class Verdict:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}"


def _surface(config: StageConfig, cf: ContinuedFraction) -> SlitSurface:
    return make_surface(config.c, config.precision_k, cf)


# c-independent stage data, shared by every member of the X_c family
_GEOMETRY: dict = {}
_GEOMETRY_LOCK = threading.Lock()


def _geometry(k: int, geo: SlitSurface, intersections: bool) -> tuple:
    key = (id(geo.cf), geo.alpha, geo.b.enclosure, k, intersections)
    hit = _GEOMETRY.get(key)
    if hit is not None:
        return hit
    sys = geo.systole(stage_time(k, geo.cf))
    gapmax = geo.horizontal_gap_max(k, k + 3)
    filling = geo.filling_check(k - 3, k + 3).fills if k >= 4 else None
    im = ip = None
    if intersections:
        ip = intersection_number(geo, k, k + 3)
        im = intersection_number(geo, k - 3, k) if k >= 4 else None
    hit = (sys, gapmax, filling, im, ip)
    with _GEOMETRY_LOCK:
        _GEOMETRY[key] = hit
    return hit


def clear_caches() -> None:
    """Drop memoized curves and stage geometry (useful for cold timings)."""
    from .flatsurf import surface as _surface_mod

    with _GEOMETRY_LOCK:
        _GEOMETRY.clear()
    _surface_mod._CURVES.clear()


def compute_record(k: int, surface: SlitSurface, config: StageConfig) -> StageRecord:
    cf = surface.cf
    q = cf.q(2 * k + 1)
    t = RationalInterval.point(q).log()
    gap = (RationalInterval.point(Fraction(cf.q(2 * k + 3), q))).log()
    # systoles, gaps and filling data use the geometric curves of X_c itself
    geo = surface if surface.c == 0 else surface.with_c(0)
    sys, gapmax, filling, im, ip = _geometry(k, geo, config.intersections)
    z = surface.slit_curve(k, config.slit_mode)
    try:
        cert = SlitSurface.length_certificate(z.length, sys.minimum)
        mod, ext, hyp = cert.modulus_lower, cert.extremal_upper, cert.hyperbolic_upper
    except NoCertificateError:
        mod = ext = hyp = None
    return StageRecord(
        k=k, n_k=2 * k + 1, q=q, t=t, gap=gap,
        systole_plus=sys.plus, systole_minus=sys.minus,
        zeta_h=z.horizontal, zeta_v=z.vertical, zeta_len=z.length,
        len_times_a=z.length_times_a,
        modulus_lower=mod, extremal_upper=ext, hyp_upper=hyp,
        gapmax=gapmax, filling=filling, i_minus3=im, i_plus3=ip,
    )


def run_stages(
    k_min: int,
    k_max: int,
    config: StageConfig | None = None,
    cf: ContinuedFraction = DEFAULT,
    cache_dir: str | Path | None = None,
    workers: int = 1,
) -> list[StageRecord]:
    """Stage records for ``k_min..k_max``; cached on disk by ``(k, config digest)``."""
    config = config or StageConfig()
    if k_min < 1:
        raise ValueError("stages start at k = 1")
    if k_min > k_max:
        raise ValueError(f"empty stage range {k_min}..{k_max}")
    if k_max > config.precision_k:
        raise ValueError(f"k_max = {k_max} exceeds the configured precision_k = {config.precision_k}")
    surface = _surface(config, cf)
    lock = threading.Lock()

    def one(k: int) -> StageRecord:
        path = None
        if cache_dir is not None:
            path = Path(cache_dir) / config.digest() / f"stage_{k:03d}.json"
            if path.exists():
                return StageRecord.from_dict(json.loads(path.read_text()))
        try:
            rec = compute_record(k, surface, config)
        except PrecisionError as e:
            raise PrecisionError(f"stage {k}: {e}") from e
        if path is not None:
            with lock:
                path.parent.mkdir(parents=True, exist_ok=True)
                tmp = path.with_suffix(".tmp")
                tmp.write_text(json.dumps(rec.to_dict(), sort_keys=True))
                tmp.replace(path)
        return rec

    ks = range(k_min, k_max + 1)
    if workers <= 1:
        return [one(k) for k in ks]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(one, ks))


# -- checks -----------------------------------------------------------------

def check_gap_growth(records: list[StageRecord], offset: int = 1, c_bound: float | None = None,
                     cf: ContinuedFraction = DEFAULT, tol: Fraction = Fraction(1, 100)) -> Verdict:
    """Gaps track ``log(a_{2k+3} a_{2k+2})``; ``t_k > k``; fitted ``C`` in ``gap_D <= C log t_k``."""
    if len(records) < offset + 1:
        raise ValueError(f"need at least {offset + 1} records")
    by_k = {r.k: r for r in records}
    diffs = {}
    ok_diff = True
    for r in records:
        if r.k < 3:
            continue
        target = RationalInterval.point(cf.coefficient(2 * r.k + 3) * cf.coefficient(2 * r.k + 2)).log()
        d = abs(r.gap - target)
        diffs[r.k] = float(d.hi)
        ok_diff &= d.hi <= tol
    ok_t = all(r.t.lo > r.k for r in records)
    ratios = {}
    for r in records:
        if offset == 0:
            ratios[r.k] = 0.0
            continue
        other = by_k.get(r.k + offset)
        if other is None:
            continue
        g = other.t - r.t
        ratios[r.k] = float((g / r.t.log()).hi)
    c_fit = max(ratios.values()) if ratios else 0.0
    ok_c = c_bound is None or c_fit <= c_bound
    return Verdict("gap_growth", ok_diff and ok_t and ok_c,
                   {"max_diff": max(diffs.values(), default=0.0), "diffs": diffs,
                    "t_exceeds_k": ok_t, "C_fit": c_fit, "C_bound": c_bound, "offset": offset})


def check_thickness(records: list[StageRecord], eps_floor: float = 0.0) -> Verdict:
    if not records:
        raise ValueError("need at least one record")
    sys = [r.systole for r in records]
    eps = min(s.lo for s in sys)
    same = all(r.systole_plus == r.systole_minus for r in records)
    stable = True
    if len(records) >= 2:
        half = len(records) // 2
        first = min(s.lo for s in sys[: max(half, 1)])
        stable = eps >= Fraction(9, 10) * first
    ok = eps > 0 and eps > Fraction(eps_floor) and same and stable
    return Verdict("thickness", ok, {"eps_emp": float(eps), "pieces_equal": same, "stable": stable})


def check_slit_decay(records: list[StageRecord], window: tuple[float, float] | None = None,
                     hyp_from: int = 2) -> Verdict:
    if len(records) < 2:
        raise ValueError("need at least two records")
    lens = [r.zeta_len for r in records]
    decreasing = all(b.hi < a.lo for a, b in zip(lens, lens[1:]))
    details = {"lengths": [float(x) for x in lens], "decreasing": decreasing}
    ok = decreasing
    if len(records) >= 3 and window is not None:
        lo, hi = Fraction(window[0]), Fraction(window[1])
        prods = [r.len_times_a for r in records]
        in_win = all(lo <= p.lo and p.hi <= hi for p in prods)
        details.update(products=[float(p) for p in prods], window=list(window), in_window=in_win)
        hyp = [r.hyp_upper for r in records if r.k >= hyp_from]
        hyp_ok = all(h is not None for h in hyp) and all(
            b.hi < a.lo for a, b in zip(hyp, hyp[1:]))
        details.update(hyp_upper=[None if h is None else float(h) for h in hyp], hyp_decreasing=hyp_ok)
        ok = ok and in_win and hyp_ok
    return Verdict("slit_decay", ok, details)


def check_filling(records: list[StageRecord], gap_k4_bound: float | None = None) -> Verdict:
    ks = [r.k for r in records]
    if max(ks) - min(ks) + 1 < 7:
        raise ValueError("filling check needs a range spanning at least 7 stages")
    adm = [r for r in records if r.filling is not None]
    fills = {r.k: r.filling for r in adm}
    scaled = {r.k: float((r.gapmax * r.k**4).hi) for r in records}
    worst = max(scaled.values())
    ok = bool(adm) and all(fills.values()) and (gap_k4_bound is None or worst <= gap_k4_bound)
    return Verdict("filling", ok, {"fills": fills, "gap_k4": scaled, "gap_k4_max": worst,
                                   "gap_k4_bound": gap_k4_bound})


def curve_graph_diagnostics(records: list[StageRecord], disclaimer: str = DISCLAIMER) -> dict:
    """Intersection table with the generic bound ``d <= 2 + 2 log2 i``."""
    import math

    rows = []
    for r in records:
        i = r.i_plus3
        if i is None:
            continue
        row = {"k": r.k, "j": r.k + 3, "intersection": i}
        if i > 0:
            row["distance_upper"] = 2 + 2 * math.log2(i)
        rows.append(row)
    return {"disclaimer": disclaimer, "rows": rows}
