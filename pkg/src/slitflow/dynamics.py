"""Z/2 skew product over the rotation by alpha, iterated exactly.

The base orbit ``x_i = x_0 + i*alpha mod 1`` is replaced by the rational
orbit ``x_0 + i*P/Q`` on a fixed integer grid.  The substitution is certified
once per trace: every grid point must sit farther from the flip-interval
boundary than the accumulated drift ``i*|alpha - P/Q|``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm

import numpy as np

from .cfrac import DEFAULT, ContinuedFraction
from .interval import PrecisionError, RationalInterval, as_interval

__all__ = [
    "SkewSystem",
    "SkewState",
    "BirkhoffTrace",
    "OscillationStats",
    "BoundaryAmbiguityError",
    "build_skew",
    "iterate",
    "control_trace",
    "oscillation_stats",
    "checkpoint_schedule",
]

# drift budget: N * |alpha - P/Q| <= 1 / (SAFETY * N), a tiny fraction of the mean orbit spacing
SAFETY = 10**10
CHUNK = 1 << 20
MAX_DEPTH = 60


class BoundaryAmbiguityError(PrecisionError):
    def __init__(self, step: int, msg: str = ""):
        super().__init__(f"orbit point {step} lies within the uncertainty band of the flip interval {msg}".strip())
        self.step = step


@dataclass(frozen=True)
class SkewSystem:
    P: int
    Q: int
    depth: int  # P/Q = p_depth / q_depth
    drift: Fraction  # certified bound on |alpha - P/Q|
    horizon: int
    flip_start: Fraction  # u
    flip_length: RationalInterval  # b_c

    @property
    def empty_flip(self) -> bool:
        return self.flip_length.hi == 0


@dataclass(frozen=True)
class SkewState:
    position: Fraction
    sheet: int

    def __post_init__(self):
        p = Fraction(self.position)
        if not 0 <= p < 1:
            raise ValueError("position must lie in [0, 1)")
        if self.sheet not in (0, 1):
            raise ValueError("sheet is 0 or 1")
        object.__setattr__(self, "position", p)


@dataclass(frozen=True)
class BirkhoffTrace:
    start: SkewState
    checkpoints: tuple[int, ...]
    counts: tuple[int, ...]  # number of sheet-0 visits among the first N states
    flips: int
    final: SkewState
    observable: str = "sheet0"
    flip_counts: tuple[int, ...] = ()  # flips among the first N steps, per checkpoint

    @property
    def averages(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, n) for c, n in zip(self.counts, self.checkpoints))

    def rows(self):
        for n, c in zip(self.checkpoints, self.counts):
            yield n, Fraction(c, n)


@dataclass(frozen=True)
class OscillationStats:
    max: Fraction
    min: Fraction
    amplitude: Fraction
    used: tuple[int, ...]
    control_amplitude: Fraction | None = None

    @property
    def ratio(self) -> float | None:
        if self.control_amplitude is None:
            return None
        if self.control_amplitude == 0:
            return float("inf") if self.amplitude else 0.0
        return float(self.amplitude / self.control_amplitude)


def checkpoint_schedule(n: int, cf: ContinuedFraction = DEFAULT) -> tuple[int, ...]:
    """Dyadic times, stage times ``q_{2k+1}``, and ``n`` itself."""
    pts = {n}
    d = 1
    while d <= n:
        pts.add(d)
        d *= 2
    k = 1
    while cf.q(2 * k + 1) <= n:
        pts.add(cf.q(2 * k + 1))
        k += 1
    return tuple(sorted(pts))


def build_skew(
    flip_length,
    horizon: int,
    cf: ContinuedFraction = DEFAULT,
    depth: int | None = None,
    flip_start=0,
) -> SkewSystem:
    """Choose a convergent ``P/Q`` whose drift over ``horizon`` steps fits the budget.

    ``flip_length`` is the slit enclosure ``b_c`` or a surface carrying one.
    """
    flip_length = getattr(flip_length, "b_c", flip_length)
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    flip_length = as_interval(flip_length)
    if flip_length.lo < 0 or flip_length.hi >= 1:
        raise ValueError("flip interval length must lie in [0, 1)")
    if depth is None:
        depth = 1
        while cf.q(depth) * cf.q(depth + 1) < SAFETY * horizon * horizon:
            depth += 1
            if depth > MAX_DEPTH:
                raise PrecisionError("no convergent meets the drift budget")
    P, Q = cf.pq(depth)
    drift = Fraction(1, cf.q(depth) * cf.q(depth + 1))
    return SkewSystem(P, Q, depth, drift, horizon, Fraction(flip_start), flip_length)


def _orbit_chunk(x0: int, step: int, D: int, i0: int, n: int) -> np.ndarray:
    """(x0 + i*step) mod D for i in [i0, i0+n), overflow-safe for D < 2**50."""
    B = 1 << 12
    i = np.arange(i0, i0 + n, dtype=np.int64)
    hi, lo = np.divmod(i, B)
    bstep = (B * step) % D
    return (x0 + (hi * bstep) % D + (lo * step) % D) % D


def _thresholds(system: SkewSystem, D: int, n: int, lo_b: Fraction, hi_b: Fraction):
    err = system.drift * n
    # certainly below lo_b: x < (lo_b - err) D ; certainly at/above hi_b: x >= (hi_b + err) D
    below = ((lo_b - err) * D).__ceil__()  # x < below  => certain
    above = ((hi_b + err) * D).__ceil__()  # x >= above => certain
    return below, above


def _classify(x: np.ndarray, i0: int, D: int, system: SkewSystem, n: int, boundaries):
    """Indicator of ``x/D < boundary`` with the drift band checked; boundaries are
    (lo, hi) enclosures of each cut point strictly inside (0, 1)."""
    err = system.drift * n
    # wrap-around near 0: true point may cross 0 unless it sits on 0 at step 0
    edge = (err * D).__ceil__()
    near0 = (x < edge) | (x > D - edge)
    if i0 == 0:
        near0[0] = near0[0] and x[0] != 0
    if near0.any():
        raise BoundaryAmbiguityError(i0 + int(np.argmax(near0)), "(near 0)")
    out = []
    for lo_b, hi_b in boundaries:
        below, above = _thresholds(system, D, n, lo_b, hi_b)
        amb = (x >= below) & (x < above)
        if amb.any():
            raise BoundaryAmbiguityError(i0 + int(np.argmax(amb)))
        out.append(x < below)
    return out


def iterate(
    system: SkewSystem,
    start: SkewState,
    n: int,
    checkpoints=None,
    cf: ContinuedFraction = DEFAULT,
) -> BirkhoffTrace:
    """Apply ``(x, s) -> (x + alpha, s xor [x in J])`` ``n`` times."""
    if n > system.horizon:
        raise ValueError(f"n = {n} exceeds the certified horizon {system.horizon}")
    if n < 1:
        raise ValueError("n must be >= 1")
    cps = tuple(sorted(set(checkpoints))) if checkpoints is not None else checkpoint_schedule(n, cf)
    if cps and (cps[0] < 1 or cps[-1] > n):
        raise ValueError("checkpoints must lie in [1, n]")
    D = lcm(system.Q, start.position.denominator)
    if D >= 1 << 50:
        raise PrecisionError("grid denominator too large for the integer kernel")
    step = system.P * (D // system.Q) % D
    x0 = int(start.position * D)
    u = system.flip_start
    if u != 0:
        raise NotImplementedError("only u = 0 is supported")
    counts, flip_counts, flips = [], [], 0
    sheet = start.sheet
    zeros = 0
    ci = 0
    empty = system.empty_flip
    for i0 in range(0, n, CHUNK):
        m = min(CHUNK, n - i0)
        x = _orbit_chunk(x0, step, D, i0, m)
        if empty:
            inj = np.zeros(m, dtype=bool)
            _classify(x, i0, D, system, n, [])
        else:
            (inj,) = _classify(x, i0, D, system, n, [(system.flip_length.lo, system.flip_length.hi)])
        # sheet at state i is the parity of flips before i
        fl = inj.astype(np.int64)
        before = np.concatenate(([0], np.cumsum(fl)[:-1]))
        sheets = (sheet + before) & 1
        occ = np.cumsum(sheets == 0)
        cum = np.cumsum(fl)
        while ci < len(cps) and cps[ci] <= i0 + m:
            counts.append(zeros + int(occ[cps[ci] - i0 - 1]))
            flip_counts.append(flips + int(cum[cps[ci] - i0 - 1]))
            ci += 1
        zeros += int(occ[-1])
        tot = int(fl.sum())
        flips += tot
        sheet = (sheet + tot) & 1
    final_x = Fraction(int((x0 + (n % D) * step) % D), D)
    return BirkhoffTrace(start, cps, tuple(counts), flips, SkewState(final_x, sheet), flip_counts=tuple(flip_counts))


def control_trace(system: SkewSystem, start, n: int, checkpoints=None, cf: ContinuedFraction = DEFAULT) -> BirkhoffTrace:
    """Plain rotation with observable the indicator of [0, 1/2)."""
    start = start if isinstance(start, SkewState) else SkewState(Fraction(start), 0)
    if n > system.horizon:
        raise ValueError("n exceeds the certified horizon")
    cps = tuple(sorted(set(checkpoints))) if checkpoints is not None else checkpoint_schedule(n, cf)
    D = lcm(system.Q, start.position.denominator, 2)
    if D >= 1 << 50:
        raise PrecisionError("grid denominator too large for the integer kernel")
    step = system.P * (D // system.Q) % D
    x0 = int(start.position * D)
    half = Fraction(1, 2)
    counts, hits, ci = [], 0, 0
    for i0 in range(0, n, CHUNK):
        m = min(CHUNK, n - i0)
        x = _orbit_chunk(x0, step, D, i0, m)
        (ind,) = _classify(x, i0, D, system, n, [(half, half)])
        occ = np.cumsum(ind)
        while ci < len(cps) and cps[ci] <= i0 + m:
            counts.append(hits + int(occ[cps[ci] - i0 - 1]))
            ci += 1
        hits += int(occ[-1])
    final_x = Fraction(int((x0 + (n % D) * step) % D), D)
    return BirkhoffTrace(start, cps, tuple(counts), 0, SkewState(final_x, 0), observable="rotation[0,1/2)",
                         flip_counts=(0,) * len(counts))


def oscillation_stats(
    trace: BirkhoffTrace,
    burn_in: int | None = None,
    control: BirkhoffTrace | None = None,
    cf: ContinuedFraction = DEFAULT,
) -> OscillationStats:
    """Spread of the running averages after burn-in (default ``q_5``)."""
    burn = cf.q(5) if burn_in is None else burn_in
    used = [(n, a) for n, a in trace.rows() if n >= burn]
    if len(used) < 3:
        raise ValueError("need at least 3 checkpoints after burn-in")
    vals = [a for _, a in used]
    ctrl = None
    if control is not None:
        cv = [a for n, a in control.rows() if n >= burn]
        ctrl = max(cv) - min(cv)
    return OscillationStats(max(vals), min(vals), max(vals) - min(vals), tuple(n for n, _ in used), ctrl)
