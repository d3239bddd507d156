"""Gap structure of finite rotation orbits (three-distance theorem).

The crossings of a straight segment with a closed geodesic on the torus
form a finite orbit ``{i * rho mod 1}``; its gaps follow from the
continued fraction of ``rho`` without enumerating the points.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..interval import PrecisionError, RationalInterval, as_interval

__all__ = ["ThreeGaps", "three_gaps", "brute_force_gaps", "partial_quotients"]


def _digits(x: Fraction):
    # integer Euclid on the reduced numerator and denominator
    n, d = x.numerator, x.denominator
    while n:
        a, r = divmod(d, n)
        yield a
        d, n = n, r


def partial_quotients(x: Fraction, limit: int | None = None) -> list[int]:
    """CF digits of ``x`` in (0, 1): ``x = [0; a1, a2, ...]``."""
    out = []
    for a in _digits(Fraction(x)):
        if limit is not None and len(out) >= limit:
            break
        out.append(a)
    return out


def _common_prefix(lo: Fraction, hi: Fraction) -> list[int]:
    a, b = _digits(Fraction(lo)), _digits(Fraction(hi))
    out = []
    ended = False
    while True:
        x, y = next(a, None), next(b, None)
        if x is None or y is None:
            ended = x is not y  # one expansion stopped early
            break
        if x != y:
            return out
        out.append(x)
    # the last shared digit is reliable only if both expansions continue
    if ended and out:
        out = out[:-1]
    return out


@dataclass(frozen=True)
class ThreeGaps:
    """Gap lengths (fractions of the circle) and their multiplicities."""

    lengths: tuple[RationalInterval, ...]
    counts: tuple[int, ...]

    @property
    def largest(self) -> RationalInterval:
        best = None
        for g, c in zip(self.lengths, self.counts):
            if c <= 0:
                continue
            if best is None:
                best = g
            else:
                best = RationalInterval(max(best.lo, g.lo), max(best.hi, g.hi))
        return best

    @property
    def total(self) -> RationalInterval:
        s = RationalInterval.point(0)
        for g, c in zip(self.lengths, self.counts):
            s = s + g * c
        return s


def three_gaps(rho, npoints: int) -> ThreeGaps:
    """Gaps of ``{i*rho mod 1 : 0 <= i < npoints}`` for an enclosed ``rho``.

    ``rho`` may be an interval; its continued fraction must be certified
    far enough to resolve ``npoints``.
    """
    rho = as_interval(rho)
    if npoints < 1:
        raise ValueError("need at least one point")
    fl = rho.floor()
    rho = rho - fl
    if npoints == 1:
        return ThreeGaps((RationalInterval.point(1),), (1,))
    if rho.lo == 0 and rho.is_exact:
        return ThreeGaps((RationalInterval.point(1),), (1,))
    if rho.is_exact and rho.lo.denominator <= npoints:
        q = rho.lo.denominator
        return ThreeGaps((RationalInterval.point(Fraction(1, q)),), (q,))
    if rho.lo <= 0:
        raise PrecisionError("rotation number not separated from an integer")
    digits = _common_prefix(rho.lo, rho.hi) if not rho.is_exact else partial_quotients(rho.lo)

    # q_{-1} = 0, q_0 = 1; eta_{-1} = 1, eta_0 = rho
    qs = [0, 1]
    ps = [1, 0]
    etas = [RationalInterval.point(1), rho]
    k = 0
    while True:
        # N = r q_k + q_{k-1} + s with 1 <= r <= a_{k+1}, 0 <= s < q_k
        if k >= len(digits):
            raise PrecisionError("continued fraction of rotation number not resolved")
        a = digits[k]
        qk, qkm1 = qs[-1], qs[-2]
        if npoints < a * qk + qkm1 + qk:
            r = max(1, (npoints - qkm1) // qk)
            r = min(r, a)
            s = npoints - r * qk - qkm1
            ek, ekm1 = etas[-1], etas[-2]
            lengths = (ek, ekm1 - ek * r, ekm1 - ek * (r - 1))
            counts = (npoints - qk, s, qk - s)
            return ThreeGaps(lengths, counts)
        q_next = a * qk + qkm1
        p_next = a * ps[-1] + ps[-2]
        qs.append(q_next)
        ps.append(p_next)
        etas.append(etas[-2] - etas[-1] * a)
        k += 1


def brute_force_gaps(rho: Fraction, npoints: int) -> list[Fraction]:
    """Sorted gaps by explicit enumeration (test oracle)."""
    pts = sorted({(i * rho) % 1 for i in range(npoints)})
    gaps = [b - a for a, b in zip(pts, pts[1:])]
    gaps.append(1 - pts[-1] + pts[0])
    return sorted(gaps)
