"""Intersection counts of slit curves by lattice-point counting.

Two segments ``[0, A]`` and ``[0, B]`` on R^2/Z^2 (in lattice coordinates)
cross once for every integer point ``s*A - u*B`` with ``0 < s, u < 1``.
The open parallelogram is swept row by row with exact floor sums, so the
cost is logarithmic in its area.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

from ..interval import PrecisionError

__all__ = ["floor_sum", "count_open_parallelogram", "brute_force_count", "crossings"]


def floor_sum(n: int, m: int, a: int, b: int) -> int:
    """sum_{i=0}^{n-1} floor((a*i + b) / m) for m > 0."""
    if n <= 0:
        return 0
    if m <= 0:
        raise ValueError("m must be positive")
    ans = 0
    while True:
        if a >= m or a < 0:
            qa, a = divmod(a, m)
            ans += qa * n * (n - 1) // 2
        if b >= m or b < 0:
            qb, b = divmod(b, m)
            ans += qb * n
        y_max = a * n + b
        if y_max < m:
            return ans
        n, b = divmod(y_max, m)
        m, a = a, m


def _sum_floor_line(y0: int, y1: int, x0: Fraction, y_at: int, slope: Fraction) -> int:
    """sum_{y=y0}^{y1} floor(x0 + (y - y_at) * slope)."""
    if y1 < y0:
        return 0
    # x(y0 + i) = c + i*slope with c = x0 + (y0 - y_at)*slope
    c = x0 + (y0 - y_at) * slope
    den = c.denominator * slope.denominator
    a = slope.numerator * c.denominator
    b = c.numerator * slope.denominator
    return floor_sum(y1 - y0 + 1, den, a, b)


def _row_span(verts, y):
    xs = []
    for (xa, ya), (xb, yb) in zip(verts, verts[1:] + verts[:1]):
        if ya == yb:
            if ya == y:
                xs += [xa, xb]
            continue
        if min(ya, yb) <= y <= max(ya, yb):
            xs.append(xa + (xb - xa) * Fraction(y - ya, yb - ya))
    return min(xs), max(xs)


def count_open_parallelogram(A: tuple[Fraction, int], B: tuple[Fraction, int]) -> int:
    """Integer points ``s*A - u*B`` with ``0 < s, u < 1``; second coordinates are integers."""
    A = (Fraction(A[0]), int(A[1]))
    B = (Fraction(B[0]), int(B[1]))
    if A[0] * B[1] - A[1] * B[0] == 0:
        raise PrecisionError("parallel segments")
    verts = [(Fraction(0), 0), A, (A[0] - B[0], A[1] - B[1]), (-B[0], -B[1])]
    ys = sorted({v[1] for v in verts})
    ymin, ymax = ys[0], ys[-1]
    total = 0
    # rows at vertex heights, strictly inside the y-range
    for y in ys[1:-1]:
        lo, hi = _row_span(verts, y)
        total += max(0, -((-hi).__floor__()) - lo.__floor__() - 1)
    # open slabs between consecutive vertex heights
    for ya, yb in zip(ys, ys[1:]):
        r0, r1 = ya + 1, yb - 1
        if r1 < r0:
            continue
        ymid = Fraction(ya + yb, 2)
        edges = []
        for (xa, y_a), (xb, y_b) in zip(verts, verts[1:] + verts[:1]):
            if min(y_a, y_b) <= ya and max(y_a, y_b) >= yb and y_a != y_b:
                slope = (xb - xa) / (y_b - y_a)
                edges.append((xa + (ymid - y_a) * slope, xa, y_a, slope))
        edges.sort()
        (_, lx, ly, ls), (_, rx, ry, rs) = edges[0], edges[-1]
        # #{M : L < M < R} = ceil(R) - floor(L) - 1 = -floor(-R) - floor(L) - 1
        s_right = _sum_floor_line(r0, r1, -rx, ry, -rs)
        s_left = _sum_floor_line(r0, r1, lx, ly, ls)
        total += -s_right - s_left - (r1 - r0 + 1)
    return total


def brute_force_count(A, B) -> int:
    """Direct enumeration over the bounding box (test oracle)."""
    A = (Fraction(A[0]), Fraction(A[1]))
    B = (Fraction(B[0]), Fraction(B[1]))
    det = A[0] * (-B[1]) - A[1] * (-B[0])
    xs = [0, A[0], A[0] - B[0], -B[0]]
    ys = [0, A[1], A[1] - B[1], -B[1]]
    n = 0
    for M, N in product(range(min(xs).__floor__(), max(xs).__ceil__() + 1),
                        range(min(ys).__floor__(), max(ys).__ceil__() + 1)):
        s = (M * (-B[1]) - N * (-B[0])) / det
        u = (A[0] * N - A[1] * M) / det
        if 0 < s < 1 and 0 < u < 1:
            n += 1
    return n


def crossings(surface, curve_a, curve_b) -> int:
    """Transverse interior crossings of two slit curves projected to the torus.

    Counts at several rational points of the slit enclosure must agree;
    otherwise a lattice point sits on a boundary within the enclosure.
    """
    ca, cb = curve_a.connection, curve_b.connection
    enc = surface.b_c
    results = set()
    for bval in (enc.lo, enc.mid, enc.hi):
        A = (bval + ca.lattice_part[0], ca.lattice_part[1])
        B = (bval + cb.lattice_part[0], cb.lattice_part[1])
        results.add(count_open_parallelogram(A, B))
    if len(results) != 1:
        raise PrecisionError("intersection count not stable across the slit enclosure (tangency)")
    return results.pop()
