"""Exact continued-fraction engine for alpha = [1, 4, 9, 16, ...].

Convention: ``alpha = 1/(a_1 + 1/(a_2 + ...))`` with seeds
``p_0/q_0 = 0/1`` and ``p_1/q_1 = 1/a_1``.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable

from .interval import PrecisionError, RationalInterval, pi_enclosure

__all__ = [
    "CoefficientSequence",
    "Convergent",
    "BValue",
    "AssumptionReport",
    "ContinuedFraction",
    "SQUARES",
    "DEFAULT",
    "coefficient",
    "convergent",
    "enclose_alpha",
    "signed_error",
    "compute_b",
    "check_assumptions",
]

MAX_ALPHA_DEPTH = 400


def _squares(k: int) -> int:
    return k * k


@dataclass(frozen=True)
class CoefficientSequence:
    """Partial quotients ``a_k`` for ``k >= 1``."""

    rule: Callable[[int], int] = _squares
    name: str = "squares"

    def __call__(self, k: int) -> int:
        if k < 1:
            raise IndexError(f"partial quotients are indexed from 1, got {k}")
        a = int(self.rule(k))
        if a < 1:
            raise ValueError(f"a_{k} = {a} must be a positive integer")
        return a


SQUARES = CoefficientSequence()


@dataclass(frozen=True, slots=True)
class Convergent:
    k: int
    p: int
    q: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass(frozen=True)
class BValue:
    enclosure: RationalInterval
    truncation_index: int
    tail_bound: Fraction
    terms: tuple[RationalInterval, ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class AssumptionReport:
    # (A): partial sums of 1/a_{2k+2}, k = 1..K
    a_partial_sums: tuple[Fraction, ...]
    a_tail_bound: Fraction
    a_limit: RationalInterval | None
    # (B): a_{2k+1}
    b_values: tuple[int, ...]
    b_increasing: bool
    # (C): r_k = q_{2k-1} log(a_{2k+2}) / q_{2k+1}
    c_ratios: tuple[RationalInterval, ...]
    c_scaled: tuple[RationalInterval, ...]  # r_k * k^4
    c_decreasing_from: int | None

    @property
    def a_ok(self) -> bool:
        s = self.a_partial_sums
        inc = all(x < y for x, y in zip(s, s[1:]))
        bounded = self.a_limit is None or s[-1] <= self.a_limit.hi
        return inc and bounded


class ContinuedFraction:
    """Memoized convergents for one coefficient sequence.

    Reads are lock-free; appends to the cache are serialized.
    """

    def __init__(self, seq: CoefficientSequence = SQUARES):
        self.seq = seq
        self._p = [0, 1]
        self._q = [1, seq(1)]
        self._lock = threading.Lock()

    def coefficient(self, k: int) -> int:
        return self.seq(k)

    def _extend(self, k: int) -> None:
        with self._lock:
            p, q = self._p, self._q
            while len(q) <= k:
                n = len(q)
                a = self.seq(n)
                p.append(a * p[-1] + p[-2])
                q.append(a * q[-1] + q[-2])

    def pq(self, k: int) -> tuple[int, int]:
        if k < 0:
            raise IndexError(f"convergent index must be >= 0, got {k}")
        if k >= len(self._q):
            self._extend(k)
        return self._p[k], self._q[k]

    def q(self, k: int) -> int:
        return self.pq(k)[1]

    def convergent(self, k: int) -> Convergent:
        p, q = self.pq(k)
        return Convergent(k, p, q)

    def enclose_alpha(self, depth: int) -> RationalInterval:
        if depth < 1:
            raise IndexError("enclosure depth must be >= 1")
        p0, q0 = self.pq(depth)
        p1, q1 = self.pq(depth + 1)
        return RationalInterval.hull(Fraction(p0, q0), Fraction(p1, q1))

    def alpha_within(self, eps: Fraction) -> RationalInterval:
        """Shallowest convergent enclosure of width below ``eps``."""
        k = 1
        while True:
            q0, q1 = self.q(k), self.q(k + 1)
            if Fraction(1, q0 * q1) < eps:
                return self.enclose_alpha(k)
            k += 1
            if k > MAX_ALPHA_DEPTH:
                raise PrecisionError("alpha depth limit reached")

    def signed_error(self, k: int, depth: int | None = None) -> RationalInterval:
        """Enclosure of ``q_k alpha - p_k`` with certified sign."""
        if k < 1:
            raise IndexError("signed_error needs k >= 1")
        p, q = self.pq(k)
        K = depth if depth is not None else k + 2
        while K <= MAX_ALPHA_DEPTH:
            e = self.enclose_alpha(K) * q - p
            if not (e.lo <= 0 <= e.hi):
                return e
            K += 2
        raise PrecisionError(f"cannot separate q_{k} alpha - p_{k} from 0")

    def b_tail(self, J: int) -> Fraction:
        # sum_{j>J} 1/q_{2j+2} <= 2/q_{2J+4} because q_{i+2} >= 2 q_i
        return Fraction(4, self.q(2 * J + 4))

    def compute_b(self, tolerance, truncation: int | None = None) -> BValue:
        """b = 2 * sum_{j>=1} |q_{2j+1} alpha - p_{2j+1}|, enclosed to ``tolerance``."""
        tol = Fraction(tolerance)
        if tol <= 0:
            raise ValueError("tolerance must be positive")
        if truncation is None:
            J = 1
            while self.b_tail(J) >= tol / 2:
                J += 1
        else:
            J = truncation
        tail = self.b_tail(J)
        if J == 0:
            return BValue(RationalInterval(Fraction(0), tail), 0, tail)
        # per-term width 2 q_{2J+1} w(alpha) < tol / (2J)
        qmax = self.q(2 * J + 1)
        # the |e| < 1/q_{2j+2} check has relative margin ~ 1/(a_{2j+2} a_{2j+3})
        alpha = self.alpha_within(min(tol / (4 * J * qmax), Fraction(1, qmax * self.q(2 * J + 3) ** 2)))
        terms = []
        total = RationalInterval.point(0)
        for j in range(1, J + 1):
            p, q = self.pq(2 * j + 1)
            e = abs(alpha * q - p)
            if e.lo <= 0:
                raise PrecisionError(f"term {j} of b not separated from 0")
            if not e.hi < Fraction(1, self.q(2 * j + 2)):
                raise PrecisionError(f"term {j} of b violates |e| < 1/q_{2 * j + 2}")
            terms.append(e)
            total = total + 2 * e
        enc = RationalInterval(total.lo, total.hi + tail)
        return BValue(enc, J, tail, tuple(terms))

    def check_assumptions(self, max_k: int) -> AssumptionReport:
        if max_k < 2:
            raise ValueError("check_assumptions needs max_k >= 2")
        sums, s = [], Fraction(0)
        for k in range(1, max_k + 1):
            s += Fraction(1, self.seq(2 * k + 2))
            sums.append(s)
        limit = None
        tail = Fraction(0)
        if self.seq is SQUARES:
            # sum_{k>K} 1/(2k+2)^2 <= 1/(4(K+1))
            tail = Fraction(1, 4 * (max_k + 1))
            limit = (pi_enclosure().square() / 6 - 1) / 4
        bvals = tuple(self.seq(2 * k + 1) for k in range(1, max_k + 1))
        ratios, scaled = [], []
        for k in range(1, max_k + 1):
            lg = RationalInterval.point(self.seq(2 * k + 2)).log()
            r = lg * Fraction(self.q(2 * k - 1), self.q(2 * k + 1))
            ratios.append(r)
            scaled.append(r * k**4)
        start = None
        for k0 in range(1, max_k):
            if all(ratios[i].hi < ratios[i - 1].lo for i in range(k0, max_k)):
                start = k0
                break
        return AssumptionReport(
            a_partial_sums=tuple(sums),
            a_tail_bound=tail,
            a_limit=limit,
            b_values=bvals,
            b_increasing=all(x < y for x, y in zip(bvals, bvals[1:])),
            c_ratios=tuple(ratios),
            c_scaled=tuple(scaled),
            c_decreasing_from=start,
        )


DEFAULT = ContinuedFraction()


def coefficient(k: int) -> int:
    return DEFAULT.coefficient(k)


def convergent(k: int) -> Convergent:
    return DEFAULT.convergent(k)


def enclose_alpha(depth: int) -> RationalInterval:
    return DEFAULT.enclose_alpha(depth)


def signed_error(k: int) -> RationalInterval:
    return DEFAULT.signed_error(k)


def compute_b(tolerance, truncation: int | None = None) -> BValue:
    return DEFAULT.compute_b(tolerance, truncation)


def check_assumptions(max_k: int) -> AssumptionReport:
    return DEFAULT.check_assumptions(max_k)


def coprime(c: Convergent) -> bool:
    return gcd(c.p, c.q) == 1
