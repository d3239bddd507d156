"""Sheared unit lattice, diagonal flow and Lagrange-Gauss reduction.

Lattice points are addressed by integer pairs ``(M, N)``; the planar vector
is ``(M - N*alpha, N)`` at time 0 and ``(r*(M - N*alpha), N/r)`` at time
``log r``.  Slit endpoints live in the same coordinates with a real ``M``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from mpmath import iv

from ..interval import PrecisionError, RationalInterval, as_interval, _from_iv, _ivprec

__all__ = [
    "PlanarVector",
    "FlowTime",
    "ShearedLattice",
    "ReducedBasis",
    "shear_lattice",
    "flow",
    "reduce_basis",
]


@dataclass(frozen=True)
class PlanarVector:
    x: RationalInterval
    y: RationalInterval

    @classmethod
    def of(cls, x, y) -> "PlanarVector":
        return cls(as_interval(x), as_interval(y))

    @property
    def length2(self) -> RationalInterval:
        return self.x.square() + self.y.square()

    @property
    def length(self) -> RationalInterval:
        return self.length2.sqrt()

    def __add__(self, other: "PlanarVector") -> "PlanarVector":
        return PlanarVector(self.x + other.x, self.y + other.y)

    def __neg__(self) -> "PlanarVector":
        return PlanarVector(-self.x, -self.y)

    def __sub__(self, other: "PlanarVector") -> "PlanarVector":
        return self + (-other)

    def scale(self, c) -> "PlanarVector":
        return PlanarVector(self.x * c, self.y * c)

    def dot(self, other: "PlanarVector") -> RationalInterval:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "PlanarVector") -> RationalInterval:
        return self.x * other.y - self.y * other.x


@dataclass(frozen=True)
class FlowTime:
    """A time ``t`` for ``g_t = diag(e^t, e^-t)``.

    Exact times are stored as ``t = log(scale)`` with rational ``scale > 0``;
    otherwise ``scale`` is an enclosure of ``e^t``.
    """

    scale: RationalInterval

    @classmethod
    def log(cls, r) -> "FlowTime":
        r = Fraction(r)
        if r <= 0:
            raise ValueError("flow scale must be positive")
        return cls(RationalInterval.point(r))

    @classmethod
    def from_interval(cls, t, bits: int = 256) -> "FlowTime":
        t = as_interval(t)
        with _ivprec(bits):
            lo = iv.exp(iv.mpf(t.lo.numerator) / t.lo.denominator)
            hi = iv.exp(iv.mpf(t.hi.numerator) / t.hi.denominator)
        return cls(RationalInterval(_from_iv(lo).lo, _from_iv(hi).hi))

    @property
    def is_exact(self) -> bool:
        return self.scale.is_exact

    @property
    def value(self) -> RationalInterval:
        return self.scale.log()

    def __neg__(self) -> "FlowTime":
        return FlowTime(1 / self.scale)

    def __add__(self, other: "FlowTime") -> "FlowTime":
        return FlowTime(self.scale * other.scale)


ZERO_TIME = FlowTime.log(1)


@dataclass(frozen=True)
class ShearedLattice:
    """Lattice spanned by ``u = (1, 0)`` and ``v = (-alpha, 1)``, flowed by ``time``."""

    alpha: RationalInterval
    time: FlowTime = ZERO_TIME

    def vector(self, M, N) -> PlanarVector:
        r = self.time.scale
        return PlanarVector((as_interval(M) - self.alpha * N) * r, as_interval(N) / r)

    @property
    def u(self) -> PlanarVector:
        return self.vector(1, 0)

    @property
    def v(self) -> PlanarVector:
        return self.vector(0, 1)

    @property
    def determinant(self) -> RationalInterval:
        return self.u.cross(self.v)

    def at(self, time: FlowTime) -> "ShearedLattice":
        return ShearedLattice(self.alpha, time)

    # exact rational proxy used to steer reductions and box searches; results
    # are always re-evaluated on the enclosure
    def proxy_vector(self, M, N) -> tuple[Fraction, Fraction]:
        r = self.time.scale.mid
        a = self.alpha.mid
        return (Fraction(M) - N * a) * r, Fraction(N) / r


def shear_lattice(alpha_depth: int, cf=None) -> ShearedLattice:
    from ..cfrac import DEFAULT

    cf = cf or DEFAULT
    return ShearedLattice(cf.enclose_alpha(alpha_depth))


def flow(obj, t: FlowTime):
    """Apply ``g_t`` to a vector, lattice or slit surface."""
    if isinstance(obj, PlanarVector):
        return PlanarVector(obj.x * t.scale, obj.y / t.scale)
    if isinstance(obj, ShearedLattice):
        return obj.at(obj.time + t)
    if hasattr(obj, "at"):
        return obj.at(obj.time + t)
    raise TypeError(f"cannot flow {type(obj).__name__}")


@dataclass(frozen=True)
class ReducedBasis:
    """Gauss-reduced basis in integer coordinates; ``first`` is a shortest vector."""

    first: tuple[int, int]
    second: tuple[int, int]
    lattice: ShearedLattice

    @property
    def vectors(self) -> tuple[PlanarVector, PlanarVector]:
        return self.lattice.vector(*self.first), self.lattice.vector(*self.second)

    @property
    def shortest(self) -> RationalInterval:
        return self.vectors[0].length

    @property
    def change_of_basis_det(self) -> int:
        (a, b), (c, d) = self.first, self.second
        return a * d - b * c


def _pdot(lat, A, B):
    ax, ay = lat.proxy_vector(*A)
    bx, by = lat.proxy_vector(*B)
    return ax * bx + ay * by


def reduce_basis(lattice: ShearedLattice, max_iter: int = 10_000) -> ReducedBasis:
    """Lagrange-Gauss reduction, certified on the alpha enclosure.

    Raises :class:`PrecisionError` when the enclosure cannot confirm the
    reduction inequalities; the caller should deepen alpha.
    """
    b1, b2 = (1, 0), (0, 1)
    n1 = _pdot(lattice, b1, b1)
    n2 = _pdot(lattice, b2, b2)
    if n1 > n2:
        b1, b2, n1, n2 = b2, b1, n2, n1
    for _ in range(max_iter):
        mu = round(_pdot(lattice, b1, b2) / n1)
        if mu:
            b2 = (b2[0] - mu * b1[0], b2[1] - mu * b1[1])
            n2 = _pdot(lattice, b2, b2)
        if n2 >= n1:
            break
        b1, b2, n1, n2 = b2, b1, n2, n1
    else:
        raise RuntimeError("Gauss reduction did not terminate")

    v1, v2 = lattice.vector(*b1), lattice.vector(*b2)
    l1, l2 = v1.length2, v2.length2
    dp = abs(v1.dot(v2)) * 2
    if not (l1.hi <= l2.lo or (l1.is_exact and l2.is_exact and l1.lo <= l2.lo)):
        raise PrecisionError("cannot certify |b1| <= |b2|")
    if not (dp.hi <= l1.lo):
        raise PrecisionError("cannot certify |2<b1,b2>| <= |b1|^2")
    return ReducedBasis(b1, b2, lattice)
