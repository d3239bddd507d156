"""The slit double cover X (and the family X_c) and its saddle connections."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from ..cfrac import DEFAULT, BValue, ContinuedFraction
from ..interval import PrecisionError, RationalInterval, as_interval, pi_enclosure
from .gaps import three_gaps
from .geometry import (
    ZERO_TIME,
    FlowTime,
    PlanarVector,
    ReducedBasis,
    ShearedLattice,
    reduce_basis,
)

__all__ = [
    "SlitSurface",
    "SaddleConnection",
    "SlitCurve",
    "SystoleReport",
    "LengthCertificate",
    "FillingEvidence",
    "NoCertificateError",
    "ResourceError",
    "make_surface",
    "stage_time",
]

MAX_STRANDS = 10**80

# (cf id, alpha, b, c, k, mode) -> SlitCurve; values are immutable
_CURVES: dict = {}


class NoCertificateError(ValueError):
    """No embedded annulus of the required shape exists."""


class ResourceError(RuntimeError):
    pass


def stage_time(k: int, cf: ContinuedFraction = DEFAULT) -> FlowTime:
    """``t_k = log q_{2k+1}``."""
    if k < 1:
        raise IndexError("stage index must be >= 1")
    return FlowTime.log(cf.q(2 * k + 1))


@dataclass(frozen=True)
class SaddleConnection:
    lattice_part: tuple[int, int]  # (M, N) added to the slit vector
    kind: str  # "branch-to-branch" or "branch-loop"
    coset_M: RationalInterval  # real M-coordinate of the holonomy
    holonomy: PlanarVector  # at ``time``
    time: FlowTime = field(repr=False)

    @property
    def parity(self) -> tuple[int, int]:
        M, N = self.lattice_part
        return M % 2, N % 2

    @property
    def separating(self) -> bool:
        """Lattice part in 2L: the two lifts cut X into two slit tori."""
        return self.parity == (0, 0)

    @property
    def N(self) -> int:
        return self.lattice_part[1]

    @cached_property
    def flat_length(self) -> RationalInterval:
        return self.holonomy.length


@dataclass(frozen=True)
class SlitCurve:
    k: int
    connection: SaddleConnection
    a_next: int  # a_{2k+2}

    @property
    def horizontal(self) -> RationalInterval:
        return abs(self.connection.holonomy.x)

    @property
    def vertical(self) -> RationalInterval:
        return abs(self.connection.holonomy.y)

    @property
    def length(self) -> RationalInterval:
        return self.connection.flat_length

    @property
    def length_times_a(self) -> RationalInterval:
        return self.length * self.a_next


@dataclass(frozen=True)
class SystoleReport:
    plus: RationalInterval  # torus piece Y_+
    minus: RationalInterval  # torus piece Y_-
    branch_loop: RationalInterval
    basis: ReducedBasis = field(repr=False)

    @property
    def minimum(self) -> RationalInterval:
        lo = min(self.plus.lo, self.minus.lo, self.branch_loop.lo)
        hi = min(self.plus.hi, self.minus.hi, self.branch_loop.hi)
        return RationalInterval(lo, hi)


@dataclass(frozen=True)
class LengthCertificate:
    annulus_radius: RationalInterval
    modulus_lower: RationalInterval
    extremal_upper: RationalInterval
    hyperbolic_upper: RationalInterval


@dataclass(frozen=True)
class FillingEvidence:
    fills: bool
    horizontal_gap: RationalInterval | None
    vertical_gap: RationalInterval | None
    systole: RationalInterval | None
    note: str = ""


@dataclass(frozen=True)
class SlitSurface:
    """Two copies of the sheared unit torus glued along ``[0, b_c] x {0}``.

    ``b_c = (1 + c) * b``; ``c = 0`` is the surface X itself.
    """

    cf: ContinuedFraction
    alpha: RationalInterval
    b: BValue
    c: Fraction = Fraction(0)
    time: FlowTime = ZERO_TIME

    def __post_init__(self):
        if not -1 < self.c < 1:
            raise ValueError("c must lie in (-1, 1)")

    @property
    def b_c(self) -> RationalInterval:
        return self.b.enclosure * (1 + self.c)

    @property
    def lattice(self) -> ShearedLattice:
        return ShearedLattice(self.alpha, self.time)

    @property
    def slit_holonomy(self) -> PlanarVector:
        return self.lattice.vector(self.b_c, 0)

    def at(self, time: FlowTime) -> "SlitSurface":
        return SlitSurface(self.cf, self.alpha, self.b, self.c, time)

    def with_c(self, c) -> "SlitSurface":
        return SlitSurface(self.cf, self.alpha, self.b, Fraction(c), self.time)

    # -- lattice geometry ------------------------------------------------
    def reduced(self, time: FlowTime | None = None) -> ReducedBasis:
        lat = self.lattice if time is None else ShearedLattice(self.alpha, time)
        return reduce_basis(lat)

    def systole(self, time: FlowTime | None = None) -> SystoleReport:
        """Systoles of the torus pieces and the shortest branch loop.

        Both pieces are translates of the same lattice, so Y_+ and Y_- agree;
        a branch loop from a branch point back to itself is a lattice vector.
        """
        red = self.reduced(time)
        s = red.shortest
        return SystoleReport(plus=s, minus=s, branch_loop=s, basis=red)

    # -- saddle connections ----------------------------------------------
    def slit_connections(self, time: FlowTime, length_bound) -> list[SaddleConnection]:
        """Branch-to-branch connections ``(b_c, 0) + L`` of length <= bound at ``time``.

        Connections whose enclosure straddles the bound are included.
        """
        bound = Fraction(length_bound)
        if bound <= 0:
            raise ValueError("length bound must be positive")
        lat = ShearedLattice(self.alpha, time)
        red = reduce_basis(lat)
        e1, e2 = red.first, red.second
        bM = self.b_c.mid
        # coefficients of the slit point in the reduced basis (lattice coords are affine in M)
        x1, y1 = lat.proxy_vector(*e1)
        x2, y2 = lat.proxy_vector(*e2)
        sx, sy = lat.proxy_vector(bM, 0)
        det = x1 * y2 - x2 * y1
        s1 = -(sx * y2 - sy * x2) / det
        s2 = -(x1 * sy - y1 * sx) / det
        n1 = math.sqrt(float(x1 * x1 + y1 * y1))
        n2 = math.sqrt(float(x2 * x2 + y2 * y2))
        adet = abs(float(det))
        r1 = int(float(bound) * n2 / adet) + 2
        r2 = int(float(bound) * n1 / adet) + 2
        c1, c2 = round(s1), round(s2)
        out = []
        bb = bound * bound
        for i in range(c1 - r1, c1 + r1 + 1):
            for j in range(c2 - r2, c2 + r2 + 1):
                M = i * e1[0] + j * e2[0]
                N = i * e1[1] + j * e2[1]
                px, py = lat.proxy_vector(bM + M, N)
                # cheap prefilter on the proxy with slack, then certify
                if px * px + py * py > bb * Fraction(101, 100):
                    continue
                cM = self.b_c + M
                hol = lat.vector(cM, N)
                conn = SaddleConnection((M, N), "branch-to-branch", cM, hol, time)
                if conn.holonomy.length2.lo <= bb:
                    out.append(conn)
        out.sort(key=lambda c: (c.flat_length.mid, abs(c.N), abs(c.holonomy.x.mid), c.parity))
        return out

    def slit_curve(self, k: int, mode: str = "reweighted") -> SlitCurve:
        """Slit curve ``zeta_k`` at ``t_k``.

        For ``c = 0`` this is the shortest separating branch-to-branch
        connection.  For ``c != 0``, ``mode="reweighted"`` keeps the vertical
        part of X's curve and scales its horizontal part by ``1 + c`` (so the
        curves of X_c and X_-c average to those of X); ``mode="shifted-slit"``
        instead searches the coset of the slit ``(b_c, 0)`` on the same torus.
        """
        key = (id(self.cf), self.alpha, self.b.enclosure, self.c, k, mode)
        hit = _CURVES.get(key)
        if hit is None:
            hit = _CURVES[key] = self._slit_curve(k, mode)
        return hit

    def _slit_curve(self, k: int, mode: str) -> SlitCurve:
        if self.c != 0 and mode == "reweighted":
            base = self.with_c(0).slit_curve(k)
            bc = base.connection
            hol = PlanarVector(bc.holonomy.x * (1 + self.c), bc.holonomy.y)
            conn = SaddleConnection(bc.lattice_part, bc.kind, bc.coset_M, hol, bc.time)
            return SlitCurve(k, conn, base.a_next)
        if mode not in ("reweighted", "shifted-slit"):
            raise ValueError(f"unknown slit-curve mode {mode!r}")
        t = stage_time(k, self.cf)
        red = self.reduced(t)
        v1, v2 = red.vectors
        # covering radius of 2L is at most |e1| + |e2|
        bound = (v1.length.hi + v2.length.hi) * Fraction(11, 10)
        conns = [c for c in self.slit_connections(t, bound) if c.separating]
        if not conns:
            raise PrecisionError(f"no separating connection found at stage {k}")
        best = conns[0]
        if len(conns) > 1 and not best.flat_length.hi < conns[1].flat_length.lo:
            raise PrecisionError(f"cannot order the two shortest connections at stage {k}")
        return SlitCurve(k, best, self.cf.coefficient(2 * k + 2))

    # -- certificates ----------------------------------------------------
    @staticmethod
    def length_certificate(length: RationalInterval, systole: RationalInterval) -> LengthCertificate:
        """Annulus bound around a slit of flat length ``length``.

        Outer radius ``systole/4``, inner radius ``length``; the modulus of the
        round annulus bounds extremal length, and ``H <= pi * E``.
        """
        r = systole * Fraction(1, 4)
        if not r.lo > length.hi:
            raise NoCertificateError("annulus radius does not exceed the slit length")
        two_pi = pi_enclosure() * 2
        m = (r / length).log() / two_pi
        ext = 1 / m
        return LengthCertificate(r, m, ext, pi_enclosure() * ext)

    # -- gaps and filling ------------------------------------------------
    def transversal_gap(
        self,
        curve: SlitCurve,
        circle: tuple[int, int],
        complement: tuple[int, int],
        time: FlowTime,
        max_strands: int = MAX_STRANDS,
    ) -> RationalInterval:
        """Largest gap between crossings of ``curve`` along lines parallel to ``circle``.

        ``circle`` is a primitive lattice vector; the bound holds on every
        parallel line, measured in flat length at ``time``.
        """
        (U0, U1), (V0, V1) = complement, circle
        d = U0 * V1 - U1 * V0
        if abs(d) != 1:
            raise ValueError("circle and complement must form a lattice basis")
        conn = curve.connection
        hM, hN = conn.coset_M, conn.N
        sigma = (hM * V1 - hN * V0) / d
        tau = (hN * U0 - hM * U1) / d
        asig = abs(sigma)
        npts = asig.floor()
        circ_len = ShearedLattice(self.alpha, time).vector(V0, V1).length
        if npts > max_strands:
            raise ResourceError(f"{npts} strands exceed the limit {max_strands}")
        if npts < 1:
            return circ_len
        rho = tau / asig
        return three_gaps(rho, npts).largest * circ_len

    def horizontal_gap_max(self, observe_k: int, curve_j: int, curve: SlitCurve | None = None) -> RationalInterval:
        if curve_j <= observe_k:
            raise ValueError("horizontal gaps are defined for a later curve (curve_j > observe_k)")
        curve = curve or self.slit_curve(curve_j)
        return self.transversal_gap(curve, (1, 0), (0, 1), stage_time(observe_k, self.cf))

    def vertical_gap_max(self, observe_k: int, curve_j: int, curve: SlitCurve | None = None) -> RationalInterval:
        """Gap of an earlier curve along the nearly vertical closed geodesic at ``t_observe``.

        The transversal is the lattice vector ``(p_{2k+1}, q_{2k+1})``, whose
        flat holonomy at ``t_k`` is ``(O(1/a_{2k+2}), 1)``.
        """
        if curve_j >= observe_k:
            raise ValueError("vertical gaps are defined for an earlier curve (curve_j < observe_k)")
        curve = curve or self.slit_curve(curve_j)
        p1, q1 = self.cf.pq(2 * observe_k + 1)
        p0, q0 = self.cf.pq(2 * observe_k)
        return self.transversal_gap(curve, (p1, q1), (p0, q0), stage_time(observe_k, self.cf))

    def filling_check(self, j: int, k: int, curves: dict | None = None) -> FillingEvidence:
        """Grid criterion: gaps of both curves at the midpoint stage below half the systole."""
        if j == k:
            return FillingEvidence(False, None, None, None, "same curve, self-gaps unbounded in one direction")
        if j > k:
            raise ValueError("filling_check expects j < k")
        curves = curves or {}
        m = (j + k) // 2
        if m == j:
            return FillingEvidence(False, None, None, None, "no stage strictly between the curves")
        late = curves.get(k) or self.slit_curve(k)
        early = curves.get(j) or self.slit_curve(j)
        gh = self.horizontal_gap_max(m, k, late)
        gv = self.vertical_gap_max(m, j, early)
        sys = self.systole(stage_time(m, self.cf)).minimum
        fills = (gh + gv).hi < sys.lo / 2
        return FillingEvidence(fills, gh, gv, sys)


def make_surface(c=0, k_max: int = 10, cf: ContinuedFraction = DEFAULT) -> SlitSurface:
    """Surface with alpha and b enclosed tightly enough for stages up to ``k_max + 3``."""
    qbig = cf.q(2 * (k_max + 3) + 8)
    eps = Fraction(1, qbig**3)
    alpha = cf.alpha_within(eps)
    b = cf.compute_b(eps)
    return SlitSurface(cf, alpha, b, Fraction(c))
