from fractions import Fraction
import pytest
from hypothesis import given
from hypothesis import strategies as st

from slitflow import cfrac
from slitflow.flatsurf import FlowTime, PlanarVector, ShearedLattice, flow, reduce_basis, shear_lattice
from slitflow.interval import RationalInterval

CF = cfrac.DEFAULT
scales = st.fractions(min_value=Fraction(1, 1000), max_value=1000, max_denominator=1000)


@given(scales, scales, st.integers(-50, 50), st.integers(-50, 50))
def test_flow_composes(r, s, M, N):
    lat = shear_lattice(30)
    v = lat.vector(M, N)
    a = flow(flow(v, FlowTime.log(r)), FlowTime.log(s))
    b = flow(v, FlowTime.log(r * s))
    assert a == b
    assert flow(flow(v, FlowTime.log(r)), -FlowTime.log(r)) == v


@given(scales)
def test_flow_preserves_area(r):
    lat = shear_lattice(30).at(FlowTime.log(r))
    assert Fraction(1) in lat.determinant
    assert lat.determinant.width < Fraction(1, 10**20)


def brute_shortest(lat, n_max):
    """Exhaustive over |N| <= n_max; for each N only M near N*alpha can win."""
    best = None
    for N in range(-n_max, n_max + 1):
        m0 = round(N * lat.alpha.mid)
        for M in (m0 - 1, m0, m0 + 1):
            if (M, N) == (0, 0):
                continue
            x, y = lat.proxy_vector(M, N)
            n = x * x + y * y
            best = n if best is None or n < best else best
    return best


def convergent_shortest(lat):
    best = None
    for j in range(1, 40):
        p, q = CF.pq(j)
        x, y = lat.proxy_vector(p, q)
        n = x * x + y * y
        best = n if best is None or n < best else best
    return best


@pytest.mark.parametrize("k", [1, 2])
def test_reduction_matches_exhaustive_search(k):
    lat = shear_lattice(40).at(FlowTime.log(CF.q(2 * k + 1)))
    red = reduce_basis(lat)
    x, y = lat.proxy_vector(*red.first)
    assert abs(red.change_of_basis_det) == 1
    assert x * x + y * y == brute_shortest(lat, 2000)


@pytest.mark.parametrize("k", [1, 3, 5, 9])
def test_reduction_matches_best_approximations(k):
    lat = shear_lattice(60).at(FlowTime.log(CF.q(2 * k + 1)))
    red = reduce_basis(lat)
    x, y = lat.proxy_vector(*red.first)
    assert x * x + y * y == convergent_shortest(lat)


@given(st.integers(0, 200), st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=50))
def test_reduction_is_reduced(t_exp, s):
    lat = shear_lattice(60).at(FlowTime.log(Fraction(3, 2) ** (t_exp % 60) * s))
    red = reduce_basis(lat)
    b1, b2 = red.vectors
    assert b1.length2.hi <= b2.length2.lo or b1.length2.intersects(b2.length2)
    assert abs(red.change_of_basis_det) == 1
    assert (b1.dot(b2) * 2).hi <= b1.length2.hi


def test_planar_vector_ops():
    v = PlanarVector.of(3, 4)
    assert Fraction(5) in v.length
    assert (v - v).length2 == RationalInterval.point(0)
    assert v.cross(PlanarVector.of(1, 0)) == RationalInterval.point(-4)


def test_flow_rejects_bad_input():
    with pytest.raises(ValueError):
        FlowTime.log(0)
    with pytest.raises(TypeError):
        flow(3, FlowTime.log(2))
