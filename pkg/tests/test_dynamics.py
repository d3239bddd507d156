from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from slitflow import cfrac
from slitflow.dynamics import (
    BoundaryAmbiguityError,
    SkewState,
    build_skew,
    checkpoint_schedule,
    control_trace,
    iterate,
    oscillation_stats,
)
from slitflow.flatsurf import make_surface
from slitflow.interval import RationalInterval

CF = cfrac.DEFAULT


@pytest.fixture(scope="module")
def X():
    return make_surface(0, 10)


@pytest.fixture(scope="module")
def system(X):
    return build_skew(X, 10**6)


def slow_orbit(system, start, n):
    """Step-by-step oracle with exact fractions."""
    x, s = start.position, start.sheet
    b = system.flip_length.mid
    alpha = Fraction(system.P, system.Q)
    zeros = []
    c = 0
    for _ in range(n):
        c += s == 0
        zeros.append(c)
        if x < b:
            s ^= 1
        x = (x + alpha) % 1
    return zeros, SkewState(x, s)


def test_convergent_choice(system):
    assert (system.P, system.Q) == CF.pq(9)
    assert system.Q == 170195445997


def test_one_step_definition(system):
    tr = iterate(system, SkewState(0, 0), 1, [1])
    assert tr.final == SkewState(Fraction(system.P, system.Q), 1)


SYSTEM = build_skew(make_surface(0, 10), 10**6)


@given(st.integers(1, 997).flatmap(lambda d: st.tuples(st.integers(0, d - 1), st.just(d))),
       st.integers(0, 1), st.integers(1, 2000))
def test_matches_slow_orbit(frac, sheet, n):
    system = SYSTEM
    start = SkewState(Fraction(*frac), sheet)
    try:
        tr = iterate(system, start, n, [n])
    except BoundaryAmbiguityError:
        return
    zeros, final = slow_orbit(system, start, n)
    assert tr.counts == (zeros[-1],)
    assert tr.final == final


def test_sheet_symmetry_and_precision(system, X):
    n = 10**6
    a = iterate(system, SkewState(Fraction(1, 3), 0), n)
    b = iterate(system, SkewState(Fraction(1, 3), 1), n)
    deeper = iterate(build_skew(X, n, depth=system.depth + 1), SkewState(Fraction(1, 3), 0), n)
    assert all(x + y == m for x, y, m in zip(a.counts, b.counts, a.checkpoints))
    assert a.counts == deeper.counts
    assert a == iterate(system, SkewState(Fraction(1, 3), 0), n)
    assert all(0 <= v <= 1 for v in a.averages)


def test_empty_flip_decouples():
    s = build_skew(RationalInterval.point(0), 10**5)
    tr = iterate(s, SkewState(Fraction(1, 3), 0), 10**5)
    assert tr.flips == 0 and all(v == 1 for v in tr.averages)


def test_control_rotation(system):
    ctrl = control_trace(system, SkewState(Fraction(1, 3), 0), 10**6)
    assert abs(ctrl.averages[-1] - Fraction(1, 2)) <= Fraction(1, 100)


def test_control_discrepancy_shrinks_at_best_approximations(system):
    qs = [CF.q(m) for m in range(4, 7)]
    ctrl = control_trace(system, SkewState(Fraction(1, 3), 0), max(qs), qs)
    devs = [abs(a - Fraction(1, 2)) for a in ctrl.averages]
    assert all(y <= x for x, y in zip(devs, devs[1:]))
    # Denjoy-Koksma: the count misses N/2 by at most the variation / 2
    assert all(d * n <= Fraction(1, 2) for d, n in zip(devs, qs))


def test_oscillation_statistics(system):
    tr = iterate(system, SkewState(Fraction(1, 3), 0), 10**6)
    ctrl = control_trace(system, SkewState(Fraction(1, 3), 0), 10**6)
    st_ = oscillation_stats(tr, control=ctrl)
    assert st_.amplitude == Fraction(16317, 262144)
    assert st_.ratio > 400


def test_constant_trace_has_zero_amplitude():
    s = build_skew(RationalInterval.point(0), 10**5)
    tr = iterate(s, SkewState(Fraction(1, 7), 0), 10**5)
    assert oscillation_stats(tr).amplitude == 0


def test_boundary_ambiguity_reports_step(X):
    # with a shallow convergent the drift band around the slit end is wide
    shallow = build_skew(X, 10, depth=3)
    start = SkewState(Fraction(round(X.b_c.mid * 10**6), 10**6), 0)
    with pytest.raises(BoundaryAmbiguityError) as err:
        iterate(shallow, start, 10)
    assert err.value.step == 0


def test_input_validation(system):
    with pytest.raises(ValueError):
        iterate(system, SkewState(0, 0), 10**6 + 1)
    with pytest.raises(ValueError):
        SkewState(Fraction(3, 2), 0)
    with pytest.raises(ValueError):
        build_skew(RationalInterval.point(0), 0)


def test_checkpoints_include_stage_times():
    cps = checkpoint_schedule(10**6)
    assert {46, 18571, 1024, 10**6} <= set(cps)
