from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from slitflow.flatsurf.gaps import brute_force_gaps, partial_quotients, three_gaps
from slitflow.interval import PrecisionError, RationalInterval

rhos = st.fractions(min_value=Fraction(1, 10**6), max_value=1 - Fraction(1, 10**6), max_denominator=10**7)


@given(rhos, st.integers(1, 300))
def test_three_gaps_match_enumeration(rho, n):
    gaps = brute_force_gaps(rho, n)
    tg = three_gaps(rho, n)
    got = sorted(
        g.lo for g, c in zip(tg.lengths, tg.counts) for _ in range(c)
    )
    if len(set(rho * i % 1 for i in range(n))) < n:
        # orbit repeats: only the distinct-point gaps are meaningful
        assert max(gaps) == tg.largest.lo
        return
    assert got == gaps
    assert len(set(gaps)) <= 3
    assert tg.total == RationalInterval.point(1)


@given(rhos, st.integers(2, 200))
def test_interval_rho_encloses_point_results(rho, n):
    w = Fraction(1, 10**12)
    enc = RationalInterval(rho - w, rho + w)
    try:
        tg = three_gaps(enc, n)
    except PrecisionError:
        return
    if rho.denominator > n:
        assert max(brute_force_gaps(rho, n)) in tg.largest


def test_known_golden_gaps():
    tg = three_gaps(Fraction(987, 1597), 10)
    assert sorted(g.lo for g, c in zip(tg.lengths, tg.counts) if c) == sorted(set(brute_force_gaps(Fraction(987, 1597), 10)))


def test_partial_quotients():
    assert partial_quotients(Fraction(37, 46)) == [1, 4, 9]


def test_unresolvable_rotation_raises():
    with pytest.raises(PrecisionError):
        three_gaps(RationalInterval(Fraction(1, 3) - Fraction(1, 10**3), Fraction(1, 3) + Fraction(1, 10**3)), 10**6)
