import json
from fractions import Fraction

import pytest

from slitflow.witness import (
    DISCLAIMER,
    RECORD_FIELDS,
    StageConfig,
    StageRecord,
    check_filling,
    check_gap_growth,
    check_slit_decay,
    check_thickness,
    curve_graph_diagnostics,
    run_stages,
)


@pytest.fixture(scope="module")
def records():
    return run_stages(1, 10)


def test_first_stage(records):
    r = records[0]
    assert (r.k, r.n_k, r.q) == (1, 3, 46)
    assert abs(float(r.t) - 3.8286) < 1e-4


def test_gaps(records):
    assert abs(float(records[0].gap) - 6.0007) < 1e-4
    assert abs(float(records[1].gap) - 7.477) < 1e-3
    # t_k is the log of the same cached integer
    for a, b in zip(records, records[1:]):
        assert (b.t - a.t).intersects(a.gap)


def test_empty_range():
    with pytest.raises(ValueError):
        run_stages(3, 2)
    with pytest.raises(ValueError):
        run_stages(1, 11)


def test_gap_growth(records):
    v = check_gap_growth(records, c_bound=5.2)
    assert v.passed and v.details["max_diff"] < 0.01
    assert check_gap_growth(records, offset=0).details["C_fit"] == 0
    v2 = check_gap_growth(records, offset=2)
    assert v2.details["C_fit"] > v.details["C_fit"]
    with pytest.raises(ValueError):
        check_gap_growth(records[:1])


def test_thickness(records):
    v = check_thickness(records[:8], eps_floor=0.5)
    assert v.passed and 0.9 < v.details["eps_emp"] <= 1.0
    assert check_thickness(records[:1]).details["stable"]


def test_slit_decay(records):
    v = check_slit_decay(records[:8], window=(0.5, 8.0))
    assert v.passed and v.details["in_window"] and v.details["hyp_decreasing"]
    assert "in_window" not in check_slit_decay(records[:2], window=(0.5, 8.0)).details
    assert not check_slit_decay(records[:8], window=(2.5, 8.0)).passed


def test_filling(records):
    v = check_filling(records[:8], gap_k4_bound=2.1e-6)
    assert v.passed and v.details["fills"] == {4: True, 5: True, 6: True, 7: True, 8: True}
    with pytest.raises(ValueError):
        check_filling(records[:6])


def test_diagnostics(records):
    rep = curve_graph_diagnostics(records, "custom text")
    assert rep["disclaimer"] == "custom text"
    assert rep["rows"][0] == {"k": 1, "j": 4, "intersection": 353994,
                              "distance_upper": pytest.approx(2 + 2 * 18.4333, abs=1e-3)}
    fake = [StageRecord(**{**records[0].__dict__, "i_plus3": 0})]
    assert "distance_upper" not in curve_graph_diagnostics(fake)["rows"][0]
    assert DISCLAIMER.startswith("diagnostic only")


def test_serialization_round_trip_and_determinism(records, tmp_path):
    again = run_stages(1, 3)
    for a, b in zip(records, again):
        assert json.dumps(a.to_dict(), sort_keys=True) == json.dumps(b.to_dict(), sort_keys=True)
    r = records[4]
    assert StageRecord.from_dict(json.loads(json.dumps(r.to_dict()))) == r
    assert tuple(r.to_dict()) == RECORD_FIELDS


def test_cache_and_workers(records, tmp_path):
    cold = run_stages(1, 4, cache_dir=tmp_path, workers=3)
    warm = run_stages(1, 4, cache_dir=tmp_path)
    assert cold == warm == records[:4]
    assert len(list(tmp_path.glob("*/stage_*.json"))) == 4


def test_c_family_records():
    cfg = StageConfig(c=Fraction(1, 4), intersections=False)
    plus = run_stages(1, 4, cfg)
    minus = run_stages(1, 4, StageConfig(c=Fraction(-1, 4), intersections=False))
    base = run_stages(1, 4, StageConfig(intersections=False))
    for p, m, b in zip(plus, minus, base):
        assert (p.zeta_h + m.zeta_h) / 2 == b.zeta_h
    assert cfg.digest() != StageConfig().digest()
