import csv
import io
import json

import jsonschema
import pytest

from slitflow.cli import main
from slitflow.constants import load_constants
from slitflow.report import STAGES_HEADER, schema


@pytest.fixture(autouse=True)
def cache(tmp_path_factory, monkeypatch):
    monkeypatch.setenv("SLITFLOW_CACHE", str(tmp_path_factory.getbasetemp() / "cache"))


def run(capsys, *argv):
    rc = main(list(argv))
    return rc, capsys.readouterr()


def test_convergents_csv(capsys):
    rc, out = run(capsys, "convergents", "--max-k", "3")
    assert rc == 0
    assert out.out.splitlines() == ["k,a_k,p_k,q_k", "1,1,1,1", "2,4,4,5", "3,9,37,46"]


def test_convergents_json_same_data(capsys):
    rc, out = run(capsys, "convergents", "--max-k", "3", "--format", "json")
    assert json.loads(out.out)[2] == {"k": 3, "a_k": 9, "p_k": 37, "q_k": 46}


def test_usage_errors(capsys):
    assert run(capsys, "convergents", "--max-k", "0")[0] == 2
    assert run(capsys, "birkhoff", "--c", "1")[0] == 2
    assert run(capsys, "stages", "--from", "3", "--to", "2")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "b", "--tol", "-1")[0] == 2


def test_b_and_stages(capsys):
    rc, out = run(capsys, "b", "--tol", "1e-12")
    row = list(csv.reader(io.StringIO(out.out)))[1]
    assert float(row[2]) <= 0.0026954 <= float(row[3]) + 1e-7
    rc, out = run(capsys, "stages", "--from", "1", "--to", "2")
    rows = list(csv.reader(io.StringIO(out.out)))
    assert rows[0] == STAGES_HEADER
    assert rows[1][:3] == ["1", "3", "46"]


def test_systole_and_slits(capsys):
    rc, out = run(capsys, "systole", "--to", "2", "--format", "json")
    assert rc == 0 and len(json.loads(out.out)) == 2
    rc, out = run(capsys, "slits", "--to", "2")
    assert rc == 0 and out.out.count("\n") == 3


def test_birkhoff(capsys, tmp_path):
    rc, _ = run(capsys, "birkhoff", "--n", "1000000", "--start", "1/3", "--control", "--out", str(tmp_path))
    assert rc == 0
    rows = list(csv.DictReader(open(tmp_path / "birkhoff.csv")))
    ns = {int(r["N"]) for r in rows}
    assert {46, 18571, 1000000, 2**19} <= ns
    assert (tmp_path / "plots" / "birkhoff.svg").exists()
    rc, out = run(capsys, "birkhoff", "--n", "5000", "--empty-flip")
    assert {r["A_N"] for r in csv.DictReader(io.StringIO(out.out))} == {"1.0000000000000000e+00"}


def test_precision_and_io_exit_codes(capsys, tmp_path):
    assert run(capsys, "birkhoff", "--n", "1", "--start", "26953647/10000000000")[0] == 3
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run(capsys, "convergents", "--max-k", "2", "--out", str(blocker / "sub"))[0] == 4


def test_config_file_and_flag_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# stages\nfrom = 2\nto = 3\n")
    rc, out = run(capsys, "stages", "--config", str(cfg))
    assert [r[0] for r in csv.reader(io.StringIO(out.out))][1:] == ["2", "3"]
    rc, out = run(capsys, "stages", "--config", str(cfg), "--to", "2")
    assert [r[0] for r in csv.reader(io.StringIO(out.out))][1:] == ["2"]
    cfg.write_text("bogus = 1\n")
    assert run(capsys, "stages", "--config", str(cfg))[0] == 2


@pytest.fixture(scope="module")
def bundles(tmp_path_factory):
    base = tmp_path_factory.mktemp("bundles")
    cache = base / "cache"
    rcs = []
    for name in ("cold", "warm"):
        import os

        os.environ["SLITFLOW_CACHE"] = str(cache)
        rcs.append(main(["report", "--out", str(base / name)]))
    return base, rcs


def test_report_default_passes(bundles):
    base, rcs = bundles
    assert rcs == [0, 0]
    summary = json.loads((base / "cold" / "summary.json").read_text())
    jsonschema.validate(summary, schema())
    assert summary["passed"] and summary["failing"] == []
    assert summary["constants"] == load_constants()
    for name in ("gap", "slit_products", "systoles", "birkhoff"):
        svg = (base / "cold" / "plots" / f"{name}.svg").read_text()
        assert "<dc:date>" not in svg


def test_report_reproducible_with_warm_cache(bundles):
    base, _ = bundles
    for name in ("stages.csv", "assumptions.csv", "birkhoff.csv", "summary.json",
                 "plots/gap.svg", "plots/birkhoff.svg"):
        assert (base / "cold" / name).read_bytes() == (base / "warm" / name).read_bytes()
    header = (base / "cold" / "stages.csv").read_text().splitlines()[0]
    assert header.split(",") == STAGES_HEADER


def test_tampered_constant_fails(capsys, tmp_path):
    consts = load_constants()
    consts["gap_k4_bound"] = 1e-9
    path = tmp_path / "tampered.json"
    path.write_text(json.dumps(consts))
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"constants = {path}\n")
    rc, _ = run(capsys, "report", "--config", str(cfg), "--out", str(tmp_path / "out"))
    assert rc == 1
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert "filling" in summary["failing"]


def test_minimal_bundle(capsys, tmp_path):
    rc, out = run(capsys, "report", "--from", "1", "--to", "1", "--out", str(tmp_path))
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert any("gap plot skipped" in n for n in summary["notices"])
    assert not (tmp_path / "plots" / "gap.svg").exists()
    assert rc == 0
