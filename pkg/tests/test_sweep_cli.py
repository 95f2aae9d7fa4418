import csv
import io
import json

import pytest

from dios_fpj.cli import main
from dios_fpj.sweep import (
    ALL_SCHEMES,
    CSV_HEADER,
    Axis,
    SweepRow,
    axis_points,
    closed_form_sweep,
    emit_csv,
    run_sweep,
)


@pytest.fixture(scope="module")
def tiny(defaults):
    return defaults.replace(
        arrays={"n_a": 8, "n_d": 32},
        geometry={"k_refractive": 2, "k_reflective": 2},
        schedule={"n_blocks": 3, "slots": 2},
        power={"per_lu_dbm": (0.0, 10.0)},
        sweep={"nd_grid": (16, 32), "na_grid": (8, 16), "k_grid": (2, 4)},
    )


def _read(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.reader(fh))


def test_axis_points(defaults):
    users = axis_points(defaults, Axis.USERS)
    assert [v for v, _ in users] == [8, 16, 24, 32]
    assert all(c.geometry.k_refractive + c.geometry.k_reflective == v for v, c in users)
    nd16 = axis_points(defaults, Axis.ANTENNAS_ND16)
    assert [c.arrays.n_d for _, c in nd16] == [512, 1024, 2048, 4096]


def test_power_sweep_row_count(tiny):
    result = run_sweep(tiny, Axis.POWER)
    assert len(result.rows) == len(ALL_SCHEMES) * 2 * 2
    ca = result.value("dios_ca", "refractive", 10.0)
    assert ca.bound is not None and ca.ci_halfwidth > 0
    assert result.value("no_jamming", "refractive", 10.0).bound is None
    t1 = result.value("theorem1", "reflective", 0.0)
    assert t1.rate_per_lu == t1.bound and t1.ci_halfwidth == 0.0


def test_power_sweep_rates_increase(tiny):
    result = run_sweep(tiny, Axis.POWER, ("no_jamming",))
    rows = result.select("no_jamming", "refractive")
    assert rows[0].rate_per_lu < rows[1].rate_per_lu


@pytest.mark.parametrize("axis", [Axis.DIOS_ELEMENTS, Axis.ANTENNAS, Axis.USERS, Axis.ANTENNAS_ND16])
def test_other_axes(tiny, axis):
    result = run_sweep(tiny, axis, ("no_jamming", "dios_ca"))
    assert len(result.rows) == 2 * 2 * 2


def test_unknown_scheme(tiny):
    with pytest.raises(ValueError):
        run_sweep(tiny, Axis.POWER, ("nope",))


def test_csv_round_trip(tmp_path, tiny):
    result = run_sweep(tiny, Axis.POWER, ("no_jamming", "dios_va"))
    path = tmp_path / "out.csv"
    emit_csv(result, path)
    raw = path.read_bytes()
    assert b"\r\n" not in raw
    rows = _read(path)
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 1 + len(result.rows)
    for rec, row in zip(rows[1:], result.rows):
        assert rec[0] == row.scheme and rec[3] == row.side
        assert float(rec[4]) == pytest.approx(row.rate_per_lu, rel=1e-5)
        assert rec[6] == ("" if row.bound is None else f"{row.bound:.6g}")


def test_csv_empty(tmp_path):
    path = tmp_path / "e.csv"
    emit_csv([], path)
    assert path.read_text(encoding="utf-8") == ",".join(CSV_HEADER) + "\n"


def test_csv_formatting(tmp_path):
    path = tmp_path / "f.csv"
    emit_csv([SweepRow("dios_ca", "power", 10.0, "refractive", 1.23456789, 0.000123456, None)], path)
    assert path.read_text(encoding="utf-8").splitlines()[1] == "dios_ca,power,10,refractive,1.23457,0.000123456,"


def test_closed_form_sweep(tiny):
    result = closed_form_sweep(tiny)
    assert len(result.rows) == 2 * 2 * 2
    rows = result.select("theorem1", "refractive")
    assert rows[0].rate_per_lu < rows[1].rate_per_lu


def test_cli_sweep_and_reproduce(tmp_path, tiny):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("arrays: {n_a: 8, n_d: 32}\ngeometry: {k_refractive: 2, k_reflective: 2}\n"
                   "schedule: {n_blocks: 2, slots: 2}\npower: {per_lu_dbm: [0, 10]}\n", encoding="utf-8")
    out = tmp_path / "s.csv"
    assert main(["sweep", "--axis", "power", "--schemes", "no_jamming", "dris",
                 "--config", str(cfg), "--out", str(out)]) == 0
    assert len(_read(out)) == 1 + 2 * 2 * 2
    out2 = tmp_path / "r.csv"
    assert main(["reproduce", "fig2", "--config", str(cfg), "--seed", "3", "--out", str(out2)]) == 0
    assert len(_read(out2)) == 1 + len(ALL_SCHEMES) * 2 * 2
    out3 = tmp_path / "b.csv"
    assert main(["bounds", "--config", str(cfg), "--out", str(out3)]) == 0
    assert {r[0] for r in _read(out3)[1:]} == {"theorem1", "theorem2"}


def test_cli_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("arrays:\n  n_x: 1\n", encoding="utf-8")
    assert main(["bounds", "--config", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["bounds", "--config", str(tmp_path / "missing.yaml")]) == 2


def test_cli_verify_json(capsys):
    assert main(["verify", "zf"]) == 0
    captured = capsys.readouterr()
    doc = json.loads(captured.out)
    assert doc["passed"] is True and len(doc["checks"]) == 2
    assert "[PASS] zf/" in captured.err


def test_cli_verify_wishart(capsys):
    assert main(["verify", "wishart"]) == 0
    doc = json.load(io.StringIO(capsys.readouterr().out))
    assert doc["checks"][0]["suite"] == "wishart"
