import json

import pytest

from subradiance.cli import build_parser, main, parse_time
from subradiance.errors import ConfigError

ENSEMBLE = {
    "wavelength": 606e-9,
    "sample_length": 5e-3,
    "excited_lifetime": 164e-6,
    "beam_diameter": 100e-6,
    "atom_count": 1e7,
    "inhomogeneous_linewidth": 1e5,
}


def _write_cfg(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def _run(tmp_path, capsys, doc, *extra):
    cfg = _write_cfg(tmp_path, doc)
    code = main(["--config", cfg, *extra])
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------------------------
# time parsing
# ---------------------------------------------------------------------------

def test_parse_time_units(params):
    assert parse_time(3.5) == 3.5
    assert parse_time("20 ns") == pytest.approx(20e-9)
    assert parse_time("17ps") == pytest.approx(17e-12)
    assert parse_time("1.9 us") == pytest.approx(1.9e-6)
    assert parse_time("164 µs") == pytest.approx(164e-6)
    assert parse_time("0.5 ms") == pytest.approx(0.5e-3)
    assert parse_time("2.5 tau_R", params) == pytest.approx(2.5 * params.tau_R)
    with pytest.raises(ConfigError):
        parse_time("fast")
    with pytest.raises(ConfigError):
        parse_time("2 tau_R")  # needs ensemble parameters


# ---------------------------------------------------------------------------
# scenarios end to end
# ---------------------------------------------------------------------------

def test_params_scenario(tmp_path, capsys):
    code, out, err = _run(tmp_path, capsys,
                          {"scenario": "params", "ensemble": ENSEMBLE})
    assert code == 0
    doc = json.loads(out)
    rep = doc["report"]["parameters"]
    assert rep["transit_time_tau_E"] == pytest.approx(16.678e-12, rel=1e-3)
    assert doc["report"]["optimal_capture"]["amplitude"] == pytest.approx(
        0.9025, abs=1e-3)


def test_store_scenario_matches_library(tmp_path, capsys):
    code, out, _ = _run(tmp_path, capsys,
                        {"scenario": "store", "ensemble": ENSEMBLE})
    assert code == 0
    rep = json.loads(out)["report"]
    assert rep["total_efficiency"] == pytest.approx(0.7477, abs=1e-3)
    assert rep["fidelity"] == pytest.approx(1.0, abs=1e-6)


def test_scenario_override_and_output_file(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, {"scenario": "params", "ensemble": ENSEMBLE})
    out_path = tmp_path / "report.json"
    code = main(["--config", cfg, "--scenario", "schedule",
                 "--out", str(out_path)])
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["scenario"] == "schedule"
    assert doc["report"]["write_ok"] and doc["report"]["read_ok"]
    assert doc["report"]["stored_rows"] == {
        "1": "+--+", "2": "++--", "3": "+-+-"}


def test_scatter_table_output(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, {"scenario": "scatter", "ensemble": ENSEMBLE})
    table = tmp_path / "traj.tsv"
    code = main(["--config", cfg, "--table-out", str(table)])
    assert code == 0
    capsys.readouterr()
    lines = table.read_text().strip().split("\n")
    assert lines[0].startswith("t\t")
    assert len(lines) > 1000


def test_byte_deterministic_output(tmp_path, capsys):
    doc = {"scenario": "store", "ensemble": ENSEMBLE}
    _, out1, _ = _run(tmp_path, capsys, doc)
    _, out2, _ = _run(tmp_path, capsys, doc)
    assert out1 == out2


def test_sweep(tmp_path, capsys):
    code, out, _ = _run(tmp_path, capsys,
                        {"scenario": "params", "ensemble": ENSEMBLE},
                        "--sweep", "ensemble.atom_count=1e6,1e7")
    assert code == 0
    reports = json.loads(out)["report"]
    assert len(reports) == 2
    assert reports[0]["sweep_value"] == 1e6
    r = (reports[0]["parameters"]["collective_lifetime_tau_R"]
         / reports[1]["parameters"]["collective_lifetime_tau_R"])
    assert r == pytest.approx(10.0, rel=1e-9)


def test_rates_scenario(tmp_path, capsys):
    code, out, _ = _run(tmp_path, capsys,
                        {"scenario": "rates", "ensemble": ENSEMBLE,
                         "states": {"atom_count": 8}})
    assert code == 0
    rates = json.loads(out)["report"]["rates_in_units_of_mu_over_t1"]
    assert rates["one_sym"] == pytest.approx(8.0, rel=1e-9)
    assert rates["two_AminusB"] == pytest.approx(2.0 / 7.0, rel=1e-9)


def test_threelevel_scenario(tmp_path, capsys):
    code, out, _ = _run(tmp_path, capsys,
                        {"scenario": "threelevel",
                         "threelevel": {"g_a": 1.0, "g_b": 1.0,
                                        "alpha_re": 10.0}})
    assert code == 0
    rep = json.loads(out)["report"]
    assert rep["failure_probability"] == pytest.approx((20.0 / 101.0) ** 2,
                                                       rel=1e-9)


# ---------------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------------

def test_exit_2_on_bad_scenario(tmp_path, capsys):
    code, _, err = _run(tmp_path, capsys,
                        {"scenario": "nope", "ensemble": ENSEMBLE})
    assert code == 2 and "scenario" in err


def test_exit_2_on_bad_ensemble(tmp_path, capsys):
    code, _, err = _run(tmp_path, capsys,
                        {"scenario": "params",
                         "ensemble": {"wavelength": 606e-9}})
    assert code == 2


def test_exit_2_on_unknown_field(tmp_path, capsys):
    bad = dict(ENSEMBLE, color="blue")
    code, _, err = _run(tmp_path, capsys,
                        {"scenario": "params", "ensemble": bad})
    assert code == 2 and "color" in err


def test_exit_2_on_invalid_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code = main(["--config", str(path)])
    capsys.readouterr()
    assert code == 2


def test_exit_4_on_missing_config(tmp_path, capsys):
    code = main(["--config", str(tmp_path / "absent.json")])
    capsys.readouterr()
    assert code == 4


def test_exit_3_on_strict_regime(tmp_path, capsys):
    # pit-width warning fires at the fast working point
    dense = dict(ENSEMBLE)
    del dense["atom_count"]
    dense["number_density"] = 2e20
    code, _, err = _run(tmp_path, capsys,
                        {"scenario": "params", "ensemble": dense,
                         "pit_width": 1e7},
                        "--strict-regime")
    assert code == 3
    assert "warning:" in err


def test_quiet_suppresses_warnings(tmp_path, capsys):
    dense = dict(ENSEMBLE)
    del dense["atom_count"]
    dense["number_density"] = 2e20
    code, _, err = _run(tmp_path, capsys,
                        {"scenario": "params", "ensemble": dense,
                         "pit_width": 1e7},
                        "--quiet")
    assert code == 0 and "warning:" not in err


def test_parser_help_lists_scenarios():
    parser = build_parser()
    text = parser.format_help()
    for name in ("params", "store", "qubit", "schedule"):
        assert name in text
