import csv
import io
import json

import numpy as np
import pytest

from spherical_landau import Truncation, build_spectrum
from spherical_landau.cli import main
from spherical_landau.export import IoFailure, emit, format_float, render
from spherical_landau.magnetization import MagnetizationSweep

BASE = {"params": {}, "conventions": {"phase": "derivation_consistent", "zeeman": "printed"}}

CONFIGS = {
    "spectrum": {"point": {"b": 1.0}, "truncation": {"m_max": 0, "l_max": 2}},
    "certify": {"point": {"b": 50.0}},
    "free-energy": {"point": {"b": 100.0, "beta": 50.0, "nu": 10.0}, "truncation": {"m_max": 5, "l_max": 3}},
    "magnetization": {"point": {"b": 100.0, "beta": 50.0, "nu": 10.0}, "truncation": {"m_max": 5, "l_max": 3}},
    "sweep": {"point": {"beta": 50.0, "nu": 10.0}, "truncation": {"m_max": 5, "l_max": 3},
              "grid": {"b_min": 80.0, "b_max": 120.0, "count": 64, "spacing": "uniform_inv_b"}},
    "dhva": {"point": {"beta": 50.0, "nu": 10.0}, "truncation": {"m_max": 5, "l_max": 3},
             "grid": {"b_min": 80.0, "b_max": 120.0, "count": 64, "spacing": "uniform_inv_b"}},
    "orbit": {"point": {"b": 100.0}, "orbit": {"p_theta": 0.5, "dt": 1e-3, "steps": 2000}},
}


def write_config(tmp_path, name, body):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps({**BASE, **body}))
    return str(path)


def run_cli(args, env=None):
    return main(args, environ=env or {})


# ---------------------------------------------------------------- export

def test_format_float_round_trips():
    for x in (0.1, 1 / 3, 1e-300, 123456789.125, -2.5):
        assert float(format_float(x)) == x
    assert format_float(0.5) == "5e-01"


def test_level_table_csv(natural):
    table = build_spectrum(natural, 1.0, Truncation(0, 2, 1), with_spin=False)
    rows = list(csv.reader(io.StringIO(render(table, "csv"))))
    assert rows[0] == ["m", "l", "spin", "energy"]
    assert [float(r[3]) for r in rows[1:]] == [0.5, 1.5, 2.5]


def test_sweep_json_schema():
    sweep = MagnetizationSweep(np.array([1.0, 2.0]), np.array([1.0, 0.5]), np.array([0.1, -0.2]),
                               "analytic", "dF_db")
    obj = json.loads(render(sweep, "json"))
    assert set(obj) >= {"b", "inv_b", "M", "source", "convention"}
    assert obj["M"] == [0.1, -0.2]


def test_render_rejects_unknown():
    with pytest.raises(ValueError):
        render({"a": 1}, "xml")
    with pytest.raises(TypeError):
        render(object(), "csv")


def test_emit_unwritable(tmp_path):
    with pytest.raises(IoFailure):
        emit({"a": 1.0}, "json", tmp_path / "missing" / "out.json")


def test_emit_is_atomic_and_stable(tmp_path):
    target = tmp_path / "x.json"
    a = emit({"a": 0.1}, "json", target)
    b = emit({"a": 0.1}, "json", target)
    assert a == b == target.read_text()
    assert list(tmp_path.iterdir()) == [target]


# ---------------------------------------------------------------- CLI

def test_spectrum_planar_ladder(tmp_path, capsys):
    cfg = write_config(tmp_path, "s", CONFIGS["spectrum"])
    assert run_cli(["spectrum", "--config", cfg]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [float(r["energy"]) for r in rows] == [0.5, 1.5, 2.5]


def test_certify_passes(tmp_path, capsys):
    cfg = write_config(tmp_path, "c", CONFIGS["certify"])
    assert run_cli(["certify", "--config", cfg, "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["max_rel_dev"] <= 1e-6


@pytest.mark.parametrize("name", sorted(CONFIGS))
def test_thread_count_does_not_change_bytes(tmp_path, name):
    cfg = write_config(tmp_path, name, CONFIGS[name])
    a, b = tmp_path / "a.out", tmp_path / "b.out"
    assert run_cli([name, "--config", cfg, "--threads", "1", "--out", str(a)]) == 0
    assert run_cli([name, "--config", cfg, "--threads", "4", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_dhva_requires_inverse_grid(tmp_path, capsys):
    body = json.loads(json.dumps(CONFIGS["dhva"]))
    body["grid"]["spacing"] = "uniform_b"
    cfg = write_config(tmp_path, "d", body)
    assert run_cli(["dhva", "--config", cfg]) == 1
    event = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert event["name"] == "NonUniformGrid"


def test_unwritable_output(tmp_path, capsys):
    cfg = write_config(tmp_path, "s", CONFIGS["spectrum"])
    assert run_cli(["spectrum", "--config", cfg, "--out", str(tmp_path / "no" / "x.csv")]) == 2
    assert json.loads(capsys.readouterr().err.strip())["name"] == "IoFailure"


def test_unknown_config_key(tmp_path, capsys):
    cfg = write_config(tmp_path, "u", {**CONFIGS["spectrum"], "colour": "blue"})
    assert run_cli(["spectrum", "--config", cfg]) == 1
    assert json.loads(capsys.readouterr().err.strip())["name"] == "UnknownConfigKey"


def test_unknown_nested_key(tmp_path, capsys):
    cfg = write_config(tmp_path, "u", {"point": {"b": 1.0, "B": 2.0}})
    assert run_cli(["spectrum", "--config", cfg]) == 1


def test_invalid_parameter_exit_code(tmp_path, capsys):
    cfg = write_config(tmp_path, "p", {**CONFIGS["spectrum"], "params": {"e": -1.0}})
    assert run_cli(["spectrum", "--config", cfg]) == 1


def test_sweep_json_from_cli(tmp_path, capsys):
    cfg = write_config(tmp_path, "w", CONFIGS["sweep"])
    assert run_cli(["sweep", "--config", cfg, "--format", "json"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert len(obj["b"]) == len(obj["M"]) == 64
    assert obj["source"] == "analytic"


def test_sign_flag_and_environment(tmp_path, capsys):
    cfg = write_config(tmp_path, "m", CONFIGS["magnetization"])
    run_cli(["magnetization", "--config", cfg])
    plus = json.loads(capsys.readouterr().out)
    run_cli(["magnetization", "--config", cfg], env={"SPHLANDAU_SIGN": "minus_dF_db"})
    env_minus = json.loads(capsys.readouterr().out)
    run_cli(["magnetization", "--config", cfg, "--sign", "minus_dF_db"], env={"SPHLANDAU_SIGN": "dF_db"})
    flag_minus = json.loads(capsys.readouterr().out)
    assert env_minus["M_analytic"] == flag_minus["M_analytic"] == -plus["M_analytic"]
    assert flag_minus["sign_convention"] == "minus_dF_db"


def test_field_flag_overrides_config(tmp_path, capsys):
    cfg = write_config(tmp_path, "s", CONFIGS["spectrum"])
    run_cli(["spectrum", "--config", cfg, "--b", "2.0"])
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [float(r["energy"]) for r in rows] == [1.0, 3.0, 5.0]


def test_default_phase_warns(tmp_path, capsys):
    body = {"point": {"b": 100.0, "beta": 50.0, "nu": 10.0}, "truncation": {"m_max": 1, "l_max": 1}}
    path = tmp_path / "f.json"
    path.write_text(json.dumps(body))
    assert run_cli(["free-energy", "--config", str(path)]) == 0
    events = [json.loads(line) for line in capsys.readouterr().err.strip().splitlines()]
    assert {e.get("switch") for e in events if e["event"] == "warning"} == {"phase", "zeeman"}


def test_invalid_convention_value(tmp_path, capsys):
    cfg = write_config(tmp_path, "s", CONFIGS["spectrum"])
    assert run_cli(["spectrum", "--config", cfg], env={"SPHLANDAU_PHASE": "sideways"}) == 1


def test_orbit_chart_exit_status(tmp_path, capsys):
    body = {"point": {"b": 0.01}, "orbit": {"p_theta": 5.0, "p_phi": 0.01 * np.pi / 2, "steps": 5000}}
    cfg = write_config(tmp_path, "o", body)
    assert run_cli(["orbit", "--config", cfg, "--out", str(tmp_path / "o.csv")]) == 2
    assert (tmp_path / "o.csv").exists()


def test_orbit_reports_confinement(tmp_path, capsys):
    cfg = write_config(tmp_path, "o", CONFIGS["orbit"])
    assert run_cli(["orbit", "--config", cfg, "--out", str(tmp_path / "o.csv")]) == 0
    event = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert event["event"] == "confinement" and event["holds"] is True
    header = (tmp_path / "o.csv").read_text().splitlines()[0]
    assert header == "t,theta,phi,p_theta,p_phi,energy"


def test_missing_field_value(tmp_path, capsys):
    cfg = write_config(tmp_path, "m", {"truncation": {"m_max": 0, "l_max": 1}})
    assert run_cli(["spectrum", "--config", cfg]) == 1
