import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from crosskerr.cli import main
from crosskerr.config import ConfigError, parse_scenarios
from crosskerr.states import build_ckncs, state_from_csv


def write(tmp_path, text, name="scen.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


STATE_INI = """
[scenario small]
kind = state
N = 4
mu_abs = 1
kappa_tilde = 0, 0.5
observables = means, g2, mandel, identity_check
"""

DYN_INI = """
[scenario dyn]
N = 6
mu_abs = 0.8
kappa_tilde = 0.1
g_ratio = 1, 2
tau_max = 10
tau_points = 201
observables = occupations, means, g2, mandel, squeezing, entropy
"""


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_state_verb_writes_statistics_and_states(tmp_path, capsys):
    cfg = write(tmp_path, STATE_INI)
    out = tmp_path / "out"
    assert main(["state", "--config", str(cfg), "--out", str(out)]) == 0
    rows = read_csv(out / "small_static.csv")
    assert "mean_a" in rows[0] and "g2" in rows[0]
    assert len(rows) == 3
    states = sorted((out / "states").glob("small_state_*.csv"))
    assert len(states) == 2
    back = state_from_csv(states[0].read_text())
    assert back == build_ckncs(N=4, mu=1.0, kappa_tilde=0.0)
    manifest = json.loads((out / "small_manifest.json").read_text())
    assert manifest


def test_dynamics_verb(tmp_path):
    cfg = write(tmp_path, DYN_INI)
    out = tmp_path / "out"
    assert main(["dynamics", "--config", str(cfg), "--out", str(out)]) == 0
    names = {p.name for p in out.iterdir()}
    assert any(n.startswith("dyn_occupations_g_ratio=") for n in names)
    assert any(n.startswith("dyn_entropy_") and n.endswith(".csv") for n in names)
    assert "dyn_squeezing.svg" in names


def test_identity_check_verb(tmp_path):
    cfg = write(tmp_path, "[scenario ic]\nN = range(0, 3)\nkappa_tilde = 0\n")
    out = tmp_path / "out"
    assert main(["identity-check", "--config", str(cfg), "--out", str(out)]) == 0
    rows = read_csv(out / "ic_identity.csv")
    # range() is inclusive
    assert [r[0] for r in rows[1:]] == ["0", "1", "2", "3"]
    col = rows[0].index("residual")
    assert all(float(r[col]) < 1e-6 for r in rows[1:])


def test_sweep_long_format(tmp_path):
    cfg = write(tmp_path, DYN_INI.replace("squeezing, entropy", "squeezing").replace("tau_points = 201", "tau_points = 5"))
    out = tmp_path / "out"
    assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    rows = read_csv(out / "dyn_sweep.csv")
    assert rows[0] == ["axis", "axis_value", "tau", "observable", "value"]
    assert {r[0] for r in rows[1:]} == {"g_ratio"}


def test_sweep_without_list_axis_is_rejected(tmp_path, capsys):
    cfg = write(tmp_path, "[scenario one]\nN = 3\n")
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "list-valued axis" in capsys.readouterr().err


def test_missing_field_names_field_and_line(tmp_path, capsys):
    cfg = write(tmp_path, "[scenario broken]\nmu_abs = 1\n")
    assert main(["dynamics", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    err = capsys.readouterr().err
    assert "'N'" in err and "missing" in err
    assert not (tmp_path / "o").exists()


@pytest.mark.parametrize(
    "body, needle",
    [
        ("N = 3\nbogus = 1\n", "unknown field"),
        ("N = 3\nkappa_tilde = -1\n", "kappa_tilde"),
        ("N = 201\n", "N"),
        ("N = 3\ntau_points = 1\n", "tau_points"),
        ("N = 1, 2\nkappa_tilde = 0, 1\n", "only one list-valued axis"),
        ("N = 3\nobservables = identity_check\n", "observables"),
        ("N = 3\nconvention = sideways\n", "convention"),
        ("N = 3\nmu_abs = \n", "empty"),
    ],
)
def test_validation_diagnostics(body, needle):
    with pytest.raises(ConfigError) as info:
        parse_scenarios("[scenario s]\n" + body, "x.ini")
    assert needle in str(info.value)
    assert str(info.value).startswith("x.ini")


def test_unknown_section_and_duplicates():
    with pytest.raises(ConfigError, match="unknown section"):
        parse_scenarios("[scenario a]\nN = 1\n[other]\nx = 1\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_scenarios("[scenario a]\nN = 1\n[scenario b]\nname = a\nN = 2\n")
    with pytest.raises(ConfigError, match="no \\[scenario"):
        parse_scenarios("")


def test_list_forms():
    (sc,) = parse_scenarios("[scenario s]\nN = 3\nkappa_tilde = linspace(0, 1, 5)\n")
    assert sc.axis == "kappa_tilde"
    np.testing.assert_allclose(sc.axis_values, np.linspace(0, 1, 5))
    (sc,) = parse_scenarios("[scenario s]\nN = range(2, 4)\n")
    assert sc.axis_values == [2, 3, 4]


def test_missing_config_file(tmp_path, capsys):
    assert main(["state", "--config", str(tmp_path / "nope.ini"), "--out", str(tmp_path)]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_convention_override(tmp_path):
    cfg = write(tmp_path, "[scenario c]\nkind = state\nN = 3\nmu_abs = 1\nkappa_tilde = 1\n")
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["state", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["state", "--config", str(cfg), "--out", str(b), "--convention", "literal"]) == 0
    assert (a / "c_static.csv").read_text() != (b / "c_static.csv").read_text()


def test_threads_do_not_change_output(tmp_path):
    cfg = write(tmp_path, DYN_INI)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["dynamics", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["dynamics", "--config", str(cfg), "--out", str(b), "--threads", "3"]) == 0
    for p in a.iterdir():
        assert p.read_bytes() == (b / p.name).read_bytes()


def test_module_entry_point(tmp_path):
    cfg = write(tmp_path, "[scenario m]\nkind = state\nN = 2\n")
    res = subprocess.run([sys.executable, "-m", "crosskerr", "state", "--config", str(cfg), "--out", str(tmp_path / "o")],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert "m_static.csv" in res.stdout
