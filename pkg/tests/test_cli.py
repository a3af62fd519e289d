import json
import subprocess
import sys

import pytest

from linkedtwist.cli import ConfigError, main, parse_config, run

SMALL = {
    "simulate": "system = cat\nseed = 1\niterations = 50\n",
    "portrait": "system = planar\nseed = 1\niterations = 5\n",
    "lyapunov": "system = cat\nseed = 1\niterations = 2000\n",
    "cones": "system = toral\nseed = 1\nj = 2\nk = 3\nsamples = 20\n",
    "bounds": "system = planar\nseed = 1\ngrid = 100\nrefine = 1\n",
    "horseshoe": "system = toral\nseed = 1\nj = 2\nk = 3\nperiod = 3\n",
    "semiconj": "system = sphere\nseed = 1\nsamples = 500\n",
    "mixing": "system = cat\nseed = 1\nsamples = 5000\nn_max = 5\n",
    "returns": "system = generalized\nseed = 1\ndepth = 3\nhorizon = 2000\n",
}


def test_parse_config_reports_every_issue_with_line_numbers():
    with pytest.raises(ConfigError) as exc:
        parse_config("system = cat\nbogus = 1\nseed = x\nnot a pair\n")
    msgs = [str(i) for i in exc.value.issues]
    assert "line 2: key 'bogus': unknown key" in msgs
    assert any(m.startswith("line 3: key 'seed'") for m in msgs)
    assert any(m.startswith("line 4:") for m in msgs)


def test_missing_required_and_duplicate_keys():
    with pytest.raises(ConfigError) as exc:
        parse_config("system = cat\nsystem = toral\n")
    msgs = [str(i) for i in exc.value.issues]
    assert any("duplicate key" in m for m in msgs)
    assert any("seed" in m and "missing" in m for m in msgs)


def test_planar_radius_constraint_message():
    with pytest.raises(ConfigError) as exc:
        parse_config("system = planar\nseed = 0\nr1 = 3\n")
    assert str(exc.value.issues[0]) == "line 3: key 'r1': r1 violates 2 ≤ r0 < r1 ≤ √7"


def test_parameters_of_other_systems_rejected():
    with pytest.raises(ConfigError):
        parse_config("system = cat\nseed = 0\nr0 = 2\n")


def test_overrides_replace_file_values():
    cfg = parse_config("system = cat\nseed = 1\n", {"seed": "9", "iterations": "7"})
    assert cfg.seed == 9 and cfg.get("iterations", None) == 7


def test_wrong_system_for_subcommand():
    with pytest.raises(ConfigError):
        run("semiconj", parse_config("system = cat\nseed = 0\n"))
    with pytest.raises(ValueError):
        run("horseshoe", parse_config("system = cat\nseed = 0\n"))


@pytest.mark.parametrize("sub", sorted(SMALL))
def test_subcommands_are_byte_identical_on_rerun(sub, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(SMALL[sub])
    outs = []
    for i in range(2):
        out = tmp_path / f"out{i}"
        assert main([sub, "--config", str(cfg), "--output", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1] and outs[0]
    assert b"\r\n" not in outs[0]


def test_json_report_shape(tmp_path):
    out = tmp_path / "h.json"
    assert main(["horseshoe", "--system", "toral", "--seed", "0", "--j", "2", "--k", "3",
                 "--period", "2", "--output", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["subcommand"] == "horseshoe" and doc["pass"] is True and doc["result"]["N"] == 2


def test_csv_format_option(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["simulate", "--system", "cat", "--seed", "0", "--iterations", "2", "--point", "0.1,0.2",
                 "--output", str(out)]) == 0
    assert out.read_text().splitlines()[:2] == ["seed_id,iterate,x,y", "0,0,0.10000000000000001,0.20000000000000001"]


def test_exit_codes(capsys):
    assert main(["simulate", "--system", "planar", "--seed", "0", "--r1", "3"]) == 2
    assert "r1 violates" in capsys.readouterr().err
    assert main(["simulate", "--no-such-flag", "1"]) == 2
    assert main(["nonsense"]) == 2
    assert main(["returns", "--system", "toral", "--seed", "0", "--point", "0.1,0.1"]) == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "linkedtwist", "simulate", "--system", "cat", "--seed", "0",
                          "--iterations", "1"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("seed_id,iterate,x,y")
