"""Config round-trips, output formats, and the command-line surface."""

import json

import numpy as np
import pytest

from doublefano import (ConfigError, config_from_preset, get_preset,
                        parse_config, preset_names, serialize_config)
from doublefano.cli import main
from doublefano.io import read_columns

MINIMAL = """
[atom]
omega1 = 0.5
omega2 = 0.5
gamma1 = 0.5
gamma2 = 0.5

[field]
omega_laser = 1.0
b = 0.1
a0 = 0.2
"""


# --- config parsing -------------------------------------------------------

def test_minimal_config_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.atom.q_infinite
    assert cfg.mode == "analytic"
    assert cfg.grid.n_points == 601
    assert cfg.output.format == "csv"


def test_roundtrip_minimal():
    cfg = parse_config(MINIMAL)
    assert parse_config(serialize_config(cfg)) == cfg


@pytest.mark.parametrize("name", preset_names())
@pytest.mark.parametrize("mode", ["analytic", "oracle", "both", "sweep"])
def test_roundtrip_every_preset(name, mode):
    cfg = config_from_preset(get_preset(name), mode=mode)
    assert parse_config(serialize_config(cfg)) == cfg


def test_unknown_keys_are_hard_errors():
    with pytest.raises(ConfigError, match="atom.gamma3"):
        parse_config(MINIMAL.replace("gamma2 = 0.5", "gamma2 = 0.5\ngamma3 = 1.0"))
    with pytest.raises(ConfigError, match="config.extra"):
        parse_config(MINIMAL + "\n[extra]\nx = 1\n")
    with pytest.raises(ConfigError, match="grid.step"):
        parse_config(MINIMAL + "\n[grid]\nomega_min = -5.0\nomega_max = 5.0\nstep = 0.1\n")


def test_invalid_values_rejected():
    with pytest.raises(ConfigError):
        parse_config(MINIMAL.replace("gamma1 = 0.5", "gamma1 = -1.0"))
    with pytest.raises(ConfigError):
        parse_config(MINIMAL.replace('b = 0.1', 'b = "strong"'))
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "\n[run]\nmode = \"telepathy\"\n")
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "\n[run]\nmode = \"sweep\"\n[run.sweep]\n"
                     "parameter = \"a0\"\nvalues = [0.3, 0.1]\n")
    with pytest.raises(ConfigError):
        parse_config("[field]\nomega_laser = 1.0\n")   # missing [atom]


def test_q_infinite_conflicts_with_finite_q():
    text = MINIMAL.replace("[atom]", "[atom]\nq_infinite = true\nq1 = 10.0\nq2 = 10.0")
    with pytest.raises(ConfigError):
        parse_config(text)


def test_sweep_section_requires_sweep_mode():
    text = MINIMAL + "\n[run]\nmode = \"analytic\"\n[run.sweep]\nparameter = \"b\"\n"
    with pytest.raises(ConfigError):
        parse_config(text)


# --- CLI ------------------------------------------------------------------

def _write_config(tmp_path, extra="", name="run.toml"):
    path = tmp_path / name
    path.write_text(MINIMAL + extra)
    return str(path)


def _small_grid(n=51):
    return f"\n[grid]\nomega_min = -5.0\nomega_max = 6.0\nn_points = {n}\n"


def test_cli_spectrum_csv(tmp_path, capsys):
    cfg = _write_config(tmp_path, _small_grid())
    out = str(tmp_path / "spec.csv")
    assert main(["spectrum", "--config", cfg, "--out", out]) == 0
    columns, rows = read_columns(out)
    assert columns == ("omega", "w_analytic")
    assert len(rows) == 51
    header = open(out).read().split("omega,")[0]
    assert "config:" in header and "omega_laser" in header


def test_cli_spectrum_json_lines(tmp_path):
    cfg = _write_config(tmp_path, _small_grid())
    out = str(tmp_path / "spec.jsonl")
    assert main(["spectrum", "--config", cfg, "--out", out,
                 "--format", "json-lines"]) == 0
    with open(out) as fh:
        header = json.loads(fh.readline())["header"]
        assert header["columns"] == ["omega", "w_analytic"]
        first = json.loads(fh.readline())
        assert set(first) == {"omega", "w_analytic"}


def test_cli_byte_identical_reruns(tmp_path):
    cfg = _write_config(tmp_path, _small_grid())
    out = str(tmp_path / "rerun.csv")
    outs = []
    for _ in range(2):
        assert main(["spectrum", "--config", cfg, "--out", out,
                     "--no-timestamp", "--seedless-deterministic"]) == 0
        outs.append(open(out, "rb").read())
    assert outs[0] == outs[1]


def test_cli_timestamp_changes_output(tmp_path):
    cfg = _write_config(tmp_path, _small_grid())
    out = str(tmp_path / "ts.csv")
    assert main(["spectrum", "--config", cfg, "--out", out]) == 0
    assert "timestamp:" in open(out).read()


def test_cli_sweep(tmp_path):
    extra = _small_grid() + ("\n[run]\nmode = \"sweep\"\n[run.sweep]\n"
                             "parameter = \"a0\"\nvalues = [0.1, 0.2]\n")
    cfg = _write_config(tmp_path, extra)
    out = str(tmp_path / "sweep.csv")
    assert main(["sweep", "--config", cfg, "--out", out]) == 0
    columns, rows = read_columns(out)
    assert columns == ("param_value", "omega", "w")
    assert sorted({r[0] for r in rows}) == [0.1, 0.2]
    assert len(rows) == 2 * 51


def test_cli_oracle(tmp_path):
    extra = ("\n[oracle]\nn_points = 81\n")
    cfg = _write_config(tmp_path, extra)
    out = str(tmp_path / "oracle.csv")
    assert main(["oracle", "--config", cfg, "--out", out]) == 0
    columns, rows = read_columns(out)
    assert columns == ("omega", "w_oracle")
    assert len(rows) == 81


def test_cli_preset_listing(capsys):
    assert main(["presets"]) == 0
    out = capsys.readouterr().out
    for name in preset_names():
        assert name in out


def test_cli_preset_dump_is_parseable(capsys):
    assert main(["presets", "--preset", "fig4"]) == 0
    out = capsys.readouterr().out
    toml_text = "\n".join(ln for ln in out.splitlines() if not ln.startswith("#"))
    cfg = parse_config(toml_text)
    assert cfg.atom.omega2 == 7.5


def test_cli_config_errors_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text(MINIMAL + "\n[atom]\ntypo_key = 1.0\n".replace("[atom]\n", ""))
    assert main(["spectrum", "--config", str(bad)]) == 1
    assert main(["spectrum", "--config", str(tmp_path / "missing.toml")]) == 1
    assert main(["spectrum", "--preset", "fig999"]) == 1


def test_cli_numerical_failure_exits_2(tmp_path, capsys):
    # force the oracle to blow up: absurdly large fixed step
    extra = "\n[oracle]\nn_points = 31\ndt = 5.0\nt_final = 100.0\n"
    cfg = _write_config(tmp_path, extra)
    assert main(["oracle", "--config", cfg,
                 "--out", str(tmp_path / "x.csv")]) == 2
    assert "numerical failure" in capsys.readouterr().err


def test_cli_plotscript(tmp_path):
    cfg = _write_config(tmp_path, _small_grid())
    out = str(tmp_path / "spec.csv")
    assert main(["spectrum", "--config", cfg, "--out", out]) == 0
    assert main(["plotscript", out]) == 0
    script = tmp_path / "spec.plot.py"
    assert script.exists()
    compile(script.read_text(), str(script), "exec")   # must be valid python
    assert main(["plotscript", str(tmp_path / "nope.csv")]) == 1


def test_cli_both_mode(tmp_path):
    extra = _small_grid() + ("\n[oracle]\nn_points = 81\n"
                             "\n[run]\nmode = \"both\"\n")
    cfg = _write_config(tmp_path, extra)
    out = str(tmp_path / "both.csv")
    assert main(["spectrum", "--config", cfg, "--out", out]) == 0
    columns, rows = read_columns(out)
    assert columns == ("omega", "w_analytic", "w_oracle")


def test_output_float_fidelity(tmp_path):
    cfg = _write_config(tmp_path, _small_grid(11))
    for fmt, name in (("csv", "f.csv"), ("json-lines", "f.jsonl")):
        out = str(tmp_path / name)
        assert main(["spectrum", "--config", cfg, "--out", out,
                     "--format", fmt, "--no-timestamp"]) == 0
        _, rows = read_columns(out)
        grid = np.linspace(-5.0, 6.0, 11)
        assert [r[0] for r in rows] == pytest.approx(list(grid), abs=0.0)
