import csv
import json
import os
import subprocess
import sys

import pytest

from sisfront.cli import NUMERIC_DEFAULTS, main
from sisfront.export import config_hash, fmt
from sisfront.model import reference_example


@pytest.fixture
def config(tmp_path):
    def make(**changes):
        data = {**reference_example().to_dict(), **changes}
        path = tmp_path / f"cfg{len(list(tmp_path.glob('cfg*')))}.json"
        path.write_text(json.dumps(data))
        return str(path)

    return make


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_fmt_round_trips():
    assert fmt(0.1) == "0.10000000000000001"
    assert float(fmt(2 / 3)) == 2 / 3
    assert fmt(None) == "" and fmt(3) == "3" and fmt(True) == "true"


def test_simulate_artifacts(config, tmp_path):
    out = tmp_path / "sim"
    code = main(["simulate", "--config", config(), "--out", str(out), "--t-end", "0.5",
                 "--output-stride", "25", "--n", "64"])
    assert code == 0
    rows = read_csv(out / "fronts.csv")
    assert rows[0] == ["t", "g", "h", "gdot", "hdot", "supI", "R0F"]
    assert len(rows) == 1 + 51
    assert rows[1][0] == "0" and rows[1][6] != ""
    profiles = sorted(p for p in os.listdir(out) if p.startswith("profile_"))
    assert profiles == ["profile_0.25.csv", "profile_0.5.csv", "profile_0.csv"]
    prof = read_csv(out / "profile_0.5.csv")
    assert prof[0] == ["x", "I"] and prof[1][1] == "0" and prof[-1][1] == "0"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config_hash"] == config_hash(manifest["config"])
    assert {a["path"] for a in manifest["artifacts"]} == {"fronts.csv", *profiles}


def test_outputs_are_byte_identical(config, tmp_path):
    cfg = config()
    for name in ("a", "b"):
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / name), "--t-end", "0.3",
                     "--n", "48", "--output-stride", "10"]) == 0
    files = sorted(os.listdir(tmp_path / "a"))
    assert files == sorted(os.listdir(tmp_path / "b"))
    for f in files:
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_r0_interval_reports_cross_check(config, tmp_path, capsys):
    out = tmp_path / "r0"
    assert main(["r0", "--config", config(), "--out", str(out), "--interval", "-1", "1"]) == 0
    text = capsys.readouterr().out
    assert "sign check ok" in text
    rows = read_csv(out / "r0.csv")
    assert rows[0] == ["g", "h", "R0", "lambda0"]
    r0, lam = float(rows[1][2]), float(rows[1][3])
    assert r0 < 1 and lam > 0


def test_semiwave_and_equilibrium(config, tmp_path):
    out = tmp_path / "sw"
    assert main(["semiwave", "--config", config(), "--out", str(out), "--profile"]) == 0
    rows = read_csv(out / "semiwave.csv")
    assert [r[0] for r in rows[1:]] == ["rightward", "leftward"]
    assert os.path.exists(out / "semiwave_profile_leftward.csv")
    out = tmp_path / "eq"
    assert main(["equilibrium", "--config", config(), "--out", str(out), "--L", "20"]) == 0
    rows = read_csv(out / "equilibrium.csv")
    assert rows[0] == ["x", "Istar"] and rows[1] == ["-20", "1.5"]


def test_classify_short_horizon_is_inconclusive(config, tmp_path):
    out = tmp_path / "cl"
    code = main(["classify", "--config", config(mu=1.0), "--out", str(out), "--t-end", "1", "--n", "64"])
    assert code == 3
    verdict = json.loads((out / "verdict.json").read_text())
    assert verdict["verdict"] == "undetermined"


def test_invalid_model_exits_one_with_field_message(config, tmp_path, capsys):
    code = main(["simulate", "--config", config(alpha=8.0), "--out", str(tmp_path / "x")])
    assert code == 1
    assert "small advection" in capsys.readouterr().err


def test_malformed_and_unknown_config(tmp_path, config):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["simulate", "--config", str(bad)]) == 1
    assert main(["simulate", "--config", config(colour="red")]) == 1
    assert main(["simulate", "--config", config(beta_expr="4 + import")]) == 1
    assert main(["simulate", "--config", config(dt=-1)]) == 1


def test_numerics_from_config(config, tmp_path):
    out = tmp_path / "cfgnum"
    assert main(["simulate", "--config", config(t_end=0.2, n=32, output_stride=100), "--out", str(out)]) == 0
    rows = read_csv(out / "fronts.csv")
    assert float(rows[-1][0]) == pytest.approx(0.2)


def test_unknown_flag_exits_one(config):
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--config", config(), "--bogus"])
    assert info.value.code == 1


def test_help_lists_defaults():
    proc = subprocess.run([sys.executable, "-m", "sisfront", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for key in NUMERIC_DEFAULTS:
        assert f"{key}=" in proc.stdout


def test_module_entry_point_exit_code(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "sisfront", "simulate", "--config", str(tmp_path / "missing.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    assert "cannot read config" in proc.stderr
