import json

import pytest

from pobsim.cli import main
from pobsim.presets import builtin_presets

TINY = """\
protocol: paired
n_validators: 10
name: cli-tiny
epochs: 15
trials: 2
roster:
  - {range: [9, 10], kind: stealth, params: {fraud_rate: 0.2, fraud_value: 10.0}}
"""


@pytest.fixture()
def tiny_config(tmp_path):
    path = tmp_path / "tiny.yaml"
    path.write_text(TINY)
    return path


class TestCli:
    def test_list_presets(self, capsys):
        assert main(["list-presets"]) == 0
        out = capsys.readouterr().out
        names = [line.split()[0] for line in out.strip().splitlines()]
        assert len(names) == 10
        assert "case-a-stealth" in names and "ic-check" in names

    def test_run_writes_outputs(self, tiny_config, tmp_path):
        out = tmp_path / "out"
        assert main(["run", str(tiny_config), "--out", str(out)]) == 0
        assert (out / "trials.csv").exists()
        assert (out / "summary.json").exists()

    def test_run_with_overrides(self, tiny_config, tmp_path):
        out = tmp_path / "out"
        assert main(["run", str(tiny_config), "--out", str(out),
                     "--trials", "1", "--epochs", "5", "--seed", "9"]) == 0
        rows = (out / "trials.csv").read_text().splitlines()
        assert len(rows) == 1 + 2  # header + pob + pos

    def test_config_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.yaml"
        bad.write_text("protocol: pob\nn_validators: 10\nrho: 7\n")
        assert main(["run", str(bad), "--out", str(tmp_path / "o")]) == 1

    def test_missing_file_is_io_error(self, tmp_path):
        assert main(["run", str(tmp_path / "nope.yaml")]) == 2

    def test_unknown_preset(self):
        assert main(["preset", "case-z"]) == 1

    def test_preset_smoke(self, tmp_path):
        out = tmp_path / "preset-out"
        code = main(["preset", "case-a-stealth", "--out", str(out),
                     "--trials", "1", "--epochs", "10"])
        assert code == 0
        assert (out / "trials.csv").exists()

    def test_replay_smoke(self, tiny_config, tmp_path):
        trace = tmp_path / "trace.txt"
        lines = [f"{h},v{h % 10:04d},propose-block,1.0,1.0,0.9,0" for h in range(8)]
        trace.write_text("\n".join(lines) + "\n")
        out = tmp_path / "replay-out"
        assert main(["replay", str(trace), str(tiny_config), "--out", str(out),
                     "--trials", "1"]) == 0
        assert (out / "trials.csv").exists()

    def test_replay_bad_trace(self, tiny_config, tmp_path):
        trace = tmp_path / "trace.txt"
        trace.write_text("0,v0000,propose-block,1.0\n")
        assert main(["replay", str(trace), str(tiny_config)]) == 1

    def test_sweep_command(self, tmp_path):
        cfg = tmp_path / "sweep.yaml"
        cfg.write_text(TINY.replace("protocol: paired", "protocol: pob")
                       + "sweep:\n  rho: [0.5, 0.9]\n")
        out = tmp_path / "sweep-out"
        assert main(["sweep", str(cfg), "--out", str(out), "--trials", "1",
                     "--epochs", "5"]) == 0
        assert (out / "sweep.csv").exists()

    def test_ic_check_command(self, tmp_path, capsys):
        cfg = tmp_path / "ic.yaml"
        cfg.write_text(TINY.replace("protocol: paired", "protocol: pob"))
        out = tmp_path / "ic-out"
        assert main(["ic-check", str(cfg), "--out", str(out), "--epochs", "10",
                     "--trials", "1"]) == 0
        report = json.loads((out / "ic.json").read_text())
        assert "ic_holds" in report
        assert "ic-check:" in capsys.readouterr().out


class TestPresetLibrary:
    def test_count_and_names(self):
        presets = builtin_presets()
        assert len(presets) == 10
        expected = {
            "case-a-stealth", "case-a-sybil", "case-b-fairness-100",
            "case-b-fairness-1000", "case-c-replay", "case-d-adaptive-sybil",
            "case-d-long-range", "case-d-griefing", "case-e-sweep", "ic-check",
        }
        assert set(presets) == expected

    def test_case_b_presets_differ_only_in_network_size(self):
        import dataclasses

        presets = builtin_presets()
        small = presets["case-b-fairness-100"].build()
        large = presets["case-b-fairness-1000"].build()
        assert small.n_validators == 100 and large.n_validators == 1000
        rescaled = dataclasses.replace(
            large, n_validators=small.n_validators, name=small.name,
        )
        assert rescaled == small

    def test_all_presets_validate(self):
        for preset in builtin_presets().values():
            cfg = preset.build()
            cfg.validate_runtime()
