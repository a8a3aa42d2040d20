import json

import pytest

from dgauge.cli import main


def run_cli(*args):
    return main(list(args))


class TestRun:
    def test_tuning_run_writes_seven_method_report(self, tmp_path, capsys):
        code = run_cli(
            "run", "--scenario", "tuning", "--seed", "7", "--out", str(tmp_path)
        )
        assert code == 0
        doc = json.loads((tmp_path / "report.json").read_text())
        assert len(doc["methods"]) == 7
        assert doc["seed"] == 7
        assert (tmp_path / "report.csv").exists()
        assert (tmp_path / "report.svg").exists()
        out = capsys.readouterr().out
        assert "svd-8" in out

    def test_repeat_run_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert run_cli("run", "--scenario", "tuning", "--seed", "3", "--out", str(a)) == 0
        assert run_cli("run", "--scenario", "tuning", "--seed", "3", "--out", str(b)) == 0
        assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()

    def test_parallel_matches_serial(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run_cli("run", "--scenario", "tuning", "--seed", "3", "--out", str(a))
        run_cli(
            "run", "--scenario", "tuning", "--seed", "3", "--parallel", "8",
            "--out", str(b),
        )
        assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()

    def test_bad_scenario_exits_2(self, tmp_path, capsys):
        code = run_cli("run", "--scenario", "bogus", "--out", str(tmp_path))
        capsys.readouterr()
        assert code == 2

    def test_figure1_run(self, tmp_path, capsys):
        code = run_cli(
            "run", "--scenario", "figure1", "--seed", "1", "--out", str(tmp_path)
        )
        assert code == 0
        assert (tmp_path / "quadrants.json").exists()
        assert not (tmp_path / "report.svg").exists()
        assert "mse" in capsys.readouterr().out

    def test_runtime_failure_exits_1(self, tmp_path, capsys):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"methods": ["identity", "svd-99"]}))
        code = run_cli(
            "run", "--scenario", "tuning", "--config", str(config),
            "--out", str(tmp_path),
        )
        capsys.readouterr()
        assert code == 1  # rank out of range surfaces at runtime

    def test_env_seed_default_and_flag_priority(self, tmp_path, monkeypatch):
        monkeypatch.setenv("DGAUGE_SEED", "11")
        run_cli("run", "--scenario", "figure1", "--out", str(tmp_path / "env"))
        doc = json.loads((tmp_path / "env" / "report.json").read_text())
        assert doc["seed"] == 11
        run_cli(
            "run", "--scenario", "figure1", "--seed", "4",
            "--out", str(tmp_path / "flag"),
        )
        doc = json.loads((tmp_path / "flag" / "report.json").read_text())
        assert doc["seed"] == 4

    def test_bad_env_seed_exits_2(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("DGAUGE_SEED", "pancake")
        code = run_cli("run", "--scenario", "figure1", "--out", str(tmp_path))
        capsys.readouterr()
        assert code == 2


class TestConfig:
    def test_unknown_key_exits_2_naming_key(self, tmp_path, capsys):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"wibble": 3}))
        code = run_cli(
            "run", "--scenario", "tuning", "--config", str(config),
            "--out", str(tmp_path),
        )
        err = capsys.readouterr().err
        assert code == 2
        assert "wibble" in err

    def test_type_error_exits_2_naming_key(self, tmp_path, capsys):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"sigma": "high"}))
        code = run_cli(
            "run", "--scenario", "tuning", "--config", str(config),
            "--out", str(tmp_path),
        )
        err = capsys.readouterr().err
        assert code == 2
        assert "sigma" in err

    def test_config_overrides_apply(self, tmp_path):
        config = tmp_path / "cfg.json"
        config.write_text(
            json.dumps({"measurements": 5, "sigma": 0.3, "methods": ["identity"]})
        )
        code = run_cli(
            "run", "--scenario", "tuning", "--config", str(config),
            "--out", str(tmp_path),
        )
        assert code == 0
        doc = json.loads((tmp_path / "report.json").read_text())
        assert doc["m"] == 5
        assert [m["name"] for m in doc["methods"]] == ["identity"]

    def test_flag_beats_config(self, tmp_path):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"seed": 9, "methods": ["identity"]}))
        run_cli(
            "run", "--scenario", "tuning", "--seed", "2",
            "--config", str(config), "--out", str(tmp_path),
        )
        doc = json.loads((tmp_path / "report.json").read_text())
        assert doc["seed"] == 2

    def test_method_with_params_in_config(self, tmp_path):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"methods": [["boxcar-3", {"width": 5}], "identity"]}))
        code = run_cli(
            "run", "--scenario", "tuning", "--config", str(config),
            "--out", str(tmp_path),
        )
        assert code == 0
        doc = json.loads((tmp_path / "report.json").read_text())
        assert doc["methods"][0]["params"]["width"] == 5

    def test_missing_config_file_exits_2(self, tmp_path, capsys):
        code = run_cli(
            "run", "--scenario", "tuning", "--config", str(tmp_path / "none.json"),
            "--out", str(tmp_path),
        )
        capsys.readouterr()
        assert code == 2


class TestBaseline:
    def test_m10_value(self, capsys):
        assert run_cli("baseline", "--measurements", "10", "--draws", "200000") == 0
        value = float(capsys.readouterr().out.strip())
        assert abs(value - 0.7027) < 0.01

    def test_m30_value(self, capsys):
        assert run_cli("baseline", "--measurements", "30", "--draws", "200000") == 0
        value = float(capsys.readouterr().out.strip())
        assert abs(value - 0.6830) < 0.01

    def test_m1_exits_2(self, capsys):
        code = run_cli("baseline", "--measurements", "1")
        capsys.readouterr()
        assert code == 2

    def test_output_is_four_decimals(self, capsys):
        run_cli("baseline", "--measurements", "5", "--draws", "20000")
        out = capsys.readouterr().out.strip()
        assert len(out.split(".")[1]) == 4


class TestReportCommand:
    @pytest.fixture()
    def run_dir(self, tmp_path):
        run_cli("run", "--scenario", "tuning", "--seed", "5", "--out", str(tmp_path))
        return tmp_path

    def test_svg_regeneration_is_identical(self, run_dir, capsys):
        original = (run_dir / "report.svg").read_bytes()
        (run_dir / "report.svg").unlink()
        code = run_cli("report", "--in", str(run_dir), "--format", "svg")
        capsys.readouterr()
        assert code == 0
        assert (run_dir / "report.svg").read_bytes() == original

    def test_csv_regeneration_is_identical(self, run_dir, capsys):
        original = (run_dir / "report.csv").read_bytes()
        (run_dir / "report.csv").unlink()
        code = run_cli("report", "--in", str(run_dir), "--format", "csv")
        capsys.readouterr()
        assert code == 0
        assert (run_dir / "report.csv").read_bytes() == original

    def test_markdown_table(self, run_dir, capsys):
        code = run_cli("report", "--in", str(run_dir), "--format", "md")
        out = capsys.readouterr().out
        assert code == 0
        rows = [l for l in out.splitlines() if l.startswith("| ") and "---" not in l]
        assert len(rows) == 1 + 7
        assert (run_dir / "report.md").exists()

    def test_missing_report_exits_2(self, tmp_path, capsys):
        code = run_cli("report", "--in", str(tmp_path))
        capsys.readouterr()
        assert code == 2


class TestUsage:
    def test_no_command_exits_2(self, capsys):
        code = run_cli()
        capsys.readouterr()
        assert code == 2

    def test_unknown_flag_exits_2(self, capsys):
        code = run_cli("baseline", "--measurements", "5", "--frobnicate")
        capsys.readouterr()
        assert code == 2
