import json
import math

import pytest

from hedgerate import ConfigError, ExperimentConfig, PayoffSpec, parse_config
from hedgerate.cli import emit_csv, read_csv, run_command
from hedgerate.config import DEFAULT_N_VALUES


MINIMAL = {"beta": 0.5, "payoff": {"kind": "indicator", "strike": 0.0}}


class TestParseConfig:
    def test_minimal_document_fills_defaults(self):
        config = parse_config(json.dumps(MINIMAL))
        assert config.beta == 0.5
        assert config.payoff == PayoffSpec.indicator(0.0)
        assert config.n_values == DEFAULT_N_VALUES
        assert config.truncation_order == 64
        assert config.n_paths == 100_000
        assert config.horizon == 1.0
        assert config.theta is None

    def test_beta_out_of_range_names_field_and_constraint(self):
        with pytest.raises(ConfigError) as err:
            parse_config(json.dumps({**MINIMAL, "beta": 1.5}))
        assert any("beta" in e and "(0, 1]" in e for e in err.value.errors)

    def test_missing_n_values_defaulted(self):
        config = parse_config(json.dumps(MINIMAL))
        assert config.n_values == (4, 8, 16, 32, 64, 128, 256)

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError) as err:
            parse_config(json.dumps({**MINIMAL, "betaa": 0.5}))
        assert any("betaa" in e for e in err.value.errors)

    def test_unknown_payoff_keys_rejected(self):
        doc = {"beta": 0.5, "payoff": {"kind": "indicator", "K": 0.0}}
        with pytest.raises(ConfigError) as err:
            parse_config(json.dumps(doc))
        assert any("'K'" in e for e in err.value.errors)

    def test_all_failures_collected(self):
        doc = {"beta": -1.0, "n_paths": 0, "seed": -3, "junk": 1}
        with pytest.raises(ConfigError) as err:
            parse_config(json.dumps(doc))
        msgs = "\n".join(err.value.errors)
        assert len(err.value.errors) >= 5
        for needle in ["beta", "n_paths", "seed", "junk", "payoff"]:
            assert needle in msgs

    def test_schema_version_checked(self):
        with pytest.raises(ConfigError) as err:
            parse_config(json.dumps({**MINIMAL, "schema_version": 99}))
        assert any("schema_version" in e for e in err.value.errors)

    def test_invalid_json(self):
        with pytest.raises(ConfigError):
            parse_config("{not json")

    @pytest.mark.parametrize(
        "payoff",
        [
            PayoffSpec.indicator(0.3),
            PayoffSpec.call(-1.0),
            PayoffSpec.pure_hermite(3),
            PayoffSpec.polynomial([1.0, 0.0, 2.0]),
            PayoffSpec.tabulated([-9.0, 0.0, 9.0], [0.0, 1.0, 2.0]),
        ],
    )
    def test_round_trip(self, payoff):
        config = ExperimentConfig(
            beta=0.7,
            payoff=payoff,
            horizon=2.0,
            n_values=(4, 8, 16),
            n_paths=5000,
            seed=42,
            theta=0.45,
            output_path="somewhere",
        )
        assert parse_config(config.to_json()) == config

    def test_n_values_must_increase(self):
        with pytest.raises(ConfigError) as err:
            parse_config(json.dumps({**MINIMAL, "n_values": [8, 4]}))
        assert any("increasing" in e for e in err.value.errors)


class TestCsv:
    def test_empty_records_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        emit_csv([], path, fieldnames=["a", "b"])
        assert path.read_text(encoding="utf-8") == "a,b\n"

    def test_round_trip_is_exact(self, tmp_path):
        rows = [
            {"n": 4, "value": 1.0 / 3.0, "label": "x"},
            {"n": 8, "value": math.pi * 1e-8, "label": "y"},
        ]
        path = tmp_path / "t.csv"
        emit_csv(rows, path)
        back = read_csv(path)
        assert back == rows  # floats parse back bit-for-bit from 17 digits

    def test_decimal_separator_is_dot(self, tmp_path):
        # single column: any comma would be a locale-broken decimal separator
        path = tmp_path / "t.csv"
        emit_csv([{"x": 0.5}], path)
        text = path.read_text(encoding="utf-8")
        assert "0.5" in text and "," not in text
        assert text.endswith("\n")

    def test_io_failure_carries_path_context(self, tmp_path):
        missing = tmp_path / "no" / "such" / "dir" / "x.csv"
        with pytest.raises(RuntimeError, match="x.csv"):
            emit_csv([{"x": 1.0}], missing)

    def test_fieldnames_required_when_empty(self, tmp_path):
        with pytest.raises(ValueError):
            emit_csv([], tmp_path / "x.csv")


@pytest.fixture
def tiny_config(tmp_path):
    doc = {
        "beta": 0.5,
        "payoff": {"kind": "pure_hermite", "degree": 2},
        "truncation_order": 8,
        "n_values": [4, 8, 16],
        "n_paths": 2000,
        "seed": 7,
        "output_path": str(tmp_path / "out"),
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path, doc


class TestRunCommand:
    def test_sweep_outputs(self, tiny_config, capsys):
        path, doc = tiny_config
        assert run_command(["sweep", "--config", str(path)]) == 0
        out_dir = path.parent / "out"
        rows = read_csv(out_dir / "sweep.csv")
        assert list(rows[0].keys()) == ["n", "analytic_error", "mc_error", "mc_std_error"]
        assert [r["n"] for r in rows] == [4, 8, 16]
        summary = json.loads((out_dir / "runs.jsonl").read_text().splitlines()[-1])
        assert "fitted_slope" in summary and "theta_used" in summary
        resolved = json.loads((out_dir / "resolved_config.json").read_text())
        assert resolved["beta"] == 0.5
        parse_config(json.dumps(resolved))  # resolved config is itself valid

    def test_coeffs_indicator(self, tmp_path):
        out = tmp_path / "o"
        rc = run_command(
            ["coeffs", "--beta", "0.5", "--payoff", "indicator", "--strike", "0",
             "--output", str(out)]
        )
        assert rc == 0
        rows = read_csv(out / "coeffs.csv")
        assert list(rows[0].keys()) == ["n", "c_n"]
        assert rows[0] == {"n": 0, "c_n": 0.5}
        assert len(rows) == 65

    def test_oracle_and_simulate(self, tiny_config):
        path, doc = tiny_config
        assert run_command(["oracle", "--config", str(path)]) == 0
        assert run_command(["simulate", "--config", str(path), "--n", "8"]) == 0
        out_dir = path.parent / "out"
        oracle_rows = read_csv(out_dir / "oracle.csv")
        assert [r["n"] for r in oracle_rows] == [4, 8, 16]
        assert all(r["truncation_residual"] == 0.0 for r in oracle_rows)
        sim_rows = read_csv(out_dir / "simulate.csv")
        assert sim_rows[0]["n"] == 8

    def test_fit_reproduces_sweep_slope_bitwise(self, tiny_config, capsys):
        path, doc = tiny_config
        run_command(["sweep", "--config", str(path)])
        out_dir = path.parent / "out"
        sweep_summary = json.loads((out_dir / "runs.jsonl").read_text().splitlines()[-1])
        capsys.readouterr()
        rc = run_command(
            ["fit", "--input", str(out_dir / "sweep.csv"), "--output", str(out_dir)]
        )
        assert rc == 0
        fit_summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert fit_summary["fitted_slope"] == sweep_summary["fitted_slope"]

    def test_report(self, tmp_path):
        out = tmp_path / "r"
        rc = run_command(
            ["report", "--beta", "0.5", "--payoff", "indicator", "--strike", "0",
             "--output", str(out)]
        )
        assert rc == 0
        rows = read_csv(out / "report.csv")
        assert len(rows) == 9
        assert list(rows[0].keys()) == ["theta", "sum_criterion", "integral_criterion"]

    def test_config_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"beta": 2.0, "payoff": {"kind": "indicator"}}))
        assert run_command(["sweep", "--config", str(bad)]) == 2
        assert "beta" in capsys.readouterr().err

    def test_runtime_error_exit_code(self, tmp_path, capsys):
        # constant payoff: sweep refuses to fit a rate
        out = tmp_path / "o"
        bad = tmp_path / "c.json"
        bad.write_text(
            json.dumps(
                {
                    "beta": 0.5,
                    "payoff": {"kind": "polynomial", "coefficients": [1.0]},
                    "n_values": [4, 8, 16],
                    "n_paths": 2000,
                    "output_path": str(out),
                }
            )
        )
        assert run_command(["sweep", "--config", str(bad)]) == 1

    def test_output_dir_env_var(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HEDGERATE_OUTPUT_DIR", str(tmp_path / "envout"))
        rc = run_command(["coeffs", "--beta", "0.5", "--payoff", "indicator"])
        assert rc == 0
        assert (tmp_path / "envout" / "coeffs.csv").exists()

    def test_worker_count_does_not_change_bytes(self, tiny_config):
        path, doc = tiny_config
        out_dir = path.parent / "out"
        run_command(["sweep", "--config", str(path), "--workers", "1"])
        first = (out_dir / "sweep.csv").read_bytes()
        run_command(["sweep", "--config", str(path), "--workers", "4"])
        second = (out_dir / "sweep.csv").read_bytes()
        assert first == second
