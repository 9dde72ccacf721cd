import json

import pytest

from plapvar import cli
from plapvar.cli import ConfigError, load_config


def write(tmp_path, cfg):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return str(path)


BVP_BASE = {
    "problem": {"T": 2, "q": 2.0, "a": 1.0, "V": [1.0, 1.0], "lambda": 12.0},
    "nonlinearity": {"family": "polynomial", "coeffs": [0.0, 1.0, 0.0, -1.0]},
    "solver": {"multistart_count": 12},
}


class TestLoadConfig:
    def test_minimal_certify_config(self):
        cfg = load_config(
            json.dumps(
                {
                    "problem": {"T": 8, "q": 3.0, "a": 10.0, "V": list(range(1, 9))},
                    "nonlinearity": {"family": "example2"},
                    "c": 1.0,
                    "d": 14.0,
                }
            )
        )
        assert cfg["solver"]["seed"] == 0  # defaults applied

    def test_invalid_json(self):
        with pytest.raises(ConfigError, match="invalid JSON"):
            load_config("{nope")

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="unknown key 'extra'"):
            load_config(json.dumps({"extra": 1}))

    def test_unknown_section_key_names_path(self):
        with pytest.raises(ConfigError, match="problem.Tee"):
            load_config(json.dumps({"problem": {"Tee": 8}}))

    def test_exponent_below_one_rejected(self):
        with pytest.raises(ConfigError, match="Exponent must exceed 1"):
            load_config(json.dumps({"problem": {"T": 2, "q": 0.5}}))

    def test_exponent_ordering_enforced(self):
        with pytest.raises(ConfigError, match="homoclinic.q"):
            load_config(
                json.dumps({"homoclinic": {"p1": 2.0, "p2": 2.0, "q": 3.0}})
            )

    def test_witness_needs_subcritical_p(self):
        with pytest.raises(ConfigError, match="witness.p"):
            load_config(
                json.dumps(
                    {
                        "problem": {"T": 2, "q": 2.0},
                        "witness": {"b": 1.0, "p": 2.5},
                    }
                )
            )

    def test_bad_mode(self):
        with pytest.raises(ConfigError, match="'mode'"):
            load_config(json.dumps({"mode": "solve-everything"}))


class TestMain:
    def test_reproduce_example_2(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = cli.main(["reproduce-example-2", "--out", str(out)])
        assert code == 0
        rep = json.loads(out.read_text())
        cert = rep["certificate"]
        assert cert["rho_q_exact"] == "18225/36241"
        assert cert["d1_holds"] and cert["interval_nonempty"]
        flags = {f["id"] for f in rep["discrepancy_flags"]}
        assert "lambda-lower-endpoint" in flags
        assert "boundary-condition-display" in flags
        lam_flag = next(f for f in rep["discrepancy_flags"] if f["id"] == "lambda-lower-endpoint")
        # both the theorem-formula endpoint and the printed value appear
        assert lam_flag["tool_value"] == cert["lambda_lo"]
        assert lam_flag["paper_printed"] != lam_flag["tool_value"]

    def test_reports_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        cfg = write(tmp_path, dict(BVP_BASE, mode="solve-bvp"))
        assert cli.main(["solve-bvp", "--config", cfg, "--out", str(out1), "--seed", "3"]) == 0
        assert cli.main(["solve-bvp", "--config", cfg, "--out", str(out2), "--seed", "3"]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_solve_bvp_report_carries_values_and_residuals(self, tmp_path):
        out = tmp_path / "r.json"
        cfg = write(tmp_path, dict(BVP_BASE, mode="solve-bvp"))
        assert cli.main(["solve-bvp", "--config", cfg, "--out", str(out)]) == 0
        rep = json.loads(out.read_text())
        assert rep["status"] == "ok"
        assert len(rep["points"]) >= 3
        for pt in rep["points"]:
            assert pt["window_lo"] == -1 and pt["window_hi"] == 4
            assert len(pt["values"]) == 6
            assert pt["values"][0] == 0.0 and pt["values"][-1] == 0.0
            assert pt["residual_sup_reverified"] <= 1e-8

    def test_partial_result_exits_two(self, tmp_path):
        cfg = write(
            tmp_path,
            {
                "mode": "solve-bvp",
                "problem": {"T": 3, "q": 2.0, "a": 1.0, "V": [1.0, 1.0, 1.0], "lambda": 0.0},
                "nonlinearity": {"family": "zero"},
                "solver": {"multistart_count": 6},
            },
        )
        out = tmp_path / "r.json"
        code = cli.main(["solve-bvp", "--config", cfg, "--out", str(out)])
        assert code == 2
        rep = json.loads(out.read_text())
        assert rep["status"] == "partial"

    def test_config_error_exits_one(self, tmp_path, capsys):
        cfg = write(tmp_path, {"problem": {"T": 2, "q": 0.5}})
        code = cli.main(["certify", "--config", cfg])
        assert code == 1
        assert "Exponent must exceed 1" in capsys.readouterr().err

    def test_missing_config_exits_one(self, capsys):
        assert cli.main(["certify"]) == 1
        assert "needs --config" in capsys.readouterr().err

    def test_mode_mismatch_exits_one(self, tmp_path, capsys):
        cfg = write(tmp_path, dict(BVP_BASE, mode="certify"))
        assert cli.main(["solve-bvp", "--config", cfg]) == 1

    def test_verify_mode(self, tmp_path):
        out = tmp_path / "v.json"
        assert cli.main(["verify", "--out", str(out), "--seed", "7"]) == 0
        rep = json.loads(out.read_text())
        assert rep["seed"] == 7
        assert all(v["passed"] == v["total"] for v in rep["properties"].values())

    def test_lambda_outside_interval_warns(self, tmp_path):
        cfg = write(
            tmp_path,
            {
                "mode": "solve-bvp",
                "problem": {"T": 8, "q": 3.0, "a": 10.0, "V": list(range(1, 9)), "lambda": 0.5},
                "nonlinearity": {"family": "example2"},
                "c": 1.0,
                "d": 14.0,
                "solver": {"multistart_count": 4, "start_scales": [1.0]},
            },
        )
        out = tmp_path / "r.json"
        cli.main(["solve-bvp", "--config", cfg, "--out", str(out)])
        rep = json.loads(out.read_text())
        assert any("outside the certified interval" in w for w in rep["warnings"])
