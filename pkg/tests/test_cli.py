import json

import pytest

from mvt.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestExactCommands:
    def test_moments_json(self, capsys):
        code, out = run_cli(capsys, "moments", "--family", "gaussian", "--d", "4",
                            "--format", "json", "--no-timestamp")
        assert code == 0
        payload = json.loads(out)
        assert payload["schema"] == 1
        assert payload["moments"][2] == "1 s2 + 1 mu^2"

    def test_matrix_text(self, capsys):
        code, out = run_cli(capsys, "matrix", "--family", "ig", "--d", "3")
        assert code == 0
        assert "1 m0^2" in out

    def test_generators(self, capsys):
        code, out = run_cli(capsys, "generators", "--family", "gamma", "--d", "3",
                            "--format", "json", "--no-timestamp")
        payload = json.loads(out)
        assert code == 0
        assert payload["count"] == 1
        assert payload["generators"] == ["-1 m0 m1 m3 + 2 m0 m2^2 - 1 m1^2 m2"]

    def test_verify_passes(self, capsys):
        code, _ = run_cli(capsys, "verify", "--family", "ig", "--d", "8")
        assert code == 0

    def test_verify_all_families_small(self, capsys):
        for fam in ("ig", "gamma", "gaussian", "exp", "chi2", "cum-ig", "cum-gamma"):
            code, _ = run_cli(capsys, "verify", "--family", fam, "--d", "4")
            assert code == 0, fam

    def test_hilbert(self, capsys):
        code, out = run_cli(capsys, "hilbert", "--family", "ig", "--d", "4",
                            "--format", "json", "--no-timestamp")
        payload = json.loads(out)
        assert code == 0
        assert payload["numerator"] == [1, 2, 3, 3]
        assert payload["degree"] == 9
        assert payload["groebner_check"]["pass"]

    def test_singular(self, capsys):
        code, out = run_cli(capsys, "singular", "--family", "gamma", "--d", "5",
                            "--seed", "3", "--format", "json", "--no-timestamp")
        payload = json.loads(out)
        assert code == 0
        assert payload["pass"]
        assert len(payload["strata"]) == 5

    def test_defect_small_sweep(self, capsys):
        code, out = run_cli(capsys, "defect", "--family", "gamma", "--dmax", "6",
                            "--kmax", "3", "--seed", "1", "--format", "json",
                            "--no-timestamp")
        payload = json.loads(out)
        assert code == 0
        assert payload["pass"]
        assert all(cell["nondefective"] for cell in payload["cells"])

    def test_usage_error_exit_code(self, capsys):
        assert main(["moments", "--family", "nope", "--d", "3"]) == 2

    def test_missing_subcommand(self):
        assert main([]) == 2


class TestSampleCommand:
    def test_sample_deterministic_bytes(self, capsys):
        args = ("sample", "--family", "exp", "--params", "1.0", "--n", "5",
                "--seed", "9", "--format", "json", "--no-timestamp")
        code1, out1 = run_cli(capsys, *args)
        code2, out2 = run_cli(capsys, *args)
        assert code1 == code2 == 0
        assert out1 == out2

    def test_sample_mixture(self, capsys):
        code, out = run_cli(capsys, "sample", "--family", "ig",
                            "--params", "1,5;2,20", "--weights", "0.4,0.6",
                            "--n", "100", "--seed", "3", "--format", "json",
                            "--no-timestamp")
        payload = json.loads(out)
        assert code == 0
        assert len(payload["values"]) == 100
        assert payload["model"]["k"] == 2


class TestEstimateCommand:
    def test_single_component_from_file(self, capsys, tmp_path):
        from mvt.moments import Dist
        from mvt.sampling import MixtureModel, sample

        data = sample(MixtureModel(Dist.GAMMA, [(2.0, 1.0)], [1.0]), 20000, seed=4)
        path = tmp_path / "data.txt"
        path.write_text("\n".join(repr(float(v)) for v in data))
        code, out = run_cli(capsys, "estimate", "--family", "gamma", "--k", "1",
                            "--input", str(path), "--format", "json", "--no-timestamp")
        payload = json.loads(out)
        assert code == 0
        k_hat, theta_hat = payload["estimate"]
        assert abs(k_hat - 2.0) < 0.2
        assert abs(theta_hat - 1.0) < 0.1


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ("generators", "--family", "ig", "--d", "5"),
        ("hilbert", "--family", "gamma", "--d", "6"),
        ("singular", "--family", "ig", "--d", "4", "--seed", "7"),
        ("defect", "--family", "ig", "--dmax", "5", "--kmax", "2", "--seed", "2"),
        ("eddeg", "--family", "gaussian", "--seed", "1"),
    ])
    def test_byte_reproducible_json(self, capsys, argv):
        full = list(argv) + ["--format", "json", "--no-timestamp"]
        code1, out1 = run_cli(capsys, *full)
        code2, out2 = run_cli(capsys, *full)
        assert code1 == code2
        assert out1 == out2

    def test_help_lists_defaults(self, capsys):
        code = main(["iddeg", "--help"])
        out = capsys.readouterr().out
        assert code == 0
        assert "--stall-loops" in out and "default 10" in out
        assert "--tol-corrector" in out
