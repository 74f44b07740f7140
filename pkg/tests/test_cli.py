"""Command-line interface: artifacts, manifests, figures, exit codes.

Each subcommand is driven in-process through ``cli.main``; one test goes
through the installed console script to cover the entry point.  The
fault-injection test corrupts a library identity and expects the
verification command to fail loudly while still writing its report.
"""

import json
import subprocess
import sys

import numpy as np
import pytest

from detproc import __version__, cli, dpp, kernels


def run_cli(args):
    return cli.main([str(a) for a in args])


class TestKernelTable:
    def test_csv_figure_and_manifest(self, tmp_path):
        out = tmp_path / "table.csv"
        code = run_cli(
            ["kernel-table", "--family", "sine", "--grid=-1:1:0.5", "-o", out]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "family,N,nu,s,x,t,y,value"
        assert len(lines) == 1 + 25  # 5x5 grid
        assert out.with_suffix(".png").exists()
        manifest = json.loads((tmp_path / "table.csv.manifest.json").read_text())
        assert manifest["command"] == "kernel-table"
        assert manifest["version"] == __version__
        assert manifest["parameters"]["family"] == "sine"
        assert str(out) in manifest["artifacts"]

    def test_no_plot_suppresses_figure(self, tmp_path):
        out = tmp_path / "table.csv"
        run_cli(
            ["kernel-table", "--family", "sine", "--grid=-1:1:0.5", "-o", out,
             "--no-plot"]
        )
        assert out.exists()
        assert not out.with_suffix(".png").exists()

    def test_thread_count_does_not_change_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["kernel-table", "--family", "hermite", "--N", 4, "--s", 0.5,
                "--t", 0.5, "--grid=-3:3:0.25", "--no-plot"]
        run_cli(args + ["-o", a, "--threads", 1])
        run_cli(args + ["-o", b, "--threads", 3])
        assert a.read_bytes() == b.read_bytes()


class TestGapProb:
    def test_documented_example_value(self, tmp_path):
        out = tmp_path / "gap.csv"
        code = run_cli(
            ["gap-prob", "--family", "sine", "--interval", "0,0.1",
             "--nodes", 64, "-o", out, "--no-plot"]
        )
        assert code == 0
        header, row = out.read_text().splitlines()
        assert header == "domain_lo,domain_hi,n_nodes,z,det"
        det = float(row.split(",")[4])
        # value pinned by an independent dense-quadrature computation;
        # leading behaviour is 1 - |I| + O(|I|^4)
        assert det == pytest.approx(0.9000272717982591, rel=1e-9)

    def test_inverted_interval_is_a_validation_error(self, tmp_path, capsys):
        out = tmp_path / "gap.csv"
        code = run_cli(
            ["gap-prob", "--family", "sine", "--interval", "5,0", "-o", out]
        )
        assert code == 2
        err = json.loads(capsys.readouterr().err.strip())
        assert err["exit_code"] == 2
        assert "error" in err


class TestSampleDpp:
    def test_dump_format_and_seed_policy(self, tmp_path, monkeypatch, capsys):
        out = tmp_path / "samples.jsonl"
        # without any seed source the command must refuse to run
        monkeypatch.delenv("DETPROC_SEED", raising=False)
        code = run_cli(
            ["sample-dpp", "--family", "sine", "--domain", "0,5",
             "--nodes", 48, "--R", 25, "-o", out, "--no-plot"]
        )
        assert code == 2
        err = json.loads(capsys.readouterr().err.strip())
        assert err["exit_code"] == 2
        assert not out.exists()

        code = run_cli(
            ["sample-dpp", "--family", "sine", "--domain", "0,5",
             "--nodes", 48, "--R", 25, "--seed", 7, "-o", out, "--no-plot"]
        )
        assert code == 0
        meta, samples = dpp.read_samples(out)
        assert meta["type"] == "sample-dump"
        assert len(samples) == 25

        # the environment variable is an equivalent seed source
        env_out = tmp_path / "samples_env.jsonl"
        monkeypatch.setenv("DETPROC_SEED", "7")
        code = run_cli(
            ["sample-dpp", "--family", "sine", "--domain", "0,5",
             "--nodes", 48, "--R", 25, "-o", env_out, "--no-plot"]
        )
        assert code == 0
        _, env_samples = dpp.read_samples(env_out)
        for a, b in zip(samples, env_samples):
            np.testing.assert_array_equal(a.expanded(), b.expanded())


class TestSimulate:
    ARGS = ["simulate", "--model", "dyson", "--N", 2, "--t-grid", "0,0.15,0.3",
            "--dt-max", 0.01, "--R", 200, "--seed", 77]

    def test_artifacts_and_reproducibility(self, tmp_path):
        a, b = tmp_path / "a.bin", tmp_path / "b.bin"
        assert run_cli(self.ARGS + ["-o", a]) == 0
        assert run_cli(self.ARGS + ["-o", b, "--no-plot"]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert (tmp_path / "a.bin.json").exists()
        assert (tmp_path / "a.bin.csv").exists()
        assert a.with_suffix(".png").exists()
        assert not b.with_suffix(".png").exists()

    def test_manifest_round_trip_reproduces_the_artifact(self, tmp_path):
        first = tmp_path / "first.bin"
        run_cli(self.ARGS + ["-o", first, "--no-plot"])
        manifest = tmp_path / "first.bin.manifest.json"
        assert manifest.exists()
        second = tmp_path / "second.bin"
        code = run_cli(["--config", manifest, "simulate", "-o", second, "--no-plot"])
        assert code == 0
        assert first.read_bytes() == second.read_bytes()

    def test_explicit_flag_overrides_the_config(self, tmp_path):
        first = tmp_path / "first.bin"
        run_cli(self.ARGS + ["-o", first, "--no-plot"])
        manifest = tmp_path / "first.bin.manifest.json"
        third = tmp_path / "third.bin"
        run_cli(["--config", manifest, "simulate", "--R", 100, "-o", third,
                 "--no-plot"])
        sidecar = json.loads((tmp_path / "third.bin.json").read_text())
        assert sidecar["R"] == 100


class TestAnalysisCommands:
    def test_scaling_check_reports_decreasing_errors(self, tmp_path):
        out = tmp_path / "scaling.json"
        code = run_cli(
            ["scaling-check", "--limit", "bulk", "--N", "10,20", "-o", out,
             "--no-plot"]
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["limit"] == "bulk"
        assert payload["strictly_decreasing"] is True
        assert payload["sup_errors"][1] < payload["sup_errors"][0]

    def test_asymptotics_check_table_and_ratios(self, tmp_path):
        out = tmp_path / "rates.csv"
        code = run_cli(
            ["asymptotics-check", "--degrees", "100,200", "-o", out, "--no-plot"]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 3
        manifest = json.loads((tmp_path / "rates.csv.manifest.json").read_text())
        ratios = manifest["summary"]["ratios"]
        assert len(ratios) == 1
        assert 0.2 < ratios[0] < 0.8

    def test_config_check_writes_the_condition_report(self, tmp_path):
        out = tmp_path / "conditions.json"
        code = run_cli(
            ["config-check", "--points=-1,1", "--kappa", "0.75", "--m", "1,2",
             "--mode", "Y", "-o", out, "--no-plot"]
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["mode"] == "Y"
        assert payload["CI"] is True
        assert payload["M_value"] == pytest.approx(0.0, abs=1e-12)

    def test_density_check_columns_and_summary(self, tmp_path):
        out = tmp_path / "density.csv"
        code = run_cli(
            ["density-check", "--model", "dyson", "--N", 1, "--t", 0.5,
             "--R", 2000, "--dt-max", 0.01, "--bins=-3:3:0.5",
             "--seed", 12, "-o", out, "--no-plot"]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "bin_lo,bin_hi,empirical_density,std_error,exact_density"
        manifest = json.loads((tmp_path / "density.csv.manifest.json").read_text())
        assert manifest["summary"]["l1"] < 0.5

    def test_mgf_check_compares_determinant_and_simulation(self, tmp_path):
        out = tmp_path / "mgf.json"
        code = run_cli(
            ["mgf-check", "--N", 2, "--times", "0.5,1.0",
             "--windows=-1.6:0.9,-0.8:1.7", "--amps", "0.35,-0.45",
             "--R", 2000, "--dt-max", 0.01, "--nodes", 32,
             "--seed", 109, "-o", out, "--no-plot"]
        )
        assert code == 0
        payload = json.loads(out.read_text())
        for key in ("determinant", "estimate", "std_error", "z_score"):
            assert key in payload
        assert abs(payload["z_score"]) < 5.0


class TestVerify:
    def test_fast_suite_passes_and_reports(self, tmp_path, capsys):
        out = tmp_path / "verify.json"
        code = run_cli(["verify", "--suite", "fast", "-o", out, "--no-plot"])
        captured = capsys.readouterr().out
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["all_passed"] is True
        assert "[PASS] check 01" in captured
        assert "[PASS] check 13" in captured

    def test_fault_injection_fails_loudly_but_writes_the_report(
        self, tmp_path, monkeypatch, capsys
    ):
        real = kernels.christoffel_darboux

        def corrupted(N, x):
            lhs, rhs = real(N, x)
            return lhs, -rhs

        monkeypatch.setattr(kernels, "christoffel_darboux", corrupted)
        out = tmp_path / "verify.json"
        code = run_cli(["verify", "--suite", "fast", "-o", out, "--no-plot"])
        captured = capsys.readouterr().out
        assert code == 4
        assert out.exists()
        payload = json.loads(out.read_text())
        assert payload["all_passed"] is False
        by_number = {c["number"]: c for c in payload["results"]}
        assert by_number[1]["passed"] is False
        assert by_number[13]["passed"] is True
        assert "[FAIL] check 01" in captured


class TestEntryPoint:
    def test_console_script_smoke(self, tmp_path):
        out = tmp_path / "table.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "detproc.cli", "kernel-table", "--family",
             "sine", "--grid=-1:1:1", "-o", str(out), "--no-plot"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "wrote" in proc.stdout
        assert out.exists()

    def test_unknown_subcommand_exits_2(self):
        proc = subprocess.run(
            [sys.executable, "-m", "detproc.cli", "frobnicate"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 2
