import json
import math

import pytest

from arnoldgas import cli


def run(args):
    return cli.main(args)


def read_summary(path):
    return json.loads(path.read_text())


def csv_body(path):
    # everything after the one-line JSON manifest comment
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# ")
    json.loads(lines[0][2:])  # manifest must be valid JSON
    return "\n".join(lines[1:])


class TestParams:
    def test_defaults_print_reference_quintet(self, capsys):
        assert run(["params"]) == 0
        payload = json.loads(capsys.readouterr().out)
        derived = payload["derived"]
        assert derived["n_particles"] == pytest.approx(2.5e19, rel=0.05)
        assert derived["mean_free_path_m"] == pytest.approx(2e-7, rel=1e-12)
        assert derived["mean_speed_m_per_s"] == pytest.approx(400.0, rel=1e-12)
        assert derived["mean_free_time_s"] == pytest.approx(5e-10, rel=1e-12)
        assert derived["collision_rate_per_s"] == pytest.approx(2e9, rel=1e-12)

    def test_double_pressure_doubles_n(self, capsys):
        run(["params"])
        base = json.loads(capsys.readouterr().out)["derived"]["n_particles"]
        run(["params", "--pressure", "2e5"])
        doubled = json.loads(capsys.readouterr().out)["derived"]["n_particles"]
        assert doubled == pytest.approx(2 * base, rel=1e-12)

    def test_zero_temperature_usage_error(self, capsys):
        assert run(["params", "--temperature", "0"]) == 1


class TestTree:
    def test_four_stages(self, tmp_path, capsys):
        out = tmp_path / "t.csv"
        assert run(["tree", "--stages", "4", "--out", str(out)]) == 0
        rows = csv_body(out).splitlines()
        assert rows[0] == "stage,n1,n2,dx,dp,norm"
        assert len(rows) == 1 + 16
        summary = read_summary(tmp_path / "t.summary.json")["summary"]
        assert summary["gas_dilation"] == pytest.approx(15.4217, abs=1e-3)
        assert summary["gas_dilation_bound"] == pytest.approx(4.0)
        assert summary["bound_satisfied"]

    def test_zero_stages_single_row(self, tmp_path):
        out = tmp_path / "t0.csv"
        assert run(["tree", "--stages", "0", "--out", str(out)]) == 0
        assert len(csv_body(out).splitlines()) == 2

    def test_budget_refusal(self, tmp_path):
        assert run(["tree", "--stages", "40", "--out", str(tmp_path / "x.csv")]) == 2

    def test_aggregate_only_allows_large_stage(self, tmp_path):
        out = tmp_path / "big.csv"
        assert run(["tree", "--stages", "40", "--aggregate-only", "--out", str(out)]) == 0
        assert not out.exists()
        summary = read_summary(tmp_path / "big.summary.json")["summary"]
        assert summary["gas_dilation_closed"] >= 2 ** 20

    def test_outdir_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv(cli.OUTDIR_ENV, str(tmp_path))
        assert run(["tree", "--stages", "2", "--out", "rel.csv"]) == 0
        assert (tmp_path / "rel.csv").exists()


class TestGas:
    def test_tree_pairing_saturates_at_log2n(self, tmp_path):
        out = tmp_path / "g.csv"
        assert run(["gas", "--particles", "1024", "--steps", "15",
                    "--pairing", "tree", "--modes", "0", "--out", str(out)]) == 0
        summary = read_summary(tmp_path / "g.summary.json")["summary"]
        assert summary["saturation_step"] == 10

    def test_identical_seed_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["gas", "--particles", "64", "--steps", "8", "--seed", "7", "--modes", "2"]
        assert run(args + ["--out", str(a)]) == 0
        assert run(args + ["--out", str(b), "--threads", "1"]) == 0
        assert csv_body(a) == csv_body(b)
        assert csv_body(tmp_path / "a.spectrum.csv") == csv_body(tmp_path / "b.spectrum.csv")
        da = read_summary(tmp_path / "a.summary.json")
        db = read_summary(tmp_path / "b.summary.json")
        assert da["summary"] == db["summary"]
        assert list(da["output_digests"].values()) == list(db["output_digests"].values())

    def test_mode_count(self, tmp_path):
        out = tmp_path / "m.csv"
        assert run(["gas", "--particles", "64", "--steps", "8", "--modes", "4",
                    "--out", str(out)]) == 0
        summary = read_summary(tmp_path / "m.summary.json")["summary"]
        assert len(summary["modes"]) == 80

    def test_twin_cap_refused(self, tmp_path):
        code = run(["gas", "--particles", str(2**17), "--steps", "1",
                    "--twin", "on", "--modes", "0", "--out", str(tmp_path / "x.csv")])
        assert code == 2

    def test_odd_particles_warns(self, tmp_path, capsys):
        assert run(["gas", "--particles", "7", "--steps", "2", "--modes", "0",
                    "--out", str(tmp_path / "o.csv")]) == 0
        assert "odd particle count" in capsys.readouterr().err

    def test_trajectory_columns(self, tmp_path):
        out = tmp_path / "c.csv"
        run(["gas", "--particles", "16", "--steps", "3", "--modes", "0", "--out", str(out)])
        rows = csv_body(out).splitlines()
        assert rows[0] == "t,affected,norm,max_disp,median_disp,twin_dist"
        assert len(rows) == 1 + 4


class TestSpectrum:
    def test_refit_from_saved_csv(self, tmp_path, capsys):
        out = tmp_path / "g.csv"
        run(["gas", "--particles", "256", "--steps", "10", "--pairing", "tree",
             "--modes", "1", "--out", str(out)])
        capsys.readouterr()
        assert run(["spectrum", "--in", str(tmp_path / "g.spectrum.csv"),
                    "--window", "2", "8"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert len(payload["modes"]) == 8
        slopes = [m["slope"] for m in payload["modes"] if "slope" in m]
        assert slopes and all(math.isfinite(s) for s in slopes)

    def test_missing_manifest_rejected(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("t,m1,m2\n0,1,0\n")
        assert run(["spectrum", "--in", str(bad)]) == 1


class TestVerify:
    def test_quick_passes(self, capsys):
        assert run(["verify", "--quick"]) == 0
        out = capsys.readouterr().out
        assert "PASS lambda-plus" in out
        assert "FAIL" not in out

    def test_corrupt_hook_names_failure(self, capsys, monkeypatch):
        monkeypatch.setenv("ARNOLDGAS_VERIFY_CORRUPT", "k-plus")
        assert run(["verify", "--quick"]) == 3
        out = capsys.readouterr().out
        assert "FAIL k-plus" in out
        assert out.count("FAIL") == 2  # the failing line plus the summary


def test_usage_error_exit_code():
    assert cli.build_parser().prog == "arnoldgas"
    with pytest.raises(SystemExit) as exc:
        cli.main(["gas", "--particles", "not-a-number"])
    assert exc.value.code == 1
