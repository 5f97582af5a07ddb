import numpy as np
import pytest

from molreg.cli import main
from molreg.experiments import read_csv
from molreg.fieldio import read_field, write_field
from molreg.grid import Grid2D, RealField
from molreg.problems import exact_pair

SMALL = ["--n", "64"]


def run(tmp_path, *argv):
    return main([argv[0], "--out", str(tmp_path), *argv[1:]])


class TestForward:
    def test_matches_library_bitwise(self, tmp_path):
        assert run(tmp_path, "forward", "--example", "1") == 0
        g = read_field(tmp_path / "g.fld")
        np.testing.assert_array_equal(g.values, exact_pair(1, Grid2D(256, 10.0))[1].values)

    def test_zero_u0_gives_zero(self, tmp_path):
        write_field(RealField.zeros(Grid2D(16, 2.0)), tmp_path / "u0.fld")
        rc = run(tmp_path, "forward", "--u0", str(tmp_path / "u0.fld"), "--gamma", "0.1")
        assert rc == 0
        assert np.all(read_field(tmp_path / "g.fld").values == 0.0)

    def test_gamma_file(self, tmp_path):
        write_field(RealField.zeros(Grid2D(16, 2.0)), tmp_path / "u0.fld")
        (tmp_path / "g.csv").write_text("t,gamma\n0,0.1\n1,0.1\n")
        assert run(tmp_path, "forward", "--u0", str(tmp_path / "u0.fld"), "--gamma-file",
                   str(tmp_path / "g.csv"), "--noise-pct", "1") == 0
        assert read_field(tmp_path / "g_delta.fld").grid == Grid2D(16, 2.0)

    @pytest.mark.parametrize("argv", [
        ["forward", "--n", "255"],
        ["forward", "--example", "9"],
        ["forward", "--u0", "nope.fld", "--gamma", "0.1"],
        ["forward", "--u0", "x.fld"],
        ["reconstruct", "--rule", "tikhonov"],
        ["reconstruct", "--trunc-radius", "-1"],
        ["bogus"],
        [],
    ])
    def test_usage_errors(self, tmp_path, argv):
        assert main(argv + (["--out", str(tmp_path)] if argv and argv[0] != "bogus" else [])) == 1


class TestReconstruct:
    def test_noise_free_tiny_beta(self, tmp_path):
        rc = run(tmp_path, "reconstruct", "--noise-pct", "0", "--delta-floor", "6.25e-10")
        assert rc == 0
        u0 = exact_pair(1, Grid2D(256, 10.0))[0]
        u = read_field(tmp_path / "u_beta.fld")
        assert np.max(np.abs(u.values - u0.values)) < 1e-4

    def test_morozov_row(self, tmp_path):
        assert run(tmp_path, "select-beta", "--rule", "morozov") == 0
        text = (tmp_path / "selection.csv").read_text().splitlines()
        assert text[0] == "example,perc_noise,delta,rule,beta,residual,target,iterations,bracket_residual"
        row = dict(zip(text[0].split(","), text[1].split(",")))
        assert float(row["residual"]) <= float(row["target"]) < float(row["bracket_residual"])
        assert float(row["beta"]) == pytest.approx(0.18313147236278113, rel=1e-12)

    def test_run_csv(self, tmp_path):
        assert run(tmp_path, "reconstruct", *SMALL, "--example", "2", "--noise-pct", "5") == 0
        (rec,) = read_csv(tmp_path / "run.csv")
        assert rec.example_id == 2 and rec.rule == "apriori" and rec.wall_time == 0.0

    def test_noise_dominated_exit_code(self, tmp_path):
        assert run(tmp_path, "reconstruct", *SMALL, "--rule", "morozov", "--noise-pct", "60") == 2

    def test_nonconvergence_exit_code(self, tmp_path):
        # q close to 1 means tiny steps from a huge starting beta
        assert run(tmp_path, "reconstruct", *SMALL, "--rule", "morozov", "--beta0", "1e6",
                   "--q", "0.9999") == 3

    def test_example4_default_c(self, tmp_path):
        assert run(tmp_path, "reconstruct", *SMALL, "--example", "4", "--noise-pct", "0.01") == 0
        assert read_csv(tmp_path / "run.csv")[0].param == 0.02


class TestStudies:
    def test_rate_study_files(self, tmp_path):
        assert run(tmp_path, "rate-study", *SMALL, "--example", "3", "--deltas", "10,5,2,1") == 0
        assert len(read_csv(tmp_path / "rate.csv")) == 4
        assert len(read_csv(tmp_path / "rate_fit.csv")) == 2

    def test_monte_carlo_reproducible(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for d in (a, b):
            assert run(d, "monte-carlo", *SMALL, "--n-reps", "3", "--noise-pct", "5,1", "--threads", "2") == 0
        assert (a / "mc_summary.csv").read_bytes() == (b / "mc_summary.csv").read_bytes()
        assert (a / "mc_runs.csv").read_bytes() == (b / "mc_runs.csv").read_bytes()
        assert len(read_csv(a / "mc_runs.csv")) == 6

    def test_single_rep(self, tmp_path):
        assert run(tmp_path, "monte-carlo", *SMALL, "--n-reps", "1", "--noise-pct", "5") == 0
        (s,) = read_csv(tmp_path / "mc_summary.csv")
        assert s.n_reps == 1 and s.var_rel_err == 0.0


class TestConfig:
    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# study\nn = 64\nexample = 2\nnoise_pct = 5\nrule = morozov\n")
        assert run(tmp_path, "reconstruct", "--config", str(cfg), "--example", "3") == 0
        (rec,) = read_csv(tmp_path / "run.csv")
        assert (rec.example_id, rec.perc_noise, rec.rule) == (3, 5.0, "morozov")

    def test_bad_config(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("just words\n")
        assert run(tmp_path, "reconstruct", "--config", str(cfg)) == 1
