import numpy as np
import pytest

from molreg.errors import DomainError, NoiseDominatedError
from molreg.experiments import (
    AprioriParams,
    FitRow,
    MCSummary,
    MorozovParams,
    RatePoint,
    RunRecord,
    default_params,
    emit_csv,
    emit_fit_csv,
    fit_line,
    read_csv,
    resolve_threads,
    run_monte_carlo,
    run_once,
    run_rate_study,
    solve_case,
)
from molreg.grid import Grid2D

SMALL = Grid2D(64, 10.0)


class TestRunOnce:
    def test_noise_free_consistency(self):
        rec = run_once(1, 0.0, "apriori", AprioriParams(delta_floor=6.25e-10))
        assert rec.beta == pytest.approx(1e-3)
        assert rec.rel_err < 1e-3

    def test_noise_free_needs_floor(self):
        with pytest.raises(DomainError):
            run_once(1, 0.0, "apriori", grid=SMALL)

    def test_morozov_fixture(self):
        out = solve_case(1, 1.0, "morozov", MorozovParams())
        rec, sel = out.record, out.selection
        assert sel.residual <= sel.target < sel.bracket_residual
        assert sel.iterations == 198
        assert rec.beta == pytest.approx(0.18313147236278113, rel=1e-12)
        assert rec.rel_err == pytest.approx(0.083257788117896248, rel=1e-9)

    def test_phantom_low_noise_sanity(self):
        rec = run_once(4, 0.01, "apriori")
        assert rec.param == 0.02
        assert rec.rel_err < 1

    def test_defaults(self):
        assert default_params("apriori", 4).c == 0.02
        assert default_params("apriori", 2).c == 0.2
        assert default_params("morozov") == MorozovParams(1.0, 10.0, 0.98)
        with pytest.raises(DomainError):
            default_params("tikhonov")

    def test_param_type_checked(self):
        with pytest.raises(DomainError):
            run_once(1, 1.0, "morozov", AprioriParams(), grid=SMALL)

    def test_noise_dominated_propagates(self):
        with pytest.raises(NoiseDominatedError):
            run_once(3, 60.0, "morozov", grid=SMALL)

    def test_timing_flag(self):
        assert run_once(1, 1.0, "apriori", grid=SMALL).wall_time == 0.0
        assert run_once(1, 1.0, "apriori", grid=SMALL, timed=True).wall_time > 0.0

    def test_truncated_operator_changes_little(self):
        a = run_once(1, 1.0, "apriori", grid=SMALL)
        b = run_once(1, 1.0, "apriori", grid=SMALL, trunc_radius=1.0)
        assert b.rel_err != a.rel_err
        assert b.rel_err == pytest.approx(a.rel_err, rel=1e-4)


class TestMonteCarlo:
    def test_single_rep_degenerate(self):
        s = run_monte_carlo(2, 5.0, "apriori", n_reps=1, grid=SMALL)
        assert s.var_rel_err == 0.0
        assert s.mean_rel_err == s.runs[0].rel_err

    def test_deterministic_across_threads(self):
        a = run_monte_carlo(1, 5.0, "morozov", n_reps=6, seed=3, grid=SMALL, threads=1)
        b = run_monte_carlo(1, 5.0, "morozov", n_reps=6, seed=3, grid=SMALL, threads=3)
        assert a == b
        assert [r.rel_err for r in a.runs] == [r.rel_err for r in b.runs]

    def test_reps_are_distinct_draws(self):
        s = run_monte_carlo(1, 5.0, "apriori", n_reps=4, grid=SMALL)
        assert len({r.rel_err for r in s.runs}) == 4

    def test_aggregates(self):
        s = run_monte_carlo(1, 5.0, "apriori", n_reps=5, grid=SMALL)
        errs = np.array([r.rel_err for r in s.runs])
        assert s.mean_rel_err == pytest.approx(errs.mean())
        assert s.var_rel_err == pytest.approx(errs.var())

    def test_noise_ordering(self):
        hi = run_monte_carlo(1, 5.0, "apriori", n_reps=10)
        lo = run_monte_carlo(1, 1.0, "apriori", n_reps=10)
        assert hi.mean_rel_err > lo.mean_rel_err
        assert hi.mean_beta > lo.mean_beta

    def test_invalid_reps(self):
        with pytest.raises(DomainError):
            run_monte_carlo(1, 5.0, "apriori", n_reps=0, grid=SMALL)


class TestRateStudy:
    def test_shape(self):
        c = run_rate_study(2, "apriori", deltas=(10, 5, 2, 1), grid=SMALL)
        assert c.fit_axis == "log_vs_loglog"
        assert [d for d, _ in c.points] == [0.1, 0.05, 0.02, 0.01]
        assert set(c.fits) == {"loglog_delta", "log_vs_loglog"}
        assert run_rate_study(1, "apriori", deltas=(10, 5, 2, 1), grid=SMALL).fit_axis == "loglog_delta"

    @pytest.mark.parametrize("deltas", [(10, 5, 2), (10, 5, 5, 1), (1, 2, 5, 10), (200, 5, 2, 1)])
    def test_invalid_levels(self, deltas):
        with pytest.raises(DomainError):
            run_rate_study(1, "apriori", deltas=deltas, grid=SMALL)

    def test_fit_line_exact(self):
        f = fit_line([0, 1, 2, 3], [1, 3, 5, 7])
        assert (f.slope, f.intercept, f.r2) == pytest.approx((2.0, 1.0, 1.0))

    def test_threads(self):
        assert resolve_threads(0) >= 1
        assert resolve_threads(3) == 3
        with pytest.raises(DomainError):
            resolve_threads(-1)


class TestCsv:
    def test_run_round_trip(self, tmp_path):
        recs = [run_once(1, p, "apriori", grid=SMALL) for p in (5.0, 1.0)]
        emit_csv(recs, tmp_path / "r.csv")
        assert read_csv(tmp_path / "r.csv") == recs
        header = (tmp_path / "r.csv").read_text().splitlines()[0]
        assert header == "example,perc_noise,delta,rule,param,beta,rel_err,seed,wall_time_s"

    def test_summary_round_trip(self, tmp_path):
        s = run_monte_carlo(1, 5.0, "apriori", n_reps=3, grid=SMALL)
        emit_csv([s], tmp_path / "s.csv")
        back = read_csv(tmp_path / "s.csv")
        assert back == [s] and isinstance(back[0], MCSummary)

    def test_rate_files(self, tmp_path):
        c = run_rate_study(3, "morozov", deltas=(10, 5, 2, 1), grid=SMALL)
        emit_csv([c], tmp_path / "rate.csv")
        emit_fit_csv([c], tmp_path / "fit.csv")
        rows = read_csv(tmp_path / "rate.csv")
        assert rows == c.rows() and all(isinstance(r, RatePoint) for r in rows)
        fits = read_csv(tmp_path / "fit.csv")
        assert len(fits) == 2 and all(isinstance(f, FitRow) for f in fits)
        assert {f.fit_axis for f in fits} == {"loglog_delta", "log_vs_loglog"}

    def test_empty_header_only(self, tmp_path):
        emit_csv([], tmp_path / "e.csv", kind="mc")
        assert (tmp_path / "e.csv").read_text() == \
            "example,perc_noise,rule,n_reps,mean_rel_err,var_rel_err,mean_beta\n"
        assert read_csv(tmp_path / "e.csv") == []
        with pytest.raises(DomainError):
            emit_csv([], tmp_path / "e.csv")

    def test_seventeen_digits(self, tmp_path):
        rec = RunRecord(1, 1.0, 0.1, "apriori", 0.2, 1 / 3, 2 / 3, 0, 0.0)
        emit_csv([rec], tmp_path / "x.csv")
        assert "0.33333333333333331" in (tmp_path / "x.csv").read_text()

    def test_io_error_has_path(self, tmp_path):
        target = tmp_path / "missing" / "r.csv"
        with pytest.raises(OSError, match="missing"):
            emit_csv([], target, kind="run")

    def test_deterministic_bytes(self, tmp_path):
        for name in ("a.csv", "b.csv"):
            emit_csv([run_monte_carlo(2, 5.0, "morozov", n_reps=3, grid=SMALL)], tmp_path / name)
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
