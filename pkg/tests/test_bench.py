import csv
import io

import numpy as np
import pytest

from icatopsis import bench
from icatopsis.bench import CellStats, ExperimentSpec, ResultTable, Scenario
from icatopsis.io import result_table_from_json, result_table_to_json


def _small(**kw):
    base = dict(methods=bench.TABLE_METHODS, M=3, K=(40,), snr_db=(30.0,), replications=4, base_seed=7)
    base.update(kw)
    return ExperimentSpec(**base)


def test_reproducible_from_seed():
    a = bench.run_table_experiment(_small())
    b = bench.run_table_experiment(_small())
    assert result_table_to_json(a) == result_table_to_json(b)
    c = bench.run_table_experiment(_small(base_seed=8))
    assert result_table_to_json(a) != result_table_to_json(c)


def test_parallel_matches_serial():
    serial = bench.run_table_experiment(_small())
    parallel = bench.run_table_experiment(_small(workers=2))
    assert result_table_to_json(serial) == result_table_to_json(parallel)


def test_workers_env(monkeypatch):
    monkeypatch.setenv(bench.WORKERS_ENV, "3")
    assert bench.default_workers() == 3
    monkeypatch.setenv(bench.WORKERS_ENV, "many")
    assert bench.default_workers() == 1


def test_paired_design_shares_instances():
    spec = _small(snr_db=(15.0, 45.0))
    a = bench.make_replication_instance(spec, Scenario(15.0, 40), 2)
    b = bench.make_replication_instance(spec, Scenario(45.0, 40), 2)
    assert np.array_equal(a.latents, b.latents) and np.array_equal(a.mixing, b.mixing)
    assert not np.array_equal(a.noise, b.noise)
    assert bench.replication_seed(5, 3) == 6


def test_table_shape_and_order():
    spec = _small(K=(30, 40), snr_db=(15.0, 45.0), replications=2)
    table = bench.run_table_experiment(spec)
    assert table.methods == list(bench.TABLE_METHODS)
    assert table.scenarios == [Scenario(15.0, 30), Scenario(15.0, 40), Scenario(45.0, 30), Scenario(45.0, 40)]
    assert len(table.rows()) == 3 * 4
    assert all(c.n == 2 and c.failures == 0 for c in table.cells.values())


def test_failures_are_counted_not_dropped():
    # five alternatives in five criteria: TOPSIS-M's covariance is singular
    # and ICA needs more alternatives than criteria
    table = bench.run_table_experiment(_small(M=5, K=(5,), replications=3))
    sc = Scenario(30.0, 5)
    assert table.cell("topsis", sc).failures == 0 and table.cell("topsis", sc).n == 3
    assert table.cell("topsis_m", sc).failures == 3 and table.cell("topsis_m", sc).n == 0
    assert table.cell("ica_topsis_m_jade", sc).failures == 3
    assert np.isnan(table.cell("topsis_m", sc).mean("tau"))
    row = next(r for r in table.rows() if r["method"] == "topsis_m")
    assert row["failures"] == 3


def test_grid_cell_without_mixing_is_near_perfect():
    spec = ExperimentSpec(methods=("topsis_m",), alpha_beta_grid=((0.0, 0.0),), replications=30)
    stats = bench.run_grid_experiment(spec).cell("topsis_m", Scenario(None, 100, 0.0, 0.0))
    # TOPSIS-M reweights by the sample covariance, so even unmixed data is not
    # ranked exactly like TOPSIS on the latents
    assert min(stats.samples["tau"]) > 0.85
    assert stats.mean("tau") > 0.95


def test_grid_trend():
    grid = ((0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5))
    spec = ExperimentSpec(methods=("topsis_m",), alpha_beta_grid=grid, replications=60)
    table = bench.run_grid_experiment(spec)
    tau = {(sc.alpha, sc.beta): table.mean("topsis_m", sc) for sc in table.scenarios}
    assert tau[(0.5, 0.5)] > tau[(-0.5, 0.5)] + 0.1
    assert abs(tau[(-0.5, -0.5)] - tau[(0.5, 0.5)]) < 0.05


def test_utopic_curves_bound_estimated_ones():
    spec = bench.profile_spec("snr", "ci", replications=60)
    table = bench.run_snr_sweep(spec)
    for sc in table.scenarios:
        for algo in ("fastica", "jade"):
            assert table.mean("utopic_ica_topsis", sc) >= table.mean(f"ica_topsis_{algo}", sc)
            assert table.mean("utopic_ica_topsis_m", sc) >= table.mean(f"ica_topsis_m_{algo}", sc)


def test_alternatives_sweep_ordering_at_170():
    spec = ExperimentSpec(
        methods=("topsis_m", "ica_topsis_jade", "ica_topsis_m_jade"), K=(170,), snr_db=(30.0,), replications=500
    )
    table = bench.run_alternatives_sweep(spec)
    sc = Scenario(30.0, 170)
    assert table.mean("ica_topsis_jade", sc) > table.mean("topsis_m", sc)
    assert table.mean("ica_topsis_m_jade", sc) > table.mean("topsis_m", sc)


def test_alternatives_rows_per_k():
    spec = ExperimentSpec(methods=("topsis", "topsis_m"), K=(10, 20), snr_db=(30.0,), replications=2)
    table = bench.run_alternatives_sweep(spec)
    assert [(r["method"], r["K"]) for r in table.rows()] == [
        ("topsis", 10), ("topsis_m", 10), ("topsis", 20), ("topsis_m", 20)
    ]


@pytest.mark.parametrize("m", [3, 4, 5])
def test_topsis_is_worst_in_every_scenario(m):
    table = bench.run_table_experiment(bench.profile_spec("tables", "ci", M=m, replications=100))
    for sc, best in bench.iter_bold(table):
        means = {meth: table.mean(meth, sc) for meth in table.methods}
        assert min(means, key=means.get) == "topsis"
        assert best != "topsis"


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec(methods=("electre",))
    with pytest.raises(ValueError):
        ExperimentSpec(replications=0)
    with pytest.raises(ValueError):
        ExperimentSpec(alpha_beta_grid=((0.9, 0.0),))
    with pytest.raises(ValueError):
        bench.run_snr_sweep(ExperimentSpec(snr_db=(60.0,)))
    with pytest.raises(ValueError):
        bench.run_table_experiment(ExperimentSpec(M=2))
    with pytest.raises(ValueError):
        bench.profile_spec("tables", "huge")


def test_profiles():
    full = bench.profile_spec("grid", "paper")
    assert full.replications == 500 and len(full.alpha_beta_grid) == 13**2
    assert bench.profile_spec("tables", "paper", M=5).replications == 1000
    assert bench.profile_spec("snr", "paper").snr_db == tuple(float(s) for s in range(5, 51, 5))
    assert bench.profile_spec("snr", "ci", replications=3).replications == 3
    assert (0.0, 0.0) in bench.grid_points(0.25)


def test_cell_stats():
    stats = CellStats({"tau": [1.0, 0.5], "rho": [1.0, 1.0], "eps": [0.0, 2.0]}, failures=1)
    assert stats.n == 2
    assert stats.mean("tau") == 0.75
    assert stats.std("eps") == pytest.approx(np.sqrt(2.0))
    assert CellStats({"tau": [0.3], "rho": [0.1], "eps": [1.0]}).std("tau") == 0.0


def test_json_round_trip():
    table = bench.run_table_experiment(_small(replications=2))
    back = result_table_from_json(result_table_to_json(table))
    assert back.replications == table.replications
    assert list(back.cells) == list(table.cells)
    for key, stats in table.cells.items():
        assert back.cells[key].samples == stats.samples
        assert back.cells[key].failures == stats.failures


def test_csv_outputs():
    table = ResultTable(5)
    table.cells[("topsis", Scenario(15.0, 30))] = CellStats(
        {"tau": [0.5, 0.7], "rho": [0.9, 0.9], "eps": [1.0, 3.0]}, failures=3
    )
    wide = io.StringIO()
    table.to_csv(wide)
    lines = wide.getvalue().splitlines()
    assert lines[0] == "method,snr_db,K,alpha,beta,tau_mean,tau_std,rho_mean,rho_std,eps_mean,eps_std,n,failures"
    assert lines[1].startswith("topsis,15,30,,,0.6,")
    assert lines[1].endswith(",2,3")
    long = io.StringIO()
    table.to_long_csv(long)
    rows = list(csv.reader(io.StringIO(long.getvalue())))
    assert len(rows) == 1 + 6
    assert rows[1] == ["snr=15,K=30", "15", "30", "", "", "topsis", "tau_mean", "0.6"]
