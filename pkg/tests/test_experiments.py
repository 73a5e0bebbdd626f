import csv
import json
import os
from dataclasses import replace

import numpy as np
import pytest

from semsim.errors import ParameterError
from semsim.experiments import (
    ExperimentConfig,
    build_population,
    experiment1_modularity_vs_p,
    experiment2_breadth_vs_modularity,
    experiment3_stimulation,
    experiment4_redundancy,
    run_all,
    run_sweep,
    write_summary,
    write_tables,
)


# --- config ---


def test_default_config_valid():
    ExperimentConfig().validate()


def test_config_validation_errors():
    with pytest.raises(ParameterError):
        replace(ExperimentConfig(), k=3).validate()
    with pytest.raises(ParameterError):
        replace(ExperimentConfig(), population_size=0).validate()
    with pytest.raises(ParameterError):
        replace(ExperimentConfig(), source_quantile=0.9).validate()
    with pytest.raises(ParameterError):
        replace(ExperimentConfig(), p_range=(0.5, 0.1)).validate()
    with pytest.raises(ParameterError):
        replace(ExperimentConfig(), redundancy_walks=0).validate()


def test_config_scaled():
    cfg = ExperimentConfig().scaled(0.1)
    assert cfg.population_size == 50
    assert cfg.matched_instances == 500
    assert cfg.n == 100  # structural knobs untouched
    tiny = ExperimentConfig().scaled(0.001)
    assert tiny.population_size == 10  # floor
    with pytest.raises(ParameterError):
        ExperimentConfig().scaled(0.0)


def test_config_from_toml(tmp_path):
    path = tmp_path / "cfg.toml"
    path.write_text('master_seed = 7\nn = 50\nk = 4\nT = 15\npopulation_size = 20\n')
    cfg = ExperimentConfig.from_toml(path)
    assert cfg.master_seed == 7 and cfg.n == 50 and cfg.T == 15
    assert cfg.S == ExperimentConfig().S  # defaults preserved


def test_config_from_toml_unknown_key(tmp_path):
    path = tmp_path / "cfg.toml"
    path.write_text("walk_len = 5\n")
    with pytest.raises(ParameterError):
        ExperimentConfig.from_toml(path)


def test_default_p_grid_uniform_unit_interval():
    grid = ExperimentConfig().p_grid
    assert grid[0] == 0.0 and grid[-1] == 1.0
    diffs = np.diff(grid)
    assert np.allclose(diffs, diffs[0])


# --- population ---


def test_build_population_deterministic(tiny_config):
    a = build_population(tiny_config)
    b = build_population(tiny_config)
    assert a.graphs == b.graphs
    assert np.array_equal(a.q_values, b.q_values)
    assert len(a.graphs) == tiny_config.population_size


def test_population_p_within_range(tiny_config):
    pop = build_population(tiny_config)
    lo, hi = tiny_config.p_range
    for _, p in pop.specs:
        assert lo <= p <= hi


def test_population_seed_changes_everything(tiny_config):
    a = build_population(tiny_config)
    b = build_population(replace(tiny_config, master_seed=43))
    assert a.graphs != b.graphs


# --- experiments (tiny runs; headline values are checked in test_acceptance) ---


def test_experiment1_shapes_and_grid(tiny_config):
    res = experiment1_modularity_vs_p(tiny_config)
    header, rows = res.tables["exp1_modularity.csv"]
    assert header == ("p", "replicate", "Q")
    assert len(rows) == len(tiny_config.p_grid) * tiny_config.graphs_per_p
    assert res.summary["n_rows"] == len(rows)
    per_p = res.summary["per_p_mean_ci"]
    assert [c["p"] for c in per_p] == list(tiny_config.p_grid)
    for c in per_p:
        assert c["ci_low"] <= c["mean_q"] <= c["ci_high"]


def test_experiment1_needs_grid(tiny_config):
    with pytest.raises(ParameterError):
        experiment1_modularity_vs_p(replace(tiny_config, p_grid=(0.0, 0.5, 1.0)))


def test_experiment2_rows_align_with_population(tiny_config):
    pop = build_population(tiny_config)
    res = experiment2_breadth_vs_modularity(tiny_config, pop)
    header, rows = res.tables["exp2_breadth.csv"]
    assert len(rows) == len(pop.graphs)
    for agent_id, p, q, b_hat, lo, hi in rows:
        assert q == pytest.approx(pop.q_values[agent_id])
        assert lo <= b_hat <= hi
        assert 1.0 <= b_hat <= tiny_config.T + 1


def test_experiment3_panel_and_ablation(tiny_config):
    pop = build_population(tiny_config)
    res = experiment3_stimulation(tiny_config, pop)
    header, rows = res.tables["exp3_exposures.csv"]
    assert len(rows) == tiny_config.ordered_pairs * tiny_config.prompts_per_pair
    abl = experiment3_stimulation(tiny_config, pop, ablation=True)
    assert abl.summary["ablation"] is True
    # replayed draws make the ablated gain identically zero
    assert abl.summary["beta"] == 0.0
    assert abl.summary["ci_low"] == 0.0 and abl.summary["ci_high"] == 0.0
    # overlap column is shared with the main run (same streams)
    main_overlaps = [r[4] for r in rows]
    abl_overlaps = [r[4] for r in abl.tables["exp3_exposures_ablation.csv"][1]]
    assert main_overlaps == abl_overlaps


def test_experiment4_tables_and_summary(tiny_config):
    pop = build_population(tiny_config)
    res = experiment4_redundancy(tiny_config, pop)
    header, rows = res.tables["exp4_redundancy.csv"]
    assert len(rows) == tiny_config.matched_instances
    for row in rows:
        *_ids, r_triad, r_control, delta = row
        assert delta == pytest.approx(r_triad - r_control)
        assert 0.0 <= r_triad <= 1.0 and 0.0 <= r_control <= 1.0
    s = res.summary
    assert s["n_instances"] == tiny_config.matched_instances
    assert s["ci_low"] <= s["mean_delta"] <= s["ci_high"]


def test_experiment4_pools_disjoint(tiny_config):
    pop = build_population(tiny_config)
    res = experiment4_redundancy(tiny_config, pop)
    q = pop.q_values
    for row in res.tables["exp4_redundancy.csv"][1]:
        _, h1, h2, a, b, *_ = row
        assert h1 != h2 and a != b
        assert q[h1] <= np.quantile(q, 0.2) and q[h2] <= np.quantile(q, 0.2)
        assert q[a] >= np.quantile(q, 0.8) and q[b] >= np.quantile(q, 0.8)


def test_experiments_thread_invariant(tiny_config):
    pop1 = build_population(tiny_config)
    res1 = experiment3_stimulation(tiny_config, pop1)
    cfg2 = replace(tiny_config, threads=2)
    res2 = experiment3_stimulation(cfg2, build_population(cfg2))
    assert res1.tables == res2.tables
    res4a = experiment4_redundancy(tiny_config, pop1)
    res4b = experiment4_redundancy(cfg2, pop1)
    assert res4a.tables == res4b.tables


# --- sweep and output ---


def test_run_sweep_reports_cells(tiny_config):
    report = run_sweep(tiny_config, {"T": [10, 20]}, experiments=("exp1",))
    assert len(report["cells"]) == 2
    assert all("exp1_spearman_rho" in c["stats"] for c in report["cells"])
    assert isinstance(report["signs_consistent"], bool)


def test_run_sweep_rejects_bad_axes(tiny_config):
    with pytest.raises(ParameterError):
        run_sweep(tiny_config, {})
    with pytest.raises(ParameterError):
        run_sweep(tiny_config, {"walk": [1]})


def test_write_tables_round_trip(tmp_path, tiny_config):
    res = experiment1_modularity_vs_p(tiny_config)
    paths = write_tables(res, tmp_path)
    with open(paths[0]) as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    assert tuple(header) == ("p", "replicate", "Q")
    orig = res.tables["exp1_modularity.csv"][1]
    assert len(rows) == len(orig)
    # float round trip is exact (repr formatting)
    assert float(rows[0][2]) == orig[0][2]


def test_write_tables_refuses_overwrite(tmp_path, tiny_config):
    res = experiment1_modularity_vs_p(tiny_config)
    write_tables(res, tmp_path)
    with pytest.raises(FileExistsError):
        write_tables(res, tmp_path)
    write_tables(res, tmp_path, force=True)


def test_write_summary_json(tmp_path):
    path = write_summary({"exp1": {"a": 1.5}}, tmp_path)
    with open(path) as fh:
        data = json.load(fh)
    assert data == {"exp1": {"a": 1.5}}
    with pytest.raises(FileExistsError):
        write_summary({}, tmp_path)


def test_run_all_outputs(tmp_path, tiny_config):
    summaries = run_all(tiny_config, output_dir=tmp_path)
    assert set(summaries) == {"exp1", "exp2", "exp3", "exp4"}
    names = set(os.listdir(tmp_path))
    assert {
        "exp1_modularity.csv",
        "exp2_breadth.csv",
        "exp3_exposures.csv",
        "exp3_binned.csv",
        "exp4_redundancy.csv",
        "summary.json",
    } <= names
