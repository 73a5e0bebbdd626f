"""Experiment orchestration.

Builds agent populations from the single rewiring knob and runs the four
experiments plus robustness sweeps. Every stochastic work unit owns a
label-derived random stream, so runs are deterministic end to end and
independent of execution order or worker count.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError
from .graphs import (
    ConceptGraph,
    SubstrateSpec,
    agent_modularity,
    generate_substrate,
    rewire,
)
from .ideation import expected_breadth
from .social import run_exposure, run_redundancy_instance
from .stats import (
    PanelObservation,
    bootstrap_ci,
    clustered_mean_test,
    cohens_dz,
    kendall,
    ols,
    pearson,
    quantile_bin_partial,
    spearman,
    theil_sen,
    two_way_fe,
)
from .streams import derive_stream

__all__ = [
    "ExperimentConfig",
    "AgentPopulation",
    "ExperimentResult",
    "build_population",
    "experiment1_modularity_vs_p",
    "experiment2_breadth_vs_modularity",
    "experiment3_stimulation",
    "experiment4_redundancy",
    "run_sweep",
    "run_all",
    "derive_stream",
]


def _default_p_grid():
    # uniform spacing: greedy community detection plateaus below p ~ 0.1, so
    # log spacing would swamp the grid with near-constant Q values
    return tuple(float(p) for p in np.linspace(0.0, 1.0, 15))


@dataclass(frozen=True)
class ExperimentConfig:
    """All knobs for population generation and the four experiments."""

    master_seed: int = 42
    n: int = 100
    k: int = 4
    p_grid: tuple = field(default_factory=_default_p_grid)
    graphs_per_p: int = 15
    p_range: tuple = (0.01, 0.5)
    population_size: int = 500
    T: int = 20
    S: int = 20
    R: int = 30
    iterations: int = 10
    ordered_pairs: int = 500
    prompts_per_pair: int = 10
    matched_instances: int = 5000
    source_quantile: float = 0.2
    recipient_quantile: float = 0.2
    bootstrap_iters: int = 1000
    redundancy_walks: int = 2
    trace_mode: str = "traversed"
    threads: int = 1
    output_dir: str = "out"

    def validate(self) -> None:
        SubstrateSpec(self.n, self.k).validate()
        counts = (
            self.graphs_per_p,
            self.population_size,
            self.T,
            self.S,
            self.R,
            self.iterations,
            self.ordered_pairs,
            self.prompts_per_pair,
            self.matched_instances,
            self.redundancy_walks,
        )
        if any(c < 1 for c in counts):
            raise ParameterError("all design counts must be >= 1")
        if not (0 < self.source_quantile <= 0.5 and 0 < self.recipient_quantile <= 0.5):
            raise ParameterError("quantiles must be in (0, 0.5]")
        for p in self.p_grid:
            if not 0.0 <= p <= 1.0:
                raise ParameterError(f"p-grid value {p} outside [0,1]")
        lo, hi = self.p_range
        if not (0.0 <= lo <= hi <= 1.0):
            raise ParameterError(f"bad p_range {self.p_range}")
        if self.bootstrap_iters < 100:
            raise ParameterError("bootstrap_iters must be >= 100")

    def scaled(self, factor: float) -> "ExperimentConfig":
        """Shrink (or grow) the sampled design sizes by a common factor.

        Cluster-bearing counts keep a floor of 10 so clustered inference
        stays defined.
        """
        if factor <= 0:
            raise ParameterError("scale factor must be positive")
        sc = lambda v: max(10, int(v * factor))
        return replace(
            self,
            population_size=sc(self.population_size),
            ordered_pairs=sc(self.ordered_pairs),
            matched_instances=sc(self.matched_instances),
        )

    @classmethod
    def from_toml(cls, path) -> "ExperimentConfig":
        try:
            import tomllib
        except ModuleNotFoundError:
            import tomli as tomllib

        with open(path, "rb") as fh:
            data = tomllib.load(fh)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        for key in ("p_grid", "p_range"):
            if key in data:
                data[key] = tuple(float(v) for v in data[key])
        cfg = cls(**data)
        cfg.validate()
        return cfg


@dataclass
class AgentPopulation:
    substrate: ConceptGraph
    specs: list  # AgentSpec-like tuples (agent_id, p)
    graphs: list
    q_values: np.ndarray


@dataclass
class ExperimentResult:
    name: str
    tables: dict  # filename -> (header tuple, rows list)
    summary: dict


def build_population(config: ExperimentConfig, rng=None) -> AgentPopulation:
    """Substrate plus population_size rewired variants, with cached Q."""
    config.validate()
    substrate = generate_substrate(SubstrateSpec(config.n, config.k))
    if rng is None:
        rng = derive_stream(config.master_seed, ["population", "p"])
    lo, hi = config.p_range
    ps = rng.uniform(lo, hi, size=config.population_size)
    graphs = []
    qs = np.empty(config.population_size)
    for i, p in enumerate(ps):
        g = rewire(substrate, float(p), derive_stream(config.master_seed, ["population", "agent", i]))
        graphs.append(g)
        qs[i] = agent_modularity(g)
    specs = [(i, float(p)) for i, p in enumerate(ps)]
    return AgentPopulation(substrate=substrate, specs=specs, graphs=graphs, q_values=qs)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def experiment1_modularity_vs_p(config: ExperimentConfig) -> ExperimentResult:
    """Modularity of detected communities as a function of the rewiring knob."""
    config.validate()
    if len(config.p_grid) < 10:
        raise ParameterError("experiment 1 needs a p-grid with >= 10 values")
    substrate = generate_substrate(SubstrateSpec(config.n, config.k))
    rows = []
    p_all, q_all = [], []
    per_p_ci = []
    for pi, p in enumerate(config.p_grid):
        qs = []
        for rep in range(config.graphs_per_p):
            g = rewire(substrate, p, derive_stream(config.master_seed, ["exp1", pi, rep]))
            q = agent_modularity(g)
            qs.append(q)
            rows.append((p, rep, q))
            p_all.append(p)
            q_all.append(q)
        lo, hi = bootstrap_ci(qs, config.bootstrap_iters, derive_stream(config.master_seed, ["exp1", "boot", pi]))
        per_p_ci.append((p, float(np.mean(qs)), lo, hi))
    rho = spearman(p_all, q_all)
    tau = kendall(p_all, q_all)
    x = np.array(p_all)
    lin = ols(q_all, [x], estimator="ols")
    quad = ols(q_all, [x, x**2], estimator="ols_quadratic")
    summary = {
        "spearman": rho.to_json(),
        "kendall": tau.to_json(),
        "ols_linear": lin.to_json(),
        "ols_quadratic": quad.to_json(),
        "aic_linear": lin.aic,
        "aic_quadratic": quad.aic,
        "per_p_mean_ci": [
            {"p": p, "mean_q": m, "ci_low": lo, "ci_high": hi} for p, m, lo, hi in per_p_ci
        ],
        "n_rows": len(rows),
    }
    return ExperimentResult(
        name="exp1",
        tables={"exp1_modularity.csv": (("p", "replicate", "Q"), rows)},
        summary=summary,
    )


def experiment2_breadth_vs_modularity(config: ExperimentConfig, population: AgentPopulation | None = None) -> ExperimentResult:
    """Expected ideational breadth against detected modularity, per agent."""
    config.validate()
    if population is None:
        population = build_population(config)
    rows = []
    b_hat = np.empty(len(population.graphs))
    for (agent_id, p), g, q in zip(population.specs, population.graphs, population.q_values):
        est = expected_breadth(
            g,
            config.T,
            config.S,
            config.R,
            derive_stream(config.master_seed, ["exp2", "agent", agent_id]),
            config.bootstrap_iters,
        )
        b_hat[agent_id] = est.mean
        rows.append((agent_id, p, float(q), est.mean, est.ci_low, est.ci_high))
    q = population.q_values
    r = pearson(q, b_hat)
    rho = spearman(q, b_hat)
    tau = kendall(q, b_hat)
    lin = ols(b_hat, [q], estimator="ols")
    quad = ols(b_hat, [q, q**2], estimator="ols_quadratic")
    ts = theil_sen(q, b_hat, config.bootstrap_iters, derive_stream(config.master_seed, ["exp2", "ts_boot"]))
    summary = {
        "pearson": r.to_json(),
        "spearman": rho.to_json(),
        "kendall": tau.to_json(),
        "ols_linear": lin.to_json(),
        "ols_quadratic": quad.to_json(),
        "theil_sen": ts.to_json(),
        "aic_linear": lin.aic,
        "aic_quadratic": quad.aic,
        "n_agents": len(rows),
    }
    return ExperimentResult(
        name="exp2",
        tables={
            "exp2_breadth.csv": (
                ("agent_id", "p", "Q", "B_hat", "ci_low", "ci_high"),
                rows,
            )
        },
        summary=summary,
    )


def _sample_ordered_pairs(n_agents: int, count: int, rng) -> list:
    """Distinct ordered pairs (i, j), i != j, sampled without replacement."""
    if count > n_agents * (n_agents - 1):
        raise ParameterError("not enough agents for the requested ordered pairs")
    seen = set()
    pairs = []
    budget = 100 * count
    while len(pairs) < count:
        if budget <= 0:
            raise ParameterError("exhausted retry budget sampling ordered pairs")
        budget -= 1
        i = int(rng.integers(n_agents))
        j = int(rng.integers(n_agents))
        if i == j or (i, j) in seen:
            continue
        seen.add((i, j))
        pairs.append((i, j))
    return pairs


def _exposure_chunk(args):
    graphs, tasks, T, iterations, trace_mode, incorporate = args
    out = []
    for pair_idx, src, rec, prompt, entropy in tasks:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
        rec_out = run_exposure(
            graphs[src],
            graphs[rec],
            prompt,
            T,
            iterations,
            rng,
            source_id=src,
            recipient_id=rec,
            trace_mode=trace_mode,
            incorporate=incorporate,
        )
        out.append((pair_idx, rec_out))
    return out


def _run_chunked(worker, chunks, threads: int):
    if threads <= 1 or len(chunks) <= 1:
        return [worker(c) for c in chunks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, chunks))


def experiment3_stimulation(
    config: ExperimentConfig,
    population: AgentPopulation,
    ablation: bool = False,
) -> ExperimentResult:
    """Dyadic exposures and the two-way fixed-effects overlap -> gain slope.

    ``ablation=True`` replaces trace incorporation with a no-op on the same
    random draws; the gain signal then reduces to walk noise.
    """
    config.validate()
    n_agents = len(population.graphs)
    if n_agents < 2 or config.ordered_pairs > n_agents * (n_agents - 1):
        raise ParameterError("population too small for the requested ordered pairs")
    from .streams import stream_entropy

    tag = "exp3_ablation" if ablation else "exp3"
    pairs = _sample_ordered_pairs(
        n_agents, config.ordered_pairs, derive_stream(config.master_seed, ["exp3", "pairs"])
    )
    tasks = []
    for pair_idx, (src, rec) in enumerate(pairs):
        prng = derive_stream(config.master_seed, ["exp3", "prompts", pair_idx])
        prompts = prng.integers(0, config.n, size=config.prompts_per_pair).tolist()
        for prompt_idx, prompt in enumerate(prompts):
            # ablation shares the exposure streams with the normal run
            entropy = stream_entropy(config.master_seed, ["exp3", "expo", pair_idx, prompt_idx])
            tasks.append((pair_idx, src, rec, int(prompt), entropy))

    chunk_size = max(1, len(tasks) // max(1, config.threads * 8))
    chunks = [
        (population.graphs, tasks[i : i + chunk_size], config.T, config.iterations, config.trace_mode, not ablation)
        for i in range(0, len(tasks), chunk_size)
    ]
    results = []
    for part in _run_chunked(_exposure_chunk, chunks, config.threads):
        results.extend(part)

    rows = []
    obs = []
    for pair_idx, rec in results:
        rows.append((pair_idx, rec.source_id, rec.recipient_id, rec.prompt, rec.overlap_mean, rec.gain_mean))
        obs.append(
            PanelObservation(
                y=rec.gain_mean,
                x=rec.overlap_mean,
                group_a=pair_idx,
                group_b=rec.prompt,
                cluster=pair_idx,
            )
        )
    fe = two_way_fe(obs)
    bins = min(100, len(obs))
    binned = quantile_bin_partial(obs, bins)
    binned_rows = [(b, bx, by) for b, (bx, by) in enumerate(binned)]
    beta = fe.coefficients[0]
    summary = {
        "two_way_fe": fe.to_json(),
        "beta": beta,
        "ci_low": fe.ci_low[0],
        "ci_high": fe.ci_high[0],
        "gain_change_per_0.10_overlap": beta * 0.10,
        "n_exposures": len(obs),
        "n_pairs": len(pairs),
        "ablation": ablation,
    }
    suffix = "_ablation" if ablation else ""
    return ExperimentResult(
        name=tag,
        tables={
            f"exp3_exposures{suffix}.csv": (
                ("pair_id", "source_id", "recipient_id", "prompt", "overlap_mean", "gain_mean"),
                rows,
            ),
            f"exp3_binned{suffix}.csv": (
                ("bin", "mean_resid_overlap", "mean_resid_gain"),
                binned_rows,
            ),
        },
        summary=summary,
    )


def _redundancy_chunk(args):
    graphs, tasks, T, trace_mode, n_walks = args
    out = []
    for idx, h1, h2, a, b, prompt, entropy in tasks:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
        inst = run_redundancy_instance(
            graphs[h1],
            graphs[h2],
            graphs[a],
            graphs[b],
            prompt,
            T,
            rng,
            instance_id=idx,
            ids=(h1, h2, a, b),
            trace_mode=trace_mode,
            n_walks=n_walks,
        )
        out.append(inst)
    return out


def experiment4_redundancy(config: ExperimentConfig, population: AgentPopulation) -> ExperimentResult:
    """Matched Triad/Control instances and the source-clustered redundancy test."""
    config.validate()
    from .streams import stream_entropy

    q = population.q_values
    q_lo = np.quantile(q, config.source_quantile)
    q_hi = np.quantile(q, 1.0 - config.recipient_quantile)
    sources = [i for i in range(len(q)) if q[i] <= q_lo]
    recipients = [i for i in range(len(q)) if q[i] >= q_hi]
    if len(sources) < 2 or len(recipients) < 2:
        raise ParameterError("quantile pools too small (need >= 2 sources and recipients)")

    rng = derive_stream(config.master_seed, ["exp4", "sample"])
    tasks = []
    for idx in range(config.matched_instances):
        for _ in range(100):
            h1, h2 = (int(v) for v in rng.integers(0, len(sources), size=2))
            if h1 != h2:
                break
        else:
            raise ParameterError("exhausted retries drawing distinct sources")
        for _ in range(100):
            a, b = (int(v) for v in rng.integers(0, len(recipients), size=2))
            if a != b:
                break
        else:
            raise ParameterError("exhausted retries drawing distinct recipients")
        prompt = int(rng.integers(config.n))
        entropy = stream_entropy(config.master_seed, ["exp4", "inst", idx])
        tasks.append((idx, sources[h1], sources[h2], recipients[a], recipients[b], prompt, entropy))

    # ship only the pool graphs to workers
    needed = sorted(set(sources) | set(recipients))
    graph_map = {i: population.graphs[i] for i in needed}
    chunk_size = max(1, len(tasks) // max(1, config.threads * 8))
    chunks = [
        (graph_map, tasks[i : i + chunk_size], config.T, config.trace_mode, config.redundancy_walks)
        for i in range(0, len(tasks), chunk_size)
    ]
    instances = []
    for part in _run_chunked(_redundancy_chunk, chunks, config.threads):
        instances.extend(part)

    rows = [
        (
            inst.instance_id,
            inst.source1_id,
            inst.source2_id,
            inst.recipient_a_id,
            inst.recipient_b_id,
            inst.prompt,
            inst.r_triad,
            inst.r_control,
            inst.delta,
        )
        for inst in instances
    ]
    deltas = np.array([inst.delta for inst in instances])
    h1_ids = np.array([inst.source1_id for inst in instances])
    test = clustered_mean_test(deltas, h1_ids)
    # effect size at the cluster level: one paired mean difference per source
    source_means = [float(deltas[h1_ids == h].mean()) for h in np.unique(h1_ids)]
    dz_sources = cohens_dz(source_means)
    dz_raw = cohens_dz(deltas)
    summary = {
        "clustered_mean_test": test.to_json(),
        "mean_delta": float(test.coefficients[0]),
        "ci_low": float(test.ci_low[0]),
        "ci_high": float(test.ci_high[0]),
        "t_stat": float(test.extra.get("t_stat")),
        "cohens_dz": dz_sources,
        "cohens_dz_raw": dz_raw,
        "mean_r_triad": float(np.mean([inst.r_triad for inst in instances])),
        "mean_r_control": float(np.mean([inst.r_control for inst in instances])),
        # per-arm clustered SEs, consumed downstream for error bars
        "se_r_triad": float(clustered_mean_test([i.r_triad for i in instances], h1_ids).se[0]),
        "se_r_control": float(clustered_mean_test([i.r_control for i in instances], h1_ids).se[0]),
        "p_value": float(test.p_values[0]),
        "n_instances": len(instances),
        "n_sources": int(len(np.unique(h1_ids))),
        "n_source_pool": len(sources),
        "n_recipient_pool": len(recipients),
    }
    return ExperimentResult(
        name="exp4",
        tables={
            "exp4_redundancy.csv": (
                (
                    "instance_id",
                    "source1_id",
                    "source2_id",
                    "recipient_a_id",
                    "recipient_b_id",
                    "prompt",
                    "r_triad",
                    "r_control",
                    "delta",
                ),
                rows,
            )
        },
        summary=summary,
    )


def run_sweep(config: ExperimentConfig, axes: dict, experiments=("exp1", "exp2", "exp3", "exp4")) -> dict:
    """Re-run experiments over a grid of (T, n, k, seed) values.

    Returns a report with headline statistics per cell and a sign-consistency
    verdict across cells.
    """
    allowed = {"T", "n", "k", "seed"}
    if not axes or set(axes) - allowed:
        raise ParameterError(f"axes must be a nonempty subset of {sorted(allowed)}")
    grids = {name: list(vals) for name, vals in axes.items()}
    if any(not vals for vals in grids.values()):
        raise ParameterError("every sweep axis needs at least one value")

    names = sorted(grids)
    combos = [[]]
    for name in names:
        combos = [c + [(name, v)] for c in combos for v in grids[name]]

    cells = []
    for combo in combos:
        overrides = dict(combo)
        cfg = replace(
            config,
            T=overrides.get("T", config.T),
            n=overrides.get("n", config.n),
            k=overrides.get("k", config.k),
            master_seed=overrides.get("seed", config.master_seed),
        )
        cell = {"cell": overrides, "stats": {}}
        pop = None
        if {"exp2", "exp3", "exp4"} & set(experiments):
            pop = build_population(cfg)
        if "exp1" in experiments:
            res = experiment1_modularity_vs_p(cfg)
            cell["stats"]["exp1_spearman_rho"] = res.summary["spearman"]["estimate"]
        if "exp2" in experiments:
            res = experiment2_breadth_vs_modularity(cfg, pop)
            cell["stats"]["exp2_pearson_r"] = res.summary["pearson"]["estimate"]
        if "exp3" in experiments:
            res = experiment3_stimulation(cfg, pop)
            cell["stats"]["exp3_beta"] = res.summary["beta"]
        if "exp4" in experiments:
            res = experiment4_redundancy(cfg, pop)
            cell["stats"]["exp4_mean_delta"] = res.summary["mean_delta"]
            cell["stats"]["exp4_t"] = res.summary["t_stat"]
        cells.append(cell)

    checks = {
        "exp1_spearman_rho": lambda v: v < 0,
        "exp2_pearson_r": lambda v: v < 0,
        "exp3_beta": lambda v: v < 0,
        "exp4_mean_delta": lambda v: v > 0,
    }
    consistent = all(
        checks[key](cell["stats"][key])
        for cell in cells
        for key in cell["stats"]
        if key in checks
    )
    return {"cells": cells, "signs_consistent": consistent, "experiments": list(experiments)}


def write_tables(result: ExperimentResult, output_dir, force: bool = False) -> list:
    """Write an experiment's CSV tables; refuses to clobber without force."""
    os.makedirs(output_dir, exist_ok=True)
    written = []
    for fname, (header, rows) in result.tables.items():
        path = os.path.join(output_dir, fname)
        if os.path.exists(path) and not force:
            raise FileExistsError(f"{path} exists; pass force to overwrite")
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
        written.append(path)
    return written


def write_summary(summaries: dict, output_dir, force: bool = False) -> str:
    os.makedirs(output_dir, exist_ok=True)
    path = os.path.join(output_dir, "summary.json")
    if os.path.exists(path) and not force:
        raise FileExistsError(f"{path} exists; pass force to overwrite")
    with open(path, "w") as fh:
        json.dump(summaries, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def run_all(config: ExperimentConfig, output_dir=None, force: bool = False) -> dict:
    """Run experiments 1-4 and persist every table plus summary.json."""
    config.validate()
    out = output_dir if output_dir is not None else config.output_dir
    summaries = {}
    res1 = experiment1_modularity_vs_p(config)
    write_tables(res1, out, force)
    summaries["exp1"] = res1.summary
    population = build_population(config)
    for res in (
        experiment2_breadth_vs_modularity(config, population),
        experiment3_stimulation(config, population),
        experiment4_redundancy(config, population),
    ):
        write_tables(res, out, force)
        summaries[res.name] = res.summary
    write_summary(summaries, out, force)
    return summaries
