"""Command-line entry point.

Subcommands: gen, exp1..exp4, sweep, all, verify. Configuration comes from
an optional TOML file, overridable by flags; the default output directory
can also be set via the SEMSIM_OUTPUT_DIR environment variable.

Exit codes: 0 success, 1 runtime failure (or failed verify), 2 bad config.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from .acceptance import ALL_CRITERIA, run_acceptance
from .errors import ParameterError
from .experiments import (
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
from .graphs import save_edge_list


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semsim",
        description="Deterministic semantic-network creativity simulations.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--config", help="TOML config file")
        p.add_argument("--seed", type=int, help="master seed override")
        p.add_argument("--out", help="output directory (default: env SEMSIM_OUTPUT_DIR or ./out)")
        p.add_argument("--force", action="store_true", help="overwrite existing output files")
        p.add_argument("-n", type=int, dest="n", help="node count override")
        p.add_argument("-k", type=int, dest="k", help="lattice degree override")
        p.add_argument("-T", type=int, dest="T", help="walk length override")
        p.add_argument("--threads", type=int, help="worker cap for parallel sections")
        p.add_argument(
            "--scale-factor",
            type=float,
            default=1.0,
            help="multiply sampled design sizes (population, pairs, instances)",
        )

    for name, desc in (
        ("gen", "generate the agent population and write population.csv + substrate"),
        ("exp1", "modularity vs rewiring probability"),
        ("exp2", "ideational breadth vs modularity"),
        ("exp3", "dyadic stimulation (two-way fixed effects)"),
        ("exp4", "shared-source redundancy (Triad vs Control)"),
        ("sweep", "robustness sweep over T/n/k/seed"),
        ("all", "run experiments 1-4 and write summary.json"),
        ("verify", "run the acceptance checks and print PASS/FAIL lines"),
    ):
        p = sub.add_parser(name, help=desc)
        common(p)
        if name == "sweep":
            p.add_argument("--axis-T", type=int, nargs="+", help="walk lengths to sweep")
            p.add_argument("--axis-seed", type=int, nargs="+", help="seeds to sweep")
            p.add_argument(
                "--experiments",
                nargs="+",
                default=["exp1", "exp2", "exp3", "exp4"],
                choices=["exp1", "exp2", "exp3", "exp4"],
            )
        if name == "exp3":
            p.add_argument("--ablation", action="store_true", help="disable trace incorporation")
        if name == "verify":
            p.add_argument("--criteria", nargs="+", default=list(ALL_CRITERIA), choices=ALL_CRITERIA)
            p.add_argument("--full-scale-ac4", action="store_true", help="run AC4 at 495,000 instances")
    return parser


def _load_config(args, apply_scale: bool = True) -> ExperimentConfig:
    cfg = ExperimentConfig.from_toml(args.config) if args.config else ExperimentConfig()
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    for name in ("n", "k", "T", "threads"):
        val = getattr(args, name, None)
        if val is not None:
            overrides[name] = val
    out = args.out or os.environ.get("SEMSIM_OUTPUT_DIR")
    if out:
        overrides["output_dir"] = out
    if overrides:
        cfg = replace(cfg, **overrides)
    if apply_scale and args.scale_factor != 1.0:
        cfg = cfg.scaled(args.scale_factor)
    cfg.validate()
    return cfg


def _print_headline(name: str, summary: dict) -> None:
    print(f"== {name} ==")
    for key in (
        "spearman",
        "kendall",
        "pearson",
    ):
        if key in summary:
            c = summary[key]
            print(f"  {key}: {c['estimate']:.4f} (p {c['p_report']})")
    if "aic_linear" in summary:
        print(f"  AIC linear={summary['aic_linear']:.1f} quadratic={summary['aic_quadratic']:.1f}")
    if "ols_linear" in summary:
        slope = summary["ols_linear"]["coefficients"][1]
        lo, hi = summary["ols_linear"]["ci_low"][1], summary["ols_linear"]["ci_high"][1]
        print(f"  OLS slope: {slope:.3f} [{lo:.3f}, {hi:.3f}]")
    if "theil_sen" in summary:
        print(f"  Theil-Sen slope: {summary['theil_sen']['coefficients'][1]:.3f}")
    if "beta" in summary:
        print(
            f"  FE beta: {summary['beta']:.3f} [{summary['ci_low']:.3f}, {summary['ci_high']:.3f}]"
            f"  (0.10 overlap -> {-summary['gain_change_per_0.10_overlap']:.2f} fewer new concepts)"
        )
    if "mean_delta" in summary:
        print(
            f"  mean delta: {summary['mean_delta']:.4f} [{summary['ci_low']:.4f}, {summary['ci_high']:.4f}]"
            f"  t={summary['t_stat']:.1f}  d_z={summary['cohens_dz']:.2f}"
        )


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
    except (ParameterError, OSError, KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.subcommand == "gen":
            pop = build_population(cfg)
            os.makedirs(cfg.output_dir, exist_ok=True)
            pop_path = os.path.join(cfg.output_dir, "population.csv")
            if os.path.exists(pop_path) and not args.force:
                raise FileExistsError(f"{pop_path} exists; use --force")
            with open(pop_path, "w") as fh:
                fh.write("agent_id,p,Q\n")
                for (agent_id, p), q in zip(pop.specs, pop.q_values):
                    fh.write(f"{agent_id},{p!r},{q!r}\n")
            save_edge_list(
                pop.substrate,
                os.path.join(cfg.output_dir, "substrate.edgelist"),
                cfg.k,
                0.0,
                cfg.master_seed,
            )
            print(f"wrote {pop_path} ({len(pop.graphs)} agents)")
            return 0

        if args.subcommand in ("exp1", "exp2", "exp3", "exp4"):
            if args.subcommand == "exp1":
                res = experiment1_modularity_vs_p(cfg)
            else:
                pop = build_population(cfg)
                if args.subcommand == "exp2":
                    res = experiment2_breadth_vs_modularity(cfg, pop)
                elif args.subcommand == "exp3":
                    res = experiment3_stimulation(cfg, pop, ablation=args.ablation)
                else:
                    res = experiment4_redundancy(cfg, pop)
            write_tables(res, cfg.output_dir, args.force)
            write_summary({res.name: res.summary}, cfg.output_dir, args.force)
            _print_headline(res.name, res.summary)
            return 0

        if args.subcommand == "sweep":
            axes = {}
            if args.axis_T:
                axes["T"] = args.axis_T
            if args.axis_seed:
                axes["seed"] = args.axis_seed
            if not axes:
                axes = {"T": [10, 20, 30]}
            report = run_sweep(cfg, axes, experiments=tuple(args.experiments))
            os.makedirs(cfg.output_dir, exist_ok=True)
            path = os.path.join(cfg.output_dir, "sweep.json")
            if os.path.exists(path) and not args.force:
                raise FileExistsError(f"{path} exists; use --force")
            with open(path, "w") as fh:
                json.dump(report, fh, indent=2, sort_keys=True)
                fh.write("\n")
            for cell in report["cells"]:
                print(cell["cell"], cell["stats"])
            print("signs consistent:", report["signs_consistent"])
            return 0 if report["signs_consistent"] else 1

        if args.subcommand == "all":
            summaries = run_all(cfg, force=args.force)
            for name in ("exp1", "exp2", "exp3", "exp4"):
                _print_headline(name, summaries[name])
            print(f"outputs in {cfg.output_dir}/")
            return 0

        if args.subcommand == "verify":
            # scale is applied inside run_acceptance so tolerances widen with it
            base_cfg = _load_config(args, apply_scale=False)
            checks = run_acceptance(
                base_cfg,
                scale_factor=args.scale_factor,
                criteria=tuple(args.criteria),
                full_scale_ac4=args.full_scale_ac4,
            )
            for check in checks:
                print(check.line())
            return 0 if all(c.passed for c in checks) else 1

        raise AssertionError(f"unhandled subcommand {args.subcommand}")
    except FileExistsError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure contract
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
