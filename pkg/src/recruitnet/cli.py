"""Command line front end.

Subcommands: gen (materialise the configured graph to CSV), im (one
influencer selection), diffuse (Monte Carlo influence estimate), recruit
(one recruitment round through the whole pipeline), experiment (batch
comparison written to CSV).  Exit codes: 0 success, 1 usage or config
errors, 2 runtime failures.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .config import ConfigError, ExperimentConfig, load_config
from .diffusion import estimate_influence
from .expharness import (
    run_full_comparison,
    run_im_comparison,
    run_interest_comparison,
    run_recruitment_round,
    write_rows,
)
from .groupmetrics import InfluencerGroup
from .influencemax import exhaustive_select, ga_select, greedy_select
from .seeding import derive_seed
from .socialgraph import filter_candidates, save_graph, unique_followers


class _Parser(argparse.ArgumentParser):
    # usage problems are exit code 1, not argparse's default 2
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="recruitnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="experiment TOML file")
        p.add_argument("--seed", type=int, default=None, help="override the master seed")

    p_gen = sub.add_parser("gen", help="write the configured graph to CSV files")
    common(p_gen)
    p_gen.add_argument("--nodes-out", required=True)
    p_gen.add_argument("--edges-out", required=True)

    p_im = sub.add_parser("im", help="select one influencer group")
    common(p_im)
    p_im.add_argument("--k", type=int, default=None, help="group size (default: config)")
    p_im.add_argument(
        "--method",
        choices=("group", "individual", "exhaustive"),
        default="group",
        help="genetic group search, greedy follower-count baseline, or exact scan",
    )

    p_diffuse = sub.add_parser("diffuse", help="estimate influence of a seed set")
    common(p_diffuse)
    p_diffuse.add_argument("--seeds", required=True, help="comma-separated node ids")

    p_recruit = sub.add_parser("recruit", help="run one recruitment round end to end")
    common(p_recruit)
    p_recruit.add_argument("--task-index", type=int, default=0)

    p_exp = sub.add_parser("experiment", help="run a batch comparison, write CSV")
    common(p_exp)
    p_exp.add_argument("--comparison", choices=("im", "interest", "full"), required=True)
    p_exp.add_argument("--out", default=None, help="output CSV (default: config output)")
    return parser


def _print_group(group: InfluencerGroup) -> None:
    print("members:", ",".join(sorted(group.members)))
    print("unique_followers:", group.unique_followers)
    print("distribution:", repr(group.distribution))
    print("interest:", repr(group.interest))
    print("rank:", repr(group.rank))
    print("feasible:", "yes" if group.feasible else "no")


def _cmd_gen(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    graph = cfg.build_graph()
    save_graph(graph, args.nodes_out, args.edges_out)
    print(f"wrote {len(graph)} nodes to {args.nodes_out}")
    print(f"wrote {len(graph.edges)} edges to {args.edges_out}")
    return 0


def _cmd_im(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    graph = cfg.build_graph()
    k = args.k if args.k is not None else cfg.influencer_sizes[0]
    candidates = filter_candidates(graph, cfg.aoi, cfg.portfolio, cfg.min_degree)
    if args.method == "group":
        group = ga_select(
            graph,
            candidates,
            k,
            cfg.aoi,
            cfg.portfolio,
            cfg.ga,
            seed=derive_seed(cfg.master_seed, "cli-im", k),
        )
    elif args.method == "individual":
        proxy = lambda members: float(unique_followers(graph, members))
        group = greedy_select(graph, candidates, k, cfg.aoi, cfg.portfolio, proxy=proxy)
    else:
        group = exhaustive_select(graph, candidates, k, cfg.aoi, cfg.portfolio)
    print("method:", args.method)
    print("candidates:", len(candidates))
    _print_group(group)
    return 0


def _cmd_diffuse(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    graph = cfg.build_graph()
    seeds = [part for part in args.seeds.split(",") if part]
    mean, sizes = estimate_influence(
        graph, seeds, cfg.diffusion, derive_seed(cfg.master_seed, "cli-diffuse")
    )
    print("seeds:", ",".join(sorted(set(seeds))))
    print("runs:", cfg.diffusion.runs)
    print("mean_influence:", repr(mean))
    print("min:", min(sizes))
    print("max:", max(sizes))
    return 0


def _cmd_recruit(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    report = run_recruitment_round(cfg, args.task_index)
    print("mode:", report.mode)
    print("task_domain:", report.task_domain)
    print("group:", ",".join(report.group_members))
    print("registered_pool:", report.registered_pool)
    print("mode_pool:", report.mode_pool)
    for index, slot in enumerate(report.result.slots, start=1):
        if slot is None:
            print(f"slot {index}: unfilled")
        else:
            print(f"slot {index}: {slot.worker} qos={slot.qos!r}")
    print("substitutions:", report.result.substitutions)
    print("average_qos:", repr(report.result.average_qos))
    return 0


def _cmd_experiment(cfg: ExperimentConfig, args: argparse.Namespace) -> int:
    runners = {
        "im": run_im_comparison,
        "interest": run_interest_comparison,
        "full": run_full_comparison,
    }
    out = args.out or cfg.output_path
    if out is None:
        print("no output path: pass --out or set [experiment] output", file=sys.stderr)
        return 1
    rows = runners[args.comparison](cfg)
    write_rows(rows, out)
    print(f"wrote {len(rows)} rows to {out}")
    return 0


_HANDLERS = {
    "gen": _cmd_gen,
    "im": _cmd_im,
    "diffuse": _cmd_diffuse,
    "recruit": _cmd_recruit,
    "experiment": _cmd_experiment,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = replace(cfg, master_seed=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        return _HANDLERS[args.command](cfg, args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
