"""Batch experiments comparing selection routes and recruitment modes.

Three comparisons, all repetition-averaged with seeds derived from the
master seed so cells are independent: group selection vs individual
greedy selection (run_im_comparison), interest-aware vs follower-count
selection measured through a cascade (run_interest_comparison), and the
five recruitment modes over an acceptance-probability grid
(run_full_comparison).  Rows share one frozen CSV schema.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from pathlib import Path
from statistics import fmean, pstdev
from typing import Iterable, Sequence

from .config import ExperimentConfig
from .diffusion import interested_influence, simulate_ic
from .influencemax import ga_select, greedy_select
from .mcspool import WorkerPool, register
from .recruitment import (
    FOLLOWER_RANKED_MODES,
    SAMPLED_POOL_MODES,
    RecruitmentResult,
    build_mode_pool,
    recruit_dynamic,
)
from .seeding import derive_seed
from .socialgraph import NodeId, SocialGraph, filter_candidates, unique_followers

RESULT_HEADER = (
    "mode",
    "influencer_size",
    "acceptance_probability",
    "metric",
    "mean",
    "std",
    "repetitions",
)


@dataclass(frozen=True)
class ResultRow:
    """One aggregated experiment cell; empty fields are not applicable."""

    mode: str
    influencer_size: int | None
    acceptance_probability: float | None
    metric: str
    mean: float
    std: float
    repetitions: int


def _row(
    mode: str,
    size: int | None,
    acceptance: float | None,
    metric: str,
    values: Sequence[float],
) -> ResultRow:
    return ResultRow(
        mode=mode,
        influencer_size=size,
        acceptance_probability=acceptance,
        metric=metric,
        mean=fmean(values),
        std=pstdev(values) if len(values) > 1 else 0.0,
        repetitions=len(values),
    )


def rows_to_csv_text(rows: Iterable[ResultRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(RESULT_HEADER)
    for row in rows:
        writer.writerow(
            [
                row.mode,
                "" if row.influencer_size is None else row.influencer_size,
                "" if row.acceptance_probability is None else repr(row.acceptance_probability),
                row.metric,
                repr(row.mean),
                repr(row.std),
                row.repetitions,
            ]
        )
    return buffer.getvalue()


def write_rows(rows: Iterable[ResultRow], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(rows_to_csv_text(rows))


def _degree_candidates(graph: SocialGraph, cfg: ExperimentConfig) -> tuple[NodeId, ...]:
    """Location and reach filter only; interests deliberately ignored."""
    labels = set(cfg.aoi.labels())
    return tuple(
        nid
        for nid in graph.node_ids()
        if graph.node(nid).general_location in labels
        and graph.in_degree(nid) >= cfg.min_degree
    )


def _follower_count_proxy(graph: SocialGraph):
    return lambda members: float(unique_followers(graph, members))


def run_im_comparison(cfg: ExperimentConfig) -> list[ResultRow]:
    """Group-based genetic selection vs individual-based greedy selection.

    For each influencer size, the greedy baseline picks by marginal
    unique-follower gain and the genetic route optimises the group rank;
    both report unique_followers and rank.  The greedy solution is also
    injected into the genetic population, so the rank row of the genetic
    route can never fall below the greedy one.
    """
    graph = cfg.build_graph()
    candidates = filter_candidates(graph, cfg.aoi, cfg.portfolio, cfg.min_degree)
    proxy = _follower_count_proxy(graph)
    rows: list[ResultRow] = []
    for size in cfg.influencer_sizes:
        greedy = greedy_select(graph, candidates, size, cfg.aoi, cfg.portfolio, proxy=proxy)
        group_followers: list[float] = []
        group_rank: list[float] = []
        for rep in range(cfg.repetitions):
            chosen = ga_select(
                graph,
                candidates,
                size,
                cfg.aoi,
                cfg.portfolio,
                cfg.ga,
                seed=derive_seed(cfg.master_seed, "im", size, rep),
                extra_seeds=[greedy.members],
            )
            group_followers.append(float(chosen.unique_followers))
            group_rank.append(chosen.rank)
        reps = cfg.repetitions
        rows.append(_row("group", size, None, "unique_followers", group_followers))
        rows.append(_row("group", size, None, "rank", group_rank))
        rows.append(
            _row("individual", size, None, "unique_followers", [float(greedy.unique_followers)] * reps)
        )
        rows.append(_row("individual", size, None, "rank", [greedy.rank] * reps))
    return rows


def run_interest_comparison(cfg: ExperimentConfig) -> list[ResultRow]:
    """Interest-aware selection vs raw follower-count selection, after a cascade.

    The rank_based route selects over fully filtered candidates with the
    group-rank objective; the followers_based route drops the interest
    filter and feasibility and optimises unique followers only.  Each
    repetition runs one cascade per route and reports the activated count
    and how many activated nodes hold a portfolio interest.
    """
    graph = cfg.build_graph()
    rank_candidates = filter_candidates(graph, cfg.aoi, cfg.portfolio, cfg.min_degree)
    count_candidates = _degree_candidates(graph, cfg)
    proxy = _follower_count_proxy(graph)
    rows: list[ResultRow] = []
    for size in cfg.influencer_sizes:
        samples = {
            ("rank_based", "influence"): [],
            ("rank_based", "interested_influence"): [],
            ("followers_based", "influence"): [],
            ("followers_based", "interested_influence"): [],
        }
        for rep in range(cfg.repetitions):
            routes = {
                "rank_based": ga_select(
                    graph,
                    rank_candidates,
                    size,
                    cfg.aoi,
                    cfg.portfolio,
                    cfg.ga,
                    seed=derive_seed(cfg.master_seed, "interest", "rank", size, rep),
                ),
                "followers_based": ga_select(
                    graph,
                    count_candidates,
                    size,
                    cfg.aoi,
                    cfg.portfolio,
                    cfg.ga,
                    seed=derive_seed(cfg.master_seed, "interest", "count", size, rep),
                    proxy=proxy,
                    require_feasible=False,
                ),
            }
            for route, group in routes.items():
                outcome = simulate_ic(
                    graph,
                    group.members,
                    cfg.diffusion,
                    derive_seed(cfg.master_seed, "interest", route, "cascade", size, rep),
                )
                samples[(route, "influence")].append(float(len(outcome.active)))
                samples[(route, "interested_influence")].append(
                    float(interested_influence(graph, outcome.active, cfg.portfolio))
                )
        for (route, metric), values in samples.items():
            rows.append(_row(route, size, None, metric, values))
    return rows


@dataclass(frozen=True)
class RoundReport:
    """One end-to-end recruitment round, for the CLI and the service."""

    mode: str
    task_domain: str
    group_members: tuple[NodeId, ...]
    registered_pool: int
    mode_pool: int
    result: RecruitmentResult


def run_recruitment_round(cfg: ExperimentConfig, task_index: int = 0) -> RoundReport:
    """Select, cascade, register, then recruit for one task.

    The follower-count route pool is only built when the configured mode
    actually recruits from it.
    """
    graph = cfg.build_graph()
    if not 0 <= task_index < len(cfg.portfolio.tasks):
        raise ValueError(f"task index {task_index} out of range")
    task = cfg.portfolio.tasks[task_index]
    size = cfg.influencer_sizes[0]
    model = cfg.attribute_model()

    candidates = filter_candidates(graph, cfg.aoi, cfg.portfolio, cfg.min_degree)
    group = ga_select(
        graph,
        candidates,
        size,
        cfg.aoi,
        cfg.portfolio,
        cfg.ga,
        seed=derive_seed(cfg.master_seed, "round", "ga"),
    )
    outcome = simulate_ic(
        graph, group.members, cfg.diffusion, derive_seed(cfg.master_seed, "round", "cascade")
    )
    pool = register(
        graph, outcome.active, model, derive_seed(cfg.master_seed, "round", "register")
    )

    individual_pool = None
    norm = None
    if cfg.recruit.mode in FOLLOWER_RANKED_MODES:
        baseline = greedy_select(
            graph,
            _degree_candidates(graph, cfg),
            size,
            cfg.aoi,
            cfg.portfolio,
            proxy=_follower_count_proxy(graph),
        )
        base_outcome = simulate_ic(
            graph,
            baseline.members,
            cfg.diffusion,
            derive_seed(cfg.master_seed, "round", "cascade-individual"),
        )
        individual_pool = register(
            graph,
            base_outcome.active,
            model,
            derive_seed(cfg.master_seed, "round", "register-individual"),
        )
    elif cfg.recruit.mode in SAMPLED_POOL_MODES:
        norm = pool
    mode_pool = build_mode_pool(
        pool,
        cfg.recruit,
        seed=derive_seed(cfg.master_seed, "round", "pool"),
        individual_pool=individual_pool,
    )
    result = recruit_dynamic(
        mode_pool,
        task,
        cfg.recruit,
        seed=derive_seed(cfg.master_seed, "round", "offers"),
        norm_pool=norm,
    )
    return RoundReport(
        mode=cfg.recruit.mode,
        task_domain=task.domain,
        group_members=tuple(sorted(group.members)),
        registered_pool=len(pool),
        mode_pool=len(mode_pool),
        result=result,
    )


def run_full_comparison(cfg: ExperimentConfig) -> list[ResultRow]:
    """All five recruitment modes across the acceptance-probability grid.

    Each repetition builds the two route pools once (group-rank route and
    follower-count route: select, cascade, register) and reuses them for
    every (mode, acceptance) cell, so adding grid points never changes
    the numbers of existing cells.  The influencer size is the first
    entry of cfg.influencer_sizes.  Reported per cell: average_qos and
    substitutions per recruitment round, averaged over the portfolio's
    tasks.
    """
    graph = cfg.build_graph()
    size = cfg.influencer_sizes[0]
    rank_candidates = filter_candidates(graph, cfg.aoi, cfg.portfolio, cfg.min_degree)
    count_candidates = _degree_candidates(graph, cfg)
    proxy = _follower_count_proxy(graph)
    model = cfg.attribute_model()

    group_pools: list[WorkerPool] = []
    follower_pools: list[WorkerPool] = []
    individual = greedy_select(
        graph, count_candidates, size, cfg.aoi, cfg.portfolio, proxy=proxy
    )
    for rep in range(cfg.repetitions):
        group = ga_select(
            graph,
            rank_candidates,
            size,
            cfg.aoi,
            cfg.portfolio,
            cfg.ga,
            seed=derive_seed(cfg.master_seed, "full", "ga", rep),
        )
        for route, members, pools in (
            ("group", group.members, group_pools),
            ("individual", individual.members, follower_pools),
        ):
            outcome = simulate_ic(
                graph,
                members,
                cfg.diffusion,
                derive_seed(cfg.master_seed, "full", route, "cascade", rep),
            )
            pools.append(
                register(
                    graph,
                    outcome.active,
                    model,
                    derive_seed(cfg.master_seed, "full", route, "register", rep),
                )
            )

    rows: list[ResultRow] = []
    for mode in cfg.modes:
        mode_pools: list[tuple[WorkerPool, WorkerPool | None]] = []
        for rep in range(cfg.repetitions):
            recruit_cfg = replace(cfg.recruit, mode=mode)
            # the sample seed must not depend on the mode: GRS and DGRS
            # have to recruit from the same definite-registrant pool for
            # their static/dynamic comparison to be paired
            pool = build_mode_pool(
                group_pools[rep],
                recruit_cfg,
                seed=derive_seed(cfg.master_seed, "full", "pool", rep),
                individual_pool=follower_pools[rep],
            )
            # subsampled and follower-route pools still normalise interest
            # levels against their parent pool so qos stays comparable
            if mode in SAMPLED_POOL_MODES:
                norm = group_pools[rep]
            elif mode in FOLLOWER_RANKED_MODES:
                norm = follower_pools[rep]
            else:
                norm = None
            mode_pools.append((pool, norm))
        for acceptance in cfg.acceptance_grid:
            qos_values: list[float] = []
            substitution_values: list[float] = []
            recruit_cfg = replace(cfg.recruit, mode=mode, acceptance_probability=acceptance)
            for rep in range(cfg.repetitions):
                pool, norm = mode_pools[rep]
                per_task_qos = []
                per_task_subs = []
                for index, task in enumerate(cfg.portfolio.tasks):
                    # one acceptance-draw stream per grid cell, shared by
                    # all modes, so each static mode is paired with its
                    # dynamic counterpart offer for offer
                    result = recruit_dynamic(
                        pool,
                        task,
                        recruit_cfg,
                        seed=derive_seed(
                            cfg.master_seed, "full", "offers", repr(acceptance), index, rep
                        ),
                        norm_pool=norm,
                    )
                    per_task_qos.append(result.average_qos)
                    per_task_subs.append(float(result.substitutions))
                qos_values.append(fmean(per_task_qos))
                substitution_values.append(fmean(per_task_subs))
            rows.append(_row(mode, size, acceptance, "average_qos", qos_values))
            rows.append(_row(mode, size, acceptance, "substitutions", substitution_values))
    return rows
