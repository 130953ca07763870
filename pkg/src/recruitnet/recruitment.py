"""QoS-driven worker recruitment with optional substitution on rejection.

For one task, eligible pool workers are ranked and offered slots.  In
the dynamic modes a rejection moves the offer down the ranking until
someone accepts or the queue runs out; in the static modes a rejected
slot simply stays unfilled.  Worker quality is the geometric mean of
residual energy, interest level, travel-time slack, and reputation.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from .geo import haversine_km
from .groupmetrics import Task
from .mcspool import Worker, WorkerPool
from .socialgraph import NodeId

MODES = ("IIWRS", "GRS", "DGRS", "SWRS", "DSWRS")
DYNAMIC_MODES = frozenset({"IIWRS", "DGRS", "DSWRS"})
FOLLOWER_RANKED_MODES = frozenset({"SWRS", "DSWRS"})
SAMPLED_POOL_MODES = frozenset({"GRS", "DGRS"})

DEFAULT_GRS_POOL_SIZE = 182


@dataclass(frozen=True)
class RecruitConfig:
    group_size: int
    qos_min: float = 0.0
    acceptance_probability: float = 1.0
    mode: str = "IIWRS"
    grs_pool_size: int = DEFAULT_GRS_POOL_SIZE

    def __post_init__(self) -> None:
        if self.group_size < 1:
            raise ValueError("group_size must be >= 1")
        if not 0 <= self.qos_min <= 1:
            raise ValueError("qos_min must be in [0, 1]")
        if not 0 <= self.acceptance_probability <= 1:
            raise ValueError("acceptance_probability must be in [0, 1]")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if self.grs_pool_size < 1:
            raise ValueError("grs_pool_size must be >= 1")


@dataclass(frozen=True)
class FilledSlot:
    worker: NodeId
    qos: float


@dataclass(frozen=True)
class RecruitmentResult:
    """Outcome of one recruitment round.

    average_qos divides by group_size, not by the number of filled
    slots, so unfilled slots drag the average down.
    """

    slots: tuple[FilledSlot | None, ...]
    substitutions: int
    average_qos: float


def travel_time(worker: Worker, task: Task) -> float:
    """Minutes the worker needs to reach the task location."""
    return haversine_km(worker.gps, task.location) / worker.avg_speed_kmh * 60.0


def travel_time_factor(travel_minutes: float, time_constraint_minutes: float) -> float:
    """Slack left after travel, on a log scale: 1 when instant, 0 at the deadline.

    Computed as 1 - log(travel) / log(constraint), clamped to [0, 1];
    sub-minute travel times count as instant.
    """
    if travel_minutes < 0:
        raise ValueError("travel_minutes must be >= 0")
    if not time_constraint_minutes > 1:
        raise ValueError("time_constraint_minutes must be > 1")
    if travel_minutes == 0:
        return 1.0
    ratio = math.log(travel_minutes) / math.log(time_constraint_minutes)
    return 1.0 - max(0.0, min(ratio, 1.0))


def _interest_maxima(pool: WorkerPool, domain: str) -> tuple[float, int]:
    graph = pool.graph
    max_posts = 0.0
    max_followees = 0
    for worker in pool:
        max_posts = max(max_posts, worker.social.posts_per_interest.get(domain, 0.0))
        count = sum(
            1 for nid in graph.followees(worker.node) if domain in graph.node(nid).interests
        )
        max_followees = max(max_followees, count)
    return max_posts, max_followees


def _interest_level(
    worker: Worker, domain: str, pool: WorkerPool, maxima: tuple[float, int]
) -> float:
    max_posts, max_followees = maxima
    posts = worker.social.posts_per_interest.get(domain, 0.0)
    graph = pool.graph
    followees = sum(
        1 for nid in graph.followees(worker.node) if domain in graph.node(nid).interests
    )
    posts_part = posts / max_posts if max_posts > 0 else 0.0
    followee_part = followees / max_followees if max_followees > 0 else 0.0
    return (posts_part + followee_part) / 2.0


def interest_level(worker: Worker, task: Task, pool: WorkerPool) -> float:
    """How engaged the worker is with the task domain, relative to the pool.

    Average of two [0, 1] parts: post rate on the domain and number of
    followees interested in it, each normalised by the pool maximum (a
    zero maximum zeroes its part).
    """
    return _interest_level(worker, task.domain, pool, _interest_maxima(pool, task.domain))


def _qos(worker: Worker, task: Task, pool: WorkerPool, maxima: tuple[float, int]) -> float:
    level = _interest_level(worker, task.domain, pool, maxima)
    slack = travel_time_factor(travel_time(worker, task), task.time_constraint_minutes)
    product = worker.residual_energy * level * slack * worker.reputation
    return product ** 0.25


def qos(worker: Worker, task: Task, pool: WorkerPool) -> float:
    """Geometric mean of energy, interest level, travel slack, reputation."""
    return _qos(worker, task, pool, _interest_maxima(pool, task.domain))


def eligible(worker: Worker, task: Task, pool: WorkerPool, qos_min: float = 0.0) -> bool:
    """Whether the worker may be offered the task at all."""
    if task.domain not in worker.social.interests:
        return False
    if travel_time(worker, task) > task.time_constraint_minutes:
        return False
    if worker.reputation < task.min_reputation:
        return False
    return qos(worker, task, pool) >= qos_min


def _ranked_eligible(
    pool: WorkerPool, task: Task, cfg: RecruitConfig, norm_pool: WorkerPool | None
) -> list[tuple[NodeId, float]]:
    maxima = _interest_maxima(norm_pool if norm_pool is not None else pool, task.domain)
    kept = []
    for worker in pool:
        if task.domain not in worker.social.interests:
            continue
        if travel_time(worker, task) > task.time_constraint_minutes:
            continue
        if worker.reputation < task.min_reputation:
            continue
        score = _qos(worker, task, pool, maxima)
        if score < cfg.qos_min:
            continue
        kept.append((worker.node, score))
    if cfg.mode in FOLLOWER_RANKED_MODES:
        graph = pool.graph
        kept.sort(key=lambda item: (-graph.in_degree(item[0]), item[0]))
    else:
        kept.sort(key=lambda item: (-item[1], item[0]))
    return kept


def recruit_dynamic(
    pool: WorkerPool,
    task: Task,
    cfg: RecruitConfig,
    seed: int = 0,
    accept_script: Sequence[bool] | None = None,
    norm_pool: WorkerPool | None = None,
) -> RecruitmentResult:
    """Run one recruitment round for the task over the given pool.

    Eligible workers are ranked (by qos, or by follower count in the
    follower-ranked modes) and offered slots in order.  Each offer is
    accepted with cfg.acceptance_probability, or per accept_script when
    one is supplied for deterministic replay.  Dynamic modes walk down
    the ranking past rejections (each rejection on a slot that does get
    filled counts as one substitution); static modes leave the slot
    unfilled after the first rejection.

    norm_pool, when given, supplies the interest-level normalisation
    maxima so that qos values stay comparable across differently
    subsampled pools of the same experiment.
    """
    queue = _ranked_eligible(pool, task, cfg, norm_pool)
    rng = random.Random(seed)
    script = iter(accept_script) if accept_script is not None else None

    def accepts() -> bool:
        if script is None:
            return rng.random() < cfg.acceptance_probability
        try:
            return bool(next(script))
        except StopIteration:
            raise ValueError("accept_script ran out before the offers did") from None

    dynamic = cfg.mode in DYNAMIC_MODES
    slots: list[FilledSlot | None] = []
    substitutions = 0
    position = 0
    for _ in range(cfg.group_size):
        filled = None
        rejections = 0
        while position < len(queue):
            node_id, score = queue[position]
            position += 1
            if accepts():
                filled = FilledSlot(node_id, score)
                break
            rejections += 1
            if not dynamic:
                break
        slots.append(filled)
        if filled is not None:
            substitutions += rejections
    total = sum(slot.qos for slot in slots if slot is not None)
    return RecruitmentResult(tuple(slots), substitutions, total / cfg.group_size)


def build_mode_pool(
    full_pool: WorkerPool,
    cfg: RecruitConfig,
    seed: int = 0,
    individual_pool: WorkerPool | None = None,
) -> WorkerPool:
    """Pick the worker pool a mode recruits from.

    IIWRS uses the full influence-registered pool; GRS/DGRS draw a fixed
    size uniform subsample of it (the "definite registrants"); the
    follower-ranked modes recruit from the pool registered via the
    follower-count selection route, passed as individual_pool.
    """
    if cfg.mode == "IIWRS":
        return full_pool
    if cfg.mode in SAMPLED_POOL_MODES:
        if cfg.grs_pool_size > len(full_pool):
            raise ValueError(
                f"grs_pool_size {cfg.grs_pool_size} exceeds pool of {len(full_pool)}"
            )
        rng = random.Random(seed)
        chosen = rng.sample(full_pool.workers, cfg.grs_pool_size)
        return WorkerPool(chosen, full_pool.graph)
    if individual_pool is None:
        raise ValueError(f"mode {cfg.mode} needs the follower-route pool")
    return individual_pool
