"""Independent cascade diffusion over the follower graph.

Activation spreads from a node to its followers: when a node becomes
active it gets exactly one chance, in the next step, to activate each of
its still-inactive followers with a fixed probability.  The process is
progressive (nobody deactivates) and stops when a step activates no one.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from statistics import fmean
from typing import Callable, Iterable

from .groupmetrics import TaskPortfolio
from .seeding import derive_seed
from .socialgraph import NodeId, SocialGraph


@dataclass(frozen=True)
class DiffusionConfig:
    activation_probability: float = 0.02
    runs: int = 100

    def __post_init__(self) -> None:
        if not 0 <= self.activation_probability <= 1:
            raise ValueError("activation_probability must be in [0, 1]")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")


@dataclass(frozen=True)
class DiffusionOutcome:
    """Final active set and the number of steps that activated someone."""

    active: frozenset[NodeId]
    steps: int


def simulate_ic(
    graph: SocialGraph,
    seeds: Iterable[NodeId],
    cfg: DiffusionConfig,
    rng_seed: int,
    on_attempt: Callable[[NodeId, NodeId], None] | None = None,
) -> DiffusionOutcome:
    """One cascade run from the seed set; deterministic for a given rng_seed.

    Frontier nodes are processed in sorted order so the draw sequence is
    reproducible.  on_attempt, when set, observes every (activator,
    follower) activation attempt; it exists for tests that check each
    edge is tried at most once.
    """
    seed_list = sorted(set(seeds))
    for seed in seed_list:
        graph.node(seed)
    rng = random.Random(rng_seed)
    probability = cfg.activation_probability
    active: set[NodeId] = set(seed_list)
    frontier = seed_list
    steps = 0
    while frontier:
        activated: list[NodeId] = []
        for node in frontier:
            for follower in graph.followers(node):
                if follower in active:
                    continue
                if on_attempt is not None:
                    on_attempt(node, follower)
                if rng.random() < probability:
                    active.add(follower)
                    activated.append(follower)
        if not activated:
            break
        steps += 1
        frontier = sorted(activated)
    return DiffusionOutcome(frozenset(active), steps)


def estimate_influence(
    graph: SocialGraph,
    seeds: Iterable[NodeId],
    cfg: DiffusionConfig,
    rng_seed: int,
) -> tuple[float, list[int]]:
    """Monte Carlo estimate of the expected activated-set size.

    Runs cfg.runs cascades, each with its own seed derived from rng_seed
    and the run index, and returns the mean size plus the per-run sizes.
    """
    seed_list = sorted(set(seeds))
    sizes = [
        len(simulate_ic(graph, seed_list, cfg, derive_seed(rng_seed, run)).active)
        for run in range(cfg.runs)
    ]
    return fmean(sizes), sizes


def interested_influence(
    graph: SocialGraph, active: Iterable[NodeId], portfolio: TaskPortfolio
) -> int:
    """How many of the active nodes hold at least one portfolio interest."""
    wanted = set(portfolio.interests())
    return sum(1 for node_id in active if graph.node(node_id).interests & wanted)
