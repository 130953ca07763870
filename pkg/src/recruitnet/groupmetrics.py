"""Scoring of influencer groups against an area and a task portfolio.

A group is judged on three axes: how its members spread over the area's
weighted subareas (distribution), how its interest mix matches the
portfolio's interest weights (interest), and how many distinct followers
it reaches (coverage).  The overall rank is the geometric mean of the
three, so a zero on any axis zeroes the group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import pstdev
from typing import Iterable

from .socialgraph import NodeId, SocialGraph, unique_followers

_WEIGHT_TOL = 1e-9


def _check_weights(pairs: tuple[tuple[str, float], ...], what: str) -> None:
    if not pairs:
        raise ValueError(f"{what}: at least one entry required")
    labels = [label for label, _ in pairs]
    if len(set(labels)) != len(labels):
        raise ValueError(f"{what}: duplicate labels")
    for label, weight in pairs:
        if not weight > 0:
            raise ValueError(f"{what}: weight for {label!r} must be > 0")
    total = sum(weight for _, weight in pairs)
    if abs(total - 1.0) > _WEIGHT_TOL:
        raise ValueError(f"{what}: weights sum to {total}, expected 1")


@dataclass(frozen=True)
class AoiPartition:
    """Area of interest split into weighted subareas (weights sum to 1)."""

    subareas: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "subareas", tuple((str(l), float(w)) for l, w in self.subareas))
        _check_weights(self.subareas, "area partition")

    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.subareas)

    def weight(self, label: str) -> float:
        for known, weight in self.subareas:
            if known == label:
                return weight
        raise KeyError(f"unknown subarea {label!r}")

    def __contains__(self, label: object) -> bool:
        return any(known == label for known, _ in self.subareas)


@dataclass(frozen=True)
class Task:
    """One sensing task: where it is, how fast it must be reached, who may take it."""

    location: tuple[float, float]
    time_constraint_minutes: float
    domain: str
    min_reputation: float = 0.0

    def __post_init__(self) -> None:
        lat, lon = self.location
        if not (-90 <= lat <= 90 and -180 <= lon <= 180):
            raise ValueError(f"task location {self.location!r} out of range")
        # the travel-slack curve is log base time_constraint, so it needs > 1
        if not self.time_constraint_minutes > 1:
            raise ValueError("time_constraint_minutes must be > 1")
        if not 0 <= self.min_reputation <= 1:
            raise ValueError("min_reputation must be in [0, 1]")
        if not self.domain:
            raise ValueError("task domain must be non-empty")


@dataclass(frozen=True)
class TaskPortfolio:
    """The tasks to staff plus how much each interest domain matters."""

    tasks: tuple[Task, ...]
    interest_weights: tuple[tuple[str, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tasks", tuple(self.tasks))
        object.__setattr__(
            self,
            "interest_weights",
            tuple((str(l), float(w)) for l, w in self.interest_weights),
        )
        if not self.tasks:
            raise ValueError("portfolio: at least one task required")
        _check_weights(self.interest_weights, "interest weights")
        weighted = {label for label, _ in self.interest_weights}
        domains = {task.domain for task in self.tasks}
        if weighted != domains:
            raise ValueError(
                f"interest weights {sorted(weighted)} must match task domains {sorted(domains)}"
            )

    def interests(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.interest_weights)

    def weight(self, label: str) -> float:
        for known, weight in self.interest_weights:
            if known == label:
                return weight
        raise KeyError(f"unknown interest {label!r}")


@dataclass(frozen=True)
class InfluencerGroup:
    """A scored group of influencer nodes."""

    members: frozenset[NodeId]
    distribution: float
    interest: float
    unique_followers: int
    rank: float
    feasible: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", frozenset(self.members))
        if not self.members:
            raise ValueError("group members must be non-empty")
        if min(self.distribution, self.interest, self.rank) < 0 or self.unique_followers < 0:
            raise ValueError("group scores must be non-negative")
        expected = group_rank(self.distribution, self.interest, self.unique_followers)
        if self.feasible:
            if abs(self.rank - expected) > 1e-9:
                raise ValueError(f"rank {self.rank} inconsistent with component scores")
        elif self.rank != 0.0:
            raise ValueError("infeasible groups must carry rank 0")


def distribution_score(
    graph: SocialGraph, members: Iterable[NodeId], aoi: AoiPartition
) -> float:
    """Spatial spread score of the group over the weighted subareas.

    Counts members per covered subarea; the score is (number of covered
    subareas times their total weight) shrunk by exp(-spread) where
    spread is the population stdev of the member-count / weight ratios.
    It is maximised when every subarea is covered with counts
    proportional to the weights.
    """
    counts: dict[str, int] = {}
    for member in members:
        label = graph.node(member).general_location
        if label not in aoi:
            raise ValueError(f"member {member!r} located in {label!r}, outside the area")
        counts[label] = counts.get(label, 0) + 1
    if not counts:
        raise ValueError("members must be non-empty")
    covered_weight = sum(aoi.weight(label) for label in counts)
    ratios = [count / aoi.weight(label) for label, count in sorted(counts.items())]
    return len(counts) * covered_weight * math.exp(-pstdev(ratios))


def interest_score(
    graph: SocialGraph, members: Iterable[NodeId], portfolio: TaskPortfolio
) -> float:
    """Interest-mix score of the group against the portfolio weights.

    Counts holders per portfolio interest; the score is the weighted
    total of holders shrunk by exp(-spread) of the holder-count / weight
    ratios, taken over every portfolio interest including uncovered ones
    (so a missing interest drags the whole group down).
    """
    members = list(members)
    if not members:
        raise ValueError("members must be non-empty")
    interest_sets = [graph.node(member).interests for member in members]
    holders = {
        label: sum(1 for held in interest_sets if label in held)
        for label in portfolio.interests()
    }
    weighted_total = sum(portfolio.weight(label) * count for label, count in holders.items())
    ratios = [holders[label] / portfolio.weight(label) for label in portfolio.interests()]
    return weighted_total * math.exp(-pstdev(ratios))


def group_rank(distribution: float, interest: float, followers: int | float) -> float:
    """Geometric mean of the three component scores."""
    if min(distribution, interest, followers) < 0:
        raise ValueError("component scores must be non-negative")
    return (distribution * interest * followers) ** (1.0 / 3.0)


def group_feasible(
    graph: SocialGraph, members: Iterable[NodeId], portfolio: TaskPortfolio
) -> bool:
    """True when the members jointly hold every portfolio interest."""
    held: set[str] = set()
    for member in members:
        held.update(graph.node(member).interests)
    return set(portfolio.interests()) <= held


def score_group(
    graph: SocialGraph,
    members: Iterable[NodeId],
    aoi: AoiPartition,
    portfolio: TaskPortfolio,
) -> InfluencerGroup:
    """Full scorecard for a group; infeasible groups get rank 0."""
    members = frozenset(members)
    distribution = distribution_score(graph, members, aoi)
    interest = interest_score(graph, members, portfolio)
    followers = unique_followers(graph, members)
    feasible = group_feasible(graph, members, portfolio)
    rank = group_rank(distribution, interest, followers) if feasible else 0.0
    return InfluencerGroup(members, distribution, interest, followers, rank, feasible)
