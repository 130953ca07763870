"""Turning influenced social nodes into a registered worker pool.

Nodes activated by a cascade register as workers.  Registration fills in
the sensing-side attributes the social graph does not carry: a GPS fix
jittered inside the node's subarea disc, an average travel speed, a
residual battery level, and a reputation score.  Attribute sources are
pluggable samplers so experiments can use constants, ranges, or values
resampled from a measured table.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .geo import destination_point
from .socialgraph import NodeId, SocialGraph, SocialNode, UnknownNodeError

Sampler = Callable[[random.Random], float]

ATTRIBUTE_COLUMNS = ("speed_kmh", "reputation")

DEFAULT_RADIUS_KM = 10.0
DEFAULT_REPUTATION = 0.5


def constant_sampler(value: float) -> Sampler:
    if not math.isfinite(value):
        raise ValueError("constant sampler needs a finite value")
    return lambda rng: value


def uniform_sampler(low: float, high: float) -> Sampler:
    if not (math.isfinite(low) and math.isfinite(high) and low <= high):
        raise ValueError(f"uniform sampler needs finite low <= high, got [{low}, {high}]")
    return lambda rng: rng.uniform(low, high)


def empirical_sampler(values: Sequence[float]) -> Sampler:
    """Resample (with replacement) from observed values."""
    pool = tuple(float(v) for v in values)
    if not pool:
        raise ValueError("empirical sampler needs at least one value")
    return lambda rng: pool[rng.randrange(len(pool))]


@dataclass(frozen=True)
class SubareaGeometry:
    """A subarea modelled as a disc: centre plus radius."""

    center: tuple[float, float]
    radius_km: float = DEFAULT_RADIUS_KM

    def __post_init__(self) -> None:
        lat, lon = self.center
        if not (-90 <= lat <= 90 and -180 <= lon <= 180):
            raise ValueError(f"subarea centre {self.center!r} out of range")
        if not self.radius_km > 0:
            raise ValueError("radius_km must be > 0")


@dataclass(frozen=True)
class AttributeModel:
    """Where registration draws worker attributes from."""

    geometry: Mapping[str, SubareaGeometry]
    speed_sampler: Sampler = field(default=uniform_sampler(5.0, 50.0))
    energy_sampler: Sampler = field(default=uniform_sampler(0.0, 1.0))
    reputation_sampler: Sampler = field(default=constant_sampler(DEFAULT_REPUTATION))

    def __post_init__(self) -> None:
        object.__setattr__(self, "geometry", dict(self.geometry))


@dataclass(frozen=True)
class Worker:
    """A registered worker: social identity plus sensing attributes."""

    social: SocialNode
    gps: tuple[float, float]
    avg_speed_kmh: float
    residual_energy: float
    reputation: float

    def __post_init__(self) -> None:
        if not self.avg_speed_kmh > 0:
            raise ValueError(f"worker {self.node}: avg_speed_kmh must be > 0")
        if not 0 <= self.residual_energy <= 1:
            raise ValueError(f"worker {self.node}: residual_energy must be in [0, 1]")
        if not 0 <= self.reputation <= 1:
            raise ValueError(f"worker {self.node}: reputation must be in [0, 1]")

    @property
    def node(self) -> NodeId:
        return self.social.id


class WorkerPool:
    """Immutable roster of registered workers, bound to their social graph.

    The graph reference is kept because recruitment scoring needs social
    structure (followee interests, follower counts), not just the worker
    attributes.
    """

    def __init__(self, workers: Iterable[Worker], graph: SocialGraph) -> None:
        roster = sorted(workers, key=lambda worker: worker.node)
        by_node: dict[NodeId, Worker] = {}
        for worker in roster:
            if worker.node in by_node:
                raise ValueError(f"worker {worker.node!r} registered twice")
            if worker.node not in graph:
                raise UnknownNodeError(f"worker {worker.node!r} is not a graph node")
            by_node[worker.node] = worker
        self._workers = tuple(roster)
        self._by_node = by_node
        self._graph = graph

    @property
    def workers(self) -> tuple[Worker, ...]:
        return self._workers

    @property
    def graph(self) -> SocialGraph:
        return self._graph

    def get(self, node_id: NodeId) -> Worker:
        try:
            return self._by_node[node_id]
        except KeyError:
            raise UnknownNodeError(f"no registered worker for node {node_id!r}") from None

    def __contains__(self, node_id: object) -> bool:
        return node_id in self._by_node

    def __iter__(self):
        return iter(self._workers)

    def __len__(self) -> int:
        return len(self._workers)


def register(
    graph: SocialGraph,
    active: Iterable[NodeId],
    model: AttributeModel,
    seed: int,
) -> WorkerPool:
    """Register the given (cascade-activated) nodes as workers.

    Nodes are processed in ascending id order with a single seeded RNG
    stream, so the same inputs always produce the same pool.  Each GPS
    fix lands inside the node's subarea disc: distance from the centre is
    radius * sqrt(u) at a uniform bearing, which is uniform over the disc
    and can never exceed the radius.
    """
    node_ids = sorted(set(active))
    rng = random.Random(seed)
    workers = []
    for node_id in node_ids:
        node = graph.node(node_id)
        geometry = model.geometry.get(node.general_location)
        if geometry is None:
            raise ValueError(
                f"no geometry for subarea {node.general_location!r} (node {node_id!r})"
            )
        distance = geometry.radius_km * math.sqrt(rng.random())
        bearing = rng.uniform(0.0, 2.0 * math.pi)
        gps = destination_point(geometry.center, bearing, distance)
        speed = model.speed_sampler(rng)
        energy = model.energy_sampler(rng)
        reputation = model.reputation_sampler(rng)
        try:
            workers.append(Worker(node, gps, speed, energy, reputation))
        except ValueError as exc:
            raise ValueError(f"sampled attributes invalid: {exc}") from None
    return WorkerPool(workers, graph)


@dataclass(frozen=True)
class AttributeTable:
    """A measured single-column attribute sample loaded from CSV."""

    column: str
    values: tuple[float, ...]

    def sampler(self) -> Sampler:
        return empirical_sampler(self.values)


def load_attribute_table(path: str | Path) -> AttributeTable:
    """Load a one-column CSV of measured speed_kmh or reputation values.

    The header names the column; values are range-checked (speed > 0,
    reputation in [0, 1]) and errors report the offending row.
    """
    path = Path(path)
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or len(header) != 1 or header[0] not in ATTRIBUTE_COLUMNS:
            raise ValueError(
                f"{path}: expected a single-column header, one of {ATTRIBUTE_COLUMNS}"
            )
        column = header[0]
        values = []
        for row in reader:
            where = f"{path}, line {reader.line_num}"
            if len(row) != 1:
                raise ValueError(f"{where}: expected 1 field, got {len(row)}")
            try:
                value = float(row[0])
            except ValueError:
                raise ValueError(f"{where}: {row[0]!r} is not a number") from None
            if column == "speed_kmh" and not value > 0:
                raise ValueError(f"{where}: speed_kmh must be > 0, got {value}")
            if column == "reputation" and not 0 <= value <= 1:
                raise ValueError(f"{where}: reputation must be in [0, 1], got {value}")
            values.append(value)
    if not values:
        raise ValueError(f"{path}: table has no data rows")
    return AttributeTable(column, tuple(values))
