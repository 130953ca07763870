"""Directed follower graph with per-node location, interests, and post rates.

An edge (u, v) means "u follows v", so influence travels from v to its
followers.  Nodes carry the attributes the selection and recruitment
stages need: a coarse location label, a set of interest labels, and an
average post rate per interest.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import TYPE_CHECKING, Iterable, Mapping

if TYPE_CHECKING:
    from .groupmetrics import AoiPartition, TaskPortfolio

NodeId = str

NODE_HEADER = ("id", "general_location", "interests", "posts")
EDGE_HEADER = ("follower", "followee")

DEFAULT_INTERESTS = ("sports", "music", "movies", "books", "gaming")
DEFAULT_SUBAREAS = ("central", "north", "south", "east", "west")


class GraphError(ValueError):
    """Base class for graph construction and ingestion failures."""


class GraphParseError(GraphError):
    """A CSV row could not be parsed; message carries file and line number."""


class DuplicateNodeError(GraphError):
    """The same node id appeared more than once."""


class DanglingEdgeError(GraphError):
    """An edge references a node id that was never declared."""


class UnknownNodeError(GraphError):
    """An operation referenced a node id missing from the graph."""


@dataclass(frozen=True)
class SocialNode:
    """One account: where it is, what it cares about, how much it posts."""

    id: NodeId
    general_location: str
    interests: frozenset[str]
    posts_per_interest: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.id:
            raise GraphError("node id must be a non-empty string")
        if not self.general_location:
            raise GraphError(f"node {self.id!r}: general_location must be non-empty")
        object.__setattr__(self, "interests", frozenset(self.interests))
        if not self.interests:
            raise GraphError(f"node {self.id!r}: interests must be non-empty")
        posts = dict(self.posts_per_interest)
        for label, rate in posts.items():
            if label not in self.interests:
                raise GraphError(
                    f"node {self.id!r}: post rate for {label!r} which is not an interest"
                )
            if not (isinstance(rate, (int, float)) and math.isfinite(rate) and rate >= 0):
                raise GraphError(f"node {self.id!r}: post rate for {label!r} must be >= 0")
        object.__setattr__(self, "posts_per_interest", posts)


class SocialGraph:
    """Immutable directed graph over SocialNodes.

    Adjacency is precomputed at construction: followers(v) are the nodes
    with an edge into v (the audience influence reaches), followees(u)
    are the nodes u follows.
    """

    def __init__(
        self, nodes: Iterable[SocialNode], edges: Iterable[tuple[NodeId, NodeId]]
    ) -> None:
        node_map: dict[NodeId, SocialNode] = {}
        for node in nodes:
            if node.id in node_map:
                raise DuplicateNodeError(f"duplicate node id {node.id!r}")
            node_map[node.id] = node

        edge_set: set[tuple[NodeId, NodeId]] = set()
        followers: dict[NodeId, list[NodeId]] = {nid: [] for nid in node_map}
        followees: dict[NodeId, list[NodeId]] = {nid: [] for nid in node_map}
        for follower, followee in edges:
            if follower not in node_map:
                raise DanglingEdgeError(f"edge references unknown follower {follower!r}")
            if followee not in node_map:
                raise DanglingEdgeError(f"edge references unknown followee {followee!r}")
            if follower == followee:
                raise GraphError(f"self-loop on node {follower!r}")
            pair = (follower, followee)
            if pair in edge_set:
                raise GraphError(f"duplicate edge {pair!r}")
            edge_set.add(pair)
            followers[followee].append(follower)
            followees[follower].append(followee)

        self._nodes = MappingProxyType(node_map)
        self._edges = frozenset(edge_set)
        self._followers = {nid: tuple(sorted(ids)) for nid, ids in followers.items()}
        self._followees = {nid: tuple(sorted(ids)) for nid, ids in followees.items()}

    @property
    def nodes(self) -> Mapping[NodeId, SocialNode]:
        return self._nodes

    @property
    def edges(self) -> frozenset[tuple[NodeId, NodeId]]:
        return self._edges

    def node(self, node_id: NodeId) -> SocialNode:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNodeError(f"unknown node id {node_id!r}") from None

    def node_ids(self) -> tuple[NodeId, ...]:
        return tuple(sorted(self._nodes))

    def followers(self, node_id: NodeId) -> tuple[NodeId, ...]:
        self.node(node_id)
        return self._followers[node_id]

    def followees(self, node_id: NodeId) -> tuple[NodeId, ...]:
        self.node(node_id)
        return self._followees[node_id]

    def in_degree(self, node_id: NodeId) -> int:
        return len(self.followers(node_id))

    def __contains__(self, node_id: object) -> bool:
        return node_id in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SocialGraph):
            return NotImplemented
        return dict(self._nodes) == dict(other._nodes) and self._edges == other._edges

    def __repr__(self) -> str:
        return f"SocialGraph(nodes={len(self._nodes)}, edges={len(self._edges)})"


def _parse_posts(raw: str, where: str) -> dict[str, float]:
    posts: dict[str, float] = {}
    if not raw:
        return posts
    for chunk in raw.split(";"):
        label, sep, value = chunk.partition(":")
        if not sep or not label:
            raise GraphParseError(f"{where}: malformed post entry {chunk!r}")
        try:
            rate = float(value)
        except ValueError:
            raise GraphParseError(f"{where}: post rate {value!r} is not a number") from None
        if label in posts:
            raise GraphParseError(f"{where}: repeated post label {label!r}")
        posts[label] = rate
    return posts


def _read_nodes(reader: csv.reader, source: str) -> dict[NodeId, SocialNode | None]:
    header = next(reader, None)
    if header is None or tuple(header) != NODE_HEADER:
        raise GraphParseError(f"{source}: expected header {','.join(NODE_HEADER)}")
    # id -> node, or None for rows dropped because they declare no interests
    nodes: dict[NodeId, SocialNode | None] = {}
    for row in reader:
        where = f"{source}, line {reader.line_num}"
        if len(row) != 4:
            raise GraphParseError(f"{where}: expected 4 fields, got {len(row)}")
        node_id, location, interests_raw, posts_raw = row
        if node_id in nodes:
            raise DuplicateNodeError(f"{where}: duplicate node id {node_id!r}")
        interests = frozenset(part for part in interests_raw.split(";") if part)
        if not interests:
            nodes[node_id] = None
            continue
        posts = _parse_posts(posts_raw, where)
        try:
            nodes[node_id] = SocialNode(node_id, location, interests, posts)
        except GraphError as exc:
            raise GraphParseError(f"{where}: {exc}") from None
    return nodes


def _read_edges(
    reader: csv.reader, source: str, nodes: dict[NodeId, SocialNode | None]
) -> list[tuple[NodeId, NodeId]]:
    header = next(reader, None)
    if header is None or tuple(header) != EDGE_HEADER:
        raise GraphParseError(f"{source}: expected header {','.join(EDGE_HEADER)}")
    edges = []
    for row in reader:
        where = f"{source}, line {reader.line_num}"
        if len(row) != 2:
            raise GraphParseError(f"{where}: expected 2 fields, got {len(row)}")
        follower, followee = row
        for endpoint in (follower, followee):
            if endpoint not in nodes:
                raise DanglingEdgeError(f"{where}: edge references unknown node {endpoint!r}")
        # edges touching nodes dropped at ingestion are dropped with them
        if nodes[follower] is None or nodes[followee] is None:
            continue
        edges.append((follower, followee))
    return edges


def load_graph_from_text(nodes_csv: str, edges_csv: str) -> SocialGraph:
    """Build a graph from CSV text; see load_graph for the formats.

    Node rows with an empty interest set are filtered out, along with any
    edges touching them.  Edges naming an id absent from the node file are
    a DanglingEdgeError.
    """
    nodes = _read_nodes(csv.reader(io.StringIO(nodes_csv)), "nodes")
    edges = _read_edges(csv.reader(io.StringIO(edges_csv)), "edges", nodes)
    return SocialGraph((n for n in nodes.values() if n is not None), edges)


def load_graph(nodes_path: str | Path, edges_path: str | Path) -> SocialGraph:
    """Load a graph from two CSVs.

    Node file header: id,general_location,interests,posts where interests
    is ';'-separated and posts is ';'-separated label:count pairs, e.g.
    ``42,Liverpool,sports;music,sports:3.5;music:0.2``.  Edge file header:
    follower,followee.
    """
    nodes_path, edges_path = Path(nodes_path), Path(edges_path)
    with nodes_path.open(newline="") as handle:
        nodes = _read_nodes(csv.reader(handle), str(nodes_path))
    with edges_path.open(newline="") as handle:
        edges = _read_edges(csv.reader(handle), str(edges_path), nodes)
    return SocialGraph((n for n in nodes.values() if n is not None), edges)


def save_graph(graph: SocialGraph, nodes_path: str | Path, edges_path: str | Path) -> None:
    """Write the two CSVs back out, rows sorted so output is reproducible."""
    with Path(nodes_path).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(NODE_HEADER)
        for node_id in graph.node_ids():
            node = graph.node(node_id)
            interests = ";".join(sorted(node.interests))
            posts = ";".join(
                f"{label}:{rate!r}" for label, rate in sorted(node.posts_per_interest.items())
            )
            writer.writerow([node.id, node.general_location, interests, posts])
    with Path(edges_path).open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(EDGE_HEADER)
        for follower, followee in sorted(graph.edges):
            writer.writerow([follower, followee])


def unique_followers(graph: SocialGraph, members: Iterable[NodeId]) -> int:
    """Size of the union of the members' follower sets."""
    audience: set[NodeId] = set()
    for member in members:
        audience.update(graph.followers(member))
    return len(audience)


def filter_candidates(
    graph: SocialGraph,
    aoi: "AoiPartition",
    portfolio: "TaskPortfolio",
    min_degree: int = 1,
) -> tuple[NodeId, ...]:
    """Influencer candidates: inside the area, interest overlap, enough reach.

    Keeps nodes whose location label is one of the area's subareas, whose
    interests intersect the portfolio's, and whose in-degree is at least
    min_degree.  Returned ascending by id.
    """
    if min_degree < 0:
        raise ValueError("min_degree must be >= 0")
    wanted = set(portfolio.interests())
    labels = set(aoi.labels())
    kept = [
        node_id
        for node_id in graph.node_ids()
        if graph.node(node_id).general_location in labels
        and graph.node(node_id).interests & wanted
        and graph.in_degree(node_id) >= min_degree
    ]
    return tuple(kept)


@dataclass(frozen=True)
class SynthConfig:
    """Knobs for the synthetic graph generator."""

    node_count: int
    edge_count: int
    edge_model: str = "preferential_attachment"  # or "uniform"
    interests: tuple[str, ...] = DEFAULT_INTERESTS
    subareas: tuple[str, ...] = DEFAULT_SUBAREAS
    max_interests_per_node: int = 2
    posts_rate_max: float = 5.0

    def __post_init__(self) -> None:
        if self.node_count < 1:
            raise ValueError("node_count must be >= 1")
        if self.edge_count < 0:
            raise ValueError("edge_count must be >= 0")
        if self.edge_count > self.node_count * (self.node_count - 1):
            raise ValueError("edge_count exceeds the maximum for a simple directed graph")
        if self.edge_model not in ("preferential_attachment", "uniform"):
            raise ValueError(f"unknown edge_model {self.edge_model!r}")
        if not self.interests or not self.subareas:
            raise ValueError("interests and subareas must be non-empty")
        if len(set(self.interests)) != len(self.interests):
            raise ValueError("interests contains duplicates")
        if len(set(self.subareas)) != len(self.subareas):
            raise ValueError("subareas contains duplicates")
        if self.max_interests_per_node < 1:
            raise ValueError("max_interests_per_node must be >= 1")
        if not self.posts_rate_max > 0:
            raise ValueError("posts_rate_max must be > 0")


def _node_ids(count: int, prefix: str = "n") -> list[NodeId]:
    width = len(str(count - 1)) if count > 1 else 1
    return [f"{prefix}{index:0{width}d}" for index in range(count)]


def generate_synthetic(cfg: SynthConfig, seed: int) -> SocialGraph:
    """Generate a random graph; same cfg and seed give an identical graph.

    Followers are picked uniformly.  Under preferential_attachment the
    followee is drawn proportionally to in-degree + 1, which produces the
    heavy-tailed follower-count distribution selection needs to have
    something to find; "uniform" picks both endpoints uniformly.
    """
    rng = random.Random(seed)
    ids = _node_ids(cfg.node_count)
    nodes = []
    for node_id in ids:
        count = rng.randint(1, min(cfg.max_interests_per_node, len(cfg.interests)))
        interests = rng.sample(cfg.interests, count)
        posts = {label: round(rng.uniform(0.0, cfg.posts_rate_max), 3) for label in interests}
        nodes.append(SocialNode(node_id, rng.choice(cfg.subareas), frozenset(interests), posts))

    edges: set[tuple[NodeId, NodeId]] = set()
    # each node starts with weight 1 so isolated nodes can still be followed
    attractors = list(ids)
    for _ in range(cfg.edge_count):
        for _attempt in range(1000):
            follower = ids[rng.randrange(len(ids))]
            if cfg.edge_model == "preferential_attachment":
                followee = attractors[rng.randrange(len(attractors))]
            else:
                followee = ids[rng.randrange(len(ids))]
            if follower != followee and (follower, followee) not in edges:
                edges.add((follower, followee))
                attractors.append(followee)
                break
    return SocialGraph(nodes, sorted(edges))


def generate_interest_split(
    celebrity_count: int,
    specialist_count: int,
    audience_per_celebrity: int,
    audience_per_specialist: int,
    topic_interests: tuple[str, ...],
    offtopic_interests: tuple[str, ...],
    subarea: str,
    seed: int,
) -> SocialGraph:
    """Graph where raw follower counts point at exactly the wrong people.

    Celebrities have the largest audiences but neither they nor their
    followers hold any of the topic interests; specialists have smaller,
    topic-aligned audiences.  Selection that ranks purely by follower
    count therefore recruits zero topic-interested reach, which is the
    failure mode the interest-aware comparison is meant to expose.
    """
    if celebrity_count < 1 or specialist_count < 1:
        raise ValueError("need at least one celebrity and one specialist")
    if audience_per_celebrity <= audience_per_specialist:
        raise ValueError("celebrities must out-follow specialists for the split to bite")
    if set(topic_interests) & set(offtopic_interests):
        raise ValueError("topic and offtopic interests must be disjoint")
    rng = random.Random(seed)
    nodes: list[SocialNode] = []
    edges: list[tuple[NodeId, NodeId]] = []

    def add_side(prefix: str, count: int, audience_size: int, interests: tuple[str, ...]) -> None:
        interest_set = frozenset(interests)
        for index in range(count):
            owner = f"{prefix}{index:04d}"
            posts = {label: round(rng.uniform(0.5, 5.0), 3) for label in interests}
            nodes.append(SocialNode(owner, subarea, interest_set, posts))
            for fan_index in range(audience_size):
                fan = f"{owner}f{fan_index:04d}"
                nodes.append(SocialNode(fan, subarea, interest_set, {}))
                edges.append((fan, owner))

    add_side("celeb", celebrity_count, audience_per_celebrity, tuple(offtopic_interests))
    add_side("spec", specialist_count, audience_per_specialist, tuple(topic_interests))
    return SocialGraph(nodes, edges)
