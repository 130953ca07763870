from pathlib import Path

import pytest

from recruitnet import (
    AoiPartition,
    SocialGraph,
    SocialNode,
    Task,
    TaskPortfolio,
    load_graph,
)

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
CONFIGS = ROOT / "configs"

TRAP_NODES = DATA / "greedy_trap_nodes.csv"
TRAP_EDGES = DATA / "greedy_trap_edges.csv"


def build_graph(edges, extra_nodes=(), location="central", interests=("sports",), posts=None):
    """Small-graph helper: nodes are inferred from the edge list."""
    ids = sorted({end for edge in edges for end in edge} | set(extra_nodes))
    nodes = [
        SocialNode(node_id, location, frozenset(interests), dict(posts or {}))
        for node_id in ids
    ]
    return SocialGraph(nodes, edges)


@pytest.fixture(scope="session")
def trap_graph():
    return load_graph(TRAP_NODES, TRAP_EDGES)


@pytest.fixture(scope="session")
def trap_aoi():
    return AoiPartition((("central", 1.0),))


@pytest.fixture(scope="session")
def sports_task():
    return Task(location=(53.41, -2.97), time_constraint_minutes=60.0, domain="sports")


@pytest.fixture(scope="session")
def trap_portfolio(sports_task):
    return TaskPortfolio(tasks=(sports_task,), interest_weights=(("sports", 1.0),))
