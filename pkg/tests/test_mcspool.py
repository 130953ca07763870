import random
from statistics import fmean

import pytest

from recruitnet import (
    AttributeModel,
    SocialNode,
    SubareaGeometry,
    SynthConfig,
    Worker,
    WorkerPool,
    constant_sampler,
    empirical_sampler,
    generate_synthetic,
    haversine_km,
    load_attribute_table,
    register,
    uniform_sampler,
)
from recruitnet.socialgraph import UnknownNodeError

CENTER = (53.40, -2.98)
GEOMETRY = {"central": SubareaGeometry(center=CENTER, radius_km=10.0)}


def flat_model(**overrides):
    defaults = dict(
        geometry=GEOMETRY,
        speed_sampler=constant_sampler(30.0),
        energy_sampler=constant_sampler(0.7),
        reputation_sampler=constant_sampler(0.5),
    )
    defaults.update(overrides)
    return AttributeModel(**defaults)


def test_register_empty_pool(trap_graph):
    pool = register(trap_graph, [], flat_model(), seed=0)
    assert len(pool) == 0
    assert list(pool) == []


def test_register_constant_attributes(trap_graph):
    pool = register(trap_graph, ["A", "C", "B"], flat_model(), seed=1)
    assert [worker.node for worker in pool] == ["A", "B", "C"]
    for worker in pool:
        assert worker.avg_speed_kmh == 30.0
        assert worker.residual_energy == 0.7
        assert worker.reputation == 0.5
        assert worker.social is trap_graph.node(worker.node)


def test_register_deterministic(trap_graph):
    model = flat_model(energy_sampler=uniform_sampler(0.0, 1.0))
    one = register(trap_graph, trap_graph.node_ids(), model, seed=5)
    two = register(trap_graph, trap_graph.node_ids(), model, seed=5)
    assert one.workers == two.workers
    three = register(trap_graph, trap_graph.node_ids(), model, seed=6)
    assert one.workers != three.workers


def test_gps_jitter_stays_inside_subarea():
    graph = generate_synthetic(
        SynthConfig(node_count=2000, edge_count=0, subareas=("central", "north")),
        seed=2,
    )
    geometry = {
        "central": SubareaGeometry(center=CENTER, radius_km=10.0),
        "north": SubareaGeometry(center=(60.0, 5.0), radius_km=2.5),
    }
    pool = register(graph, graph.node_ids(), flat_model(geometry=geometry), seed=3)
    assert len(pool) == 2000
    for worker in pool:
        area = geometry[worker.social.general_location]
        assert haversine_km(worker.gps, area.center) <= area.radius_km + 1e-9


def test_energy_law_of_large_numbers():
    graph = generate_synthetic(
        SynthConfig(node_count=10_000, edge_count=0, subareas=("central",)), seed=4
    )
    model = flat_model(energy_sampler=uniform_sampler(0.0, 1.0))
    pool = register(graph, graph.node_ids(), model, seed=7)
    mean = fmean(worker.residual_energy for worker in pool)
    assert 0.48 <= mean <= 0.52


def test_register_missing_geometry(trap_graph):
    model = flat_model(geometry={"elsewhere": SubareaGeometry(center=CENTER)})
    with pytest.raises(ValueError) as err:
        register(trap_graph, ["A"], model, seed=0)
    assert "central" in str(err.value)


def test_register_rejects_out_of_range_samples(trap_graph):
    model = flat_model(reputation_sampler=constant_sampler(1.5))
    with pytest.raises(ValueError):
        register(trap_graph, ["A"], model, seed=0)


def test_sampler_validation():
    with pytest.raises(ValueError):
        uniform_sampler(2.0, 1.0)
    with pytest.raises(ValueError):
        uniform_sampler(float("nan"), 1.0)
    with pytest.raises(ValueError):
        empirical_sampler([])
    with pytest.raises(ValueError):
        constant_sampler(float("inf"))
    rng = random.Random(0)
    assert constant_sampler(0.4)(rng) == 0.4
    assert 1.0 <= uniform_sampler(1.0, 2.0)(rng) <= 2.0
    assert empirical_sampler([3.0])(rng) == 3.0


def test_worker_validation(trap_graph):
    node = trap_graph.node("A")
    with pytest.raises(ValueError):
        Worker(node, CENTER, 0.0, 0.5, 0.5)
    with pytest.raises(ValueError):
        Worker(node, CENTER, 10.0, 1.2, 0.5)
    with pytest.raises(ValueError):
        Worker(node, CENTER, 10.0, 0.5, -0.1)


def test_worker_pool_membership(trap_graph):
    worker = Worker(trap_graph.node("A"), CENTER, 10.0, 0.5, 0.5)
    pool = WorkerPool([worker], trap_graph)
    assert "A" in pool and "B" not in pool
    assert pool.get("A") is worker
    with pytest.raises(UnknownNodeError):
        pool.get("B")
    with pytest.raises(ValueError):
        WorkerPool([worker, worker], trap_graph)
    stray = SocialNode("ZZ", "central", frozenset({"sports"}))
    with pytest.raises(UnknownNodeError):
        WorkerPool([Worker(stray, CENTER, 10.0, 0.5, 0.5)], trap_graph)


def test_subarea_geometry_validation():
    with pytest.raises(ValueError):
        SubareaGeometry(center=(95.0, 0.0))
    with pytest.raises(ValueError):
        SubareaGeometry(center=CENTER, radius_km=0.0)


def test_attribute_table_speed(tmp_path):
    path = tmp_path / "speeds.csv"
    path.write_text("speed_kmh\n10\n20\n30\n")
    table = load_attribute_table(path)
    assert table.column == "speed_kmh"
    assert table.values == (10.0, 20.0, 30.0)
    rng = random.Random(11)
    draws = [table.sampler()(rng) for _ in range(10_000)]
    assert 19.5 <= fmean(draws) <= 20.5
    assert set(draws) <= {10.0, 20.0, 30.0}


def test_attribute_table_single_row(tmp_path):
    path = tmp_path / "rep.csv"
    path.write_text("reputation\n0.5\n")
    table = load_attribute_table(path)
    rng = random.Random(0)
    assert table.sampler()(rng) == 0.5


def test_attribute_table_errors(tmp_path):
    bad_header = tmp_path / "a.csv"
    bad_header.write_text("velocity\n10\n")
    with pytest.raises(ValueError):
        load_attribute_table(bad_header)

    bad_range = tmp_path / "b.csv"
    bad_range.write_text("reputation\n0.5\n1.2\n")
    with pytest.raises(ValueError) as err:
        load_attribute_table(bad_range)
    assert "line 3" in str(err.value)

    bad_speed = tmp_path / "c.csv"
    bad_speed.write_text("speed_kmh\n-5\n")
    with pytest.raises(ValueError):
        load_attribute_table(bad_speed)

    not_number = tmp_path / "d.csv"
    not_number.write_text("speed_kmh\nfast\n")
    with pytest.raises(ValueError):
        load_attribute_table(not_number)

    empty = tmp_path / "e.csv"
    empty.write_text("speed_kmh\n")
    with pytest.raises(ValueError):
        load_attribute_table(empty)
