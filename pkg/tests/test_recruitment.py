import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recruitnet import (
    RecruitConfig,
    SocialGraph,
    SocialNode,
    Task,
    Worker,
    WorkerPool,
    build_mode_pool,
    eligible,
    interest_level,
    qos,
    recruit_dynamic,
    travel_time,
    travel_time_factor,
)
from recruitnet.geo import destination_point

TASK = Task(location=(53.40, -2.98), time_constraint_minutes=60.0, domain="sports")


def pool_from(specs, edges=(), extra=()):
    """Workers from spec dicts; default gps is the task location itself."""
    nodes = {}
    for spec in specs:
        interests = spec.get("interests", ("sports",))
        posts = spec.get("posts", {"sports": 1.0} if "sports" in interests else {})
        nodes[spec["id"]] = SocialNode(spec["id"], "central", frozenset(interests), posts)
    for node_id, interests in extra:
        nodes[node_id] = SocialNode(node_id, "central", frozenset(interests))
    graph = SocialGraph(nodes.values(), edges)
    workers = [
        Worker(
            social=nodes[spec["id"]],
            gps=spec.get("gps", TASK.location),
            avg_speed_kmh=spec.get("speed", 30.0),
            residual_energy=spec.get("energy", 1.0),
            reputation=spec.get("rep", 1.0),
        )
        for spec in specs
    ]
    return WorkerPool(workers, graph)


def test_travel_time_values():
    ten_km_away = destination_point(TASK.location, math.pi / 2, 10.0)
    pool = pool_from(
        [
            {"id": "w1", "gps": TASK.location, "speed": 30.0},
            {"id": "w2", "gps": ten_km_away, "speed": 60.0},
            {"id": "w3", "gps": ten_km_away, "speed": 20.0},
        ]
    )
    assert travel_time(pool.get("w1"), TASK) == 0.0
    assert travel_time(pool.get("w2"), TASK) == pytest.approx(10.0, abs=1e-6)
    assert travel_time(pool.get("w3"), TASK) == pytest.approx(30.0, abs=1e-6)


def test_travel_time_factor_curve():
    assert travel_time_factor(0.0, 60.0) == 1.0
    assert travel_time_factor(1.0, 60.0) == 1.0
    assert travel_time_factor(0.5, 60.0) == 1.0  # sub-minute counts as instant
    assert travel_time_factor(math.sqrt(60.0), 60.0) == pytest.approx(0.5, abs=1e-12)
    assert travel_time_factor(60.0, 60.0) == 0.0
    assert travel_time_factor(120.0, 60.0) == 0.0
    with pytest.raises(ValueError):
        travel_time_factor(-1.0, 60.0)
    with pytest.raises(ValueError):
        travel_time_factor(5.0, 1.0)


@given(
    st.floats(min_value=0.0, max_value=500.0),
    st.floats(min_value=0.0, max_value=500.0),
    st.floats(min_value=1.001, max_value=1000.0),
)
@settings(max_examples=100, deadline=None)
def test_travel_time_factor_monotone(a, b, constraint):
    lo, hi = sorted((a, b))
    assert travel_time_factor(lo, constraint) >= travel_time_factor(hi, constraint)
    assert 0.0 <= travel_time_factor(a, constraint) <= 1.0


def interest_fixture():
    # w1 has the pool-max post rate and both interested followees;
    # w2 posts half as much and follows nobody relevant
    return pool_from(
        [
            {"id": "w1", "posts": {"sports": 4.0}},
            {"id": "w2", "posts": {"sports": 2.0}},
        ],
        edges=[("w1", "x1"), ("w1", "x2"), ("w2", "x3")],
        extra=[("x1", ("sports",)), ("x2", ("sports",)), ("x3", ("music",))],
    )


def test_interest_level_normalisation():
    pool = interest_fixture()
    assert interest_level(pool.get("w1"), TASK, pool) == pytest.approx(1.0)
    assert interest_level(pool.get("w2"), TASK, pool) == pytest.approx(0.25)


def test_interest_level_zero_maxima():
    pool = pool_from([{"id": "w1", "posts": {}}, {"id": "w2", "posts": {}}])
    assert interest_level(pool.get("w1"), TASK, pool) == 0.0


def test_qos_hand_value():
    # energy 0.8, interest level (0.2 + 1.0) / 2 = 0.6, instant travel,
    # reputation 0.9 -> (0.8 * 0.6 * 1.0 * 0.9) ** 0.25
    pool = pool_from(
        [
            {"id": "w1", "posts": {"sports": 1.0}, "energy": 0.8, "rep": 0.9},
            {"id": "w2", "posts": {"sports": 5.0}},
        ],
        edges=[("w1", "x1"), ("w1", "x2")],
        extra=[("x1", ("sports",)), ("x2", ("sports",))],
    )
    value = qos(pool.get("w1"), TASK, pool)
    assert value == pytest.approx(0.432 ** 0.25, abs=1e-12)


def test_qos_perfect_worker():
    pool = pool_from([{"id": "w1", "posts": {"sports": 2.0}}])
    assert qos(pool.get("w1"), TASK, pool) == pytest.approx((1.0 * 0.5) ** 0.25)


def test_qos_zero_when_any_component_zero():
    pool = pool_from(
        [
            {"id": "w1", "posts": {"sports": 1.0}, "energy": 0.0},
            {"id": "w2", "posts": {"sports": 1.0}},
        ]
    )
    assert qos(pool.get("w1"), TASK, pool) == 0.0


def test_eligibility_gates():
    far = destination_point(TASK.location, 0.0, 55.0)
    pool = pool_from(
        [
            {"id": "w1"},
            {"id": "w2", "interests": ("music",), "posts": {}},
            {"id": "w3", "gps": far, "speed": 10.0},
            {"id": "w4", "rep": 0.2},
        ]
    )
    task = Task(
        location=TASK.location,
        time_constraint_minutes=60.0,
        domain="sports",
        min_reputation=0.5,
    )
    assert eligible(pool.get("w1"), task, pool)
    assert not eligible(pool.get("w2"), task, pool)  # wrong interest
    assert not eligible(pool.get("w3"), task, pool)  # 330 min travel
    assert not eligible(pool.get("w4"), task, pool)  # reputation floor
    assert not eligible(pool.get("w1"), task, pool, qos_min=0.99)


def ranked_pool():
    # identical except residual energy, so qos strictly orders w1 > ... > w5
    return pool_from(
        [
            {"id": "w1", "energy": 0.9},
            {"id": "w2", "energy": 0.7},
            {"id": "w3", "energy": 0.5},
            {"id": "w4", "energy": 0.3},
            {"id": "w5", "energy": 0.1},
        ]
    )


def test_recruit_full_acceptance_takes_top_ranked():
    pool = ranked_pool()
    for mode in ("IIWRS", "GRS"):
        cfg = RecruitConfig(group_size=3, acceptance_probability=1.0, mode=mode)
        result = recruit_dynamic(pool, TASK, cfg, seed=0)
        assert [slot.worker for slot in result.slots] == ["w1", "w2", "w3"]
        assert result.substitutions == 0
        expected = sum(qos(pool.get(w), TASK, pool) for w in ("w1", "w2", "w3")) / 3
        assert result.average_qos == pytest.approx(expected)


def test_recruit_zero_acceptance_fills_nothing():
    pool = ranked_pool()
    for mode in ("IIWRS", "GRS"):
        cfg = RecruitConfig(group_size=3, acceptance_probability=0.0, mode=mode)
        result = recruit_dynamic(pool, TASK, cfg, seed=0)
        assert result.slots == (None, None, None)
        assert result.substitutions == 0
        assert result.average_qos == 0.0


def test_recruit_substitution_hand_trace():
    pool = ranked_pool()
    cfg = RecruitConfig(group_size=2, acceptance_probability=0.5, mode="IIWRS")
    result = recruit_dynamic(
        pool, TASK, cfg, seed=0, accept_script=[False, True, False, True]
    )
    assert [slot.worker for slot in result.slots] == ["w2", "w4"]
    assert result.substitutions == 2
    expected = (qos(pool.get("w2"), TASK, pool) + qos(pool.get("w4"), TASK, pool)) / 2
    assert result.average_qos == pytest.approx(expected)


def test_static_mode_leaves_slot_unfilled_after_rejection():
    pool = ranked_pool()
    cfg = RecruitConfig(group_size=2, acceptance_probability=0.5, mode="GRS")
    result = recruit_dynamic(
        pool, TASK, cfg, seed=0, accept_script=[False, True]
    )
    assert result.slots[0] is None
    assert result.slots[1].worker == "w2"
    assert result.substitutions == 0


def test_accept_script_exhaustion():
    pool = ranked_pool()
    cfg = RecruitConfig(group_size=2, acceptance_probability=0.5, mode="IIWRS")
    with pytest.raises(ValueError):
        recruit_dynamic(pool, TASK, cfg, seed=0, accept_script=[False])


def test_dynamic_never_worse_than_static():
    pool = ranked_pool()
    for trial in range(300):
        dynamic = recruit_dynamic(
            pool,
            TASK,
            RecruitConfig(group_size=3, acceptance_probability=0.5, mode="DGRS"),
            seed=trial,
        )
        static = recruit_dynamic(
            pool,
            TASK,
            RecruitConfig(group_size=3, acceptance_probability=0.5, mode="GRS"),
            seed=trial,
        )
        assert dynamic.average_qos >= static.average_qos - 1e-12
        filled_static = {slot.worker for slot in static.slots if slot}
        filled_dynamic = {slot.worker for slot in dynamic.slots if slot}
        assert filled_static <= filled_dynamic


def test_full_pool_mode_dominates_its_subsample():
    # a full-pool sample is the pool itself, so IIWRS and DGRS coincide;
    # a strict subsample can only do as well or worse, run by run
    pool = ranked_pool()
    iiwrs_cfg = RecruitConfig(group_size=3, acceptance_probability=0.6)
    for trial in range(50):
        iiwrs = recruit_dynamic(pool, TASK, iiwrs_cfg, seed=trial)
        full_cfg = RecruitConfig(
            group_size=3, acceptance_probability=0.6, mode="DGRS", grs_pool_size=len(pool)
        )
        full_sample = build_mode_pool(pool, full_cfg, seed=trial)
        assert recruit_dynamic(full_sample, TASK, full_cfg, seed=trial, norm_pool=pool) == iiwrs

        sub_cfg = RecruitConfig(
            group_size=3, acceptance_probability=0.6, mode="DGRS", grs_pool_size=3
        )
        subsample = build_mode_pool(pool, sub_cfg, seed=trial)
        sub = recruit_dynamic(subsample, TASK, sub_cfg, seed=trial, norm_pool=pool)
        assert iiwrs.average_qos >= sub.average_qos - 1e-12


def test_filled_slots_respect_qos_floor():
    pool = ranked_pool()
    cfg = RecruitConfig(group_size=5, acceptance_probability=1.0, qos_min=0.6)
    result = recruit_dynamic(pool, TASK, cfg, seed=0)
    for slot in result.slots:
        if slot is not None:
            assert slot.qos >= 0.6
            assert eligible(pool.get(slot.worker), TASK, pool, qos_min=0.6)
    # the weakest workers fall under the floor, so some slots stay open
    assert any(slot is None for slot in result.slots)


def test_follower_ranked_mode_ignores_qos_order():
    # w_popular has many followers but poor energy; w_fit is the opposite
    specs = [
        {"id": "w_fit", "energy": 0.9},
        {"id": "w_popular", "energy": 0.2},
    ]
    edges = [(f"fan{i}", "w_popular") for i in range(4)]
    extra = [(f"fan{i}", ("sports",)) for i in range(4)]
    pool = pool_from(specs, edges=edges, extra=extra)
    swrs = recruit_dynamic(
        pool, TASK, RecruitConfig(group_size=1, mode="SWRS"), seed=0
    )
    iiwrs = recruit_dynamic(
        pool, TASK, RecruitConfig(group_size=1, mode="IIWRS"), seed=0
    )
    assert swrs.slots[0].worker == "w_popular"
    assert iiwrs.slots[0].worker == "w_fit"


def test_norm_pool_scales_interest_level():
    full = interest_fixture()
    sub = WorkerPool([full.get("w2")], full.graph)
    cfg = RecruitConfig(group_size=1, acceptance_probability=1.0, mode="GRS")
    alone = recruit_dynamic(sub, TASK, cfg, seed=0)
    normalised = recruit_dynamic(sub, TASK, cfg, seed=0, norm_pool=full)
    # alone, w2's posts are the maximum; against the full pool they are half
    assert alone.slots[0].qos > normalised.slots[0].qos
    assert normalised.slots[0].qos == pytest.approx(
        qos(full.get("w2"), TASK, full), abs=1e-12
    )


def test_build_mode_pool_variants(trap_graph):
    nodes = list(trap_graph.node_ids())
    workers = [
        Worker(trap_graph.node(node_id), TASK.location, 30.0, 0.5, 0.5)
        for node_id in nodes
    ]
    full = WorkerPool(workers, trap_graph)
    other = WorkerPool(workers[:3], trap_graph)

    assert build_mode_pool(full, RecruitConfig(group_size=1, mode="IIWRS")) is full

    sampled = build_mode_pool(
        full, RecruitConfig(group_size=1, mode="GRS", grs_pool_size=5), seed=9
    )
    assert len(sampled) == 5
    assert {w.node for w in sampled} <= {w.node for w in full}
    again = build_mode_pool(
        full, RecruitConfig(group_size=1, mode="GRS", grs_pool_size=5), seed=9
    )
    assert [w.node for w in sampled] == [w.node for w in again]

    with pytest.raises(ValueError):
        build_mode_pool(
            full, RecruitConfig(group_size=1, mode="DGRS", grs_pool_size=99), seed=0
        )
    with pytest.raises(ValueError):
        build_mode_pool(full, RecruitConfig(group_size=1, mode="SWRS"))
    assert (
        build_mode_pool(
            full, RecruitConfig(group_size=1, mode="DSWRS"), individual_pool=other
        )
        is other
    )


def test_recruit_config_validation():
    with pytest.raises(ValueError):
        RecruitConfig(group_size=0)
    with pytest.raises(ValueError):
        RecruitConfig(group_size=1, qos_min=1.5)
    with pytest.raises(ValueError):
        RecruitConfig(group_size=1, acceptance_probability=-0.2)
    with pytest.raises(ValueError):
        RecruitConfig(group_size=1, mode="RANDOM")
    with pytest.raises(ValueError):
        RecruitConfig(group_size=1, grs_pool_size=0)
