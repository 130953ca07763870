import pytest
from fastapi.testclient import TestClient

from recruitnet.service import app, reset_store

from conftest import DATA


@pytest.fixture()
def client():
    reset_store()
    with TestClient(app) as c:
        yield c


SCENARIO = {
    "subareas": [
        {"label": "central", "weight": 1.0, "lat": 53.41, "lon": -2.97, "radius_km": 5.0}
    ],
    "tasks": [
        {"domain": "sports", "lat": 53.41, "lon": -2.97, "time_constraint_minutes": 60.0}
    ],
    "interest_weights": {"sports": 1.0},
    "min_degree": 5,
}


def upload_trap(client):
    body = {
        "nodes_csv": (DATA / "greedy_trap_nodes.csv").read_text(),
        "edges_csv": (DATA / "greedy_trap_edges.csv").read_text(),
    }
    response = client.post("/graphs/upload", json=body)
    assert response.status_code == 200
    return response.json()["graph_id"]


def test_healthz(client):
    response = client.get("/healthz")
    assert response.status_code == 200
    assert response.json()["status"] == "ok"


def test_upload_and_summary(client):
    graph_id = upload_trap(client)
    summary = client.get(f"/graphs/{graph_id}").json()
    assert summary == {"graph_id": graph_id, "nodes": 13, "edges": 16}


def test_upload_rejects_bad_csv(client):
    response = client.post(
        "/graphs/upload", json={"nodes_csv": "wrong,header\n1,2\n", "edges_csv": ""}
    )
    assert response.status_code == 400


def test_unknown_graph_is_404(client):
    assert client.get("/graphs/g999").status_code == 404
    body = {"scenario": SCENARIO, "k": 2}
    assert client.post("/graphs/g999/influencers", json=body).status_code == 404


def test_synthetic_graph_creation(client):
    body = {"node_count": 50, "edge_count": 200, "seed": 3}
    response = client.post("/graphs/synthetic", json=body)
    assert response.status_code == 200
    payload = response.json()
    assert payload["nodes"] == 50
    assert payload["edges"] == 200


def test_synthetic_rejects_impossible_edge_count(client):
    response = client.post("/graphs/synthetic", json={"node_count": 3, "edge_count": 100})
    assert response.status_code == 400


def test_group_selection_escapes_trap(client):
    graph_id = upload_trap(client)
    body = {
        "scenario": SCENARIO,
        "k": 2,
        "method": "group",
        "ga": {"population_size": 20, "max_generations": 60, "convergence_window": 8},
    }
    response = client.post(f"/graphs/{graph_id}/influencers", json=body)
    assert response.status_code == 200
    payload = response.json()
    assert payload["members"] == ["B", "C"]
    assert payload["unique_followers"] == 10
    assert payload["feasible"] is True
    assert payload["candidates"] == 3


def test_individual_selection_walks_into_trap(client):
    graph_id = upload_trap(client)
    body = {"scenario": SCENARIO, "k": 2, "method": "individual"}
    payload = client.post(f"/graphs/{graph_id}/influencers", json=body).json()
    assert payload["members"] == ["A", "B"]
    assert payload["unique_followers"] == 8


def test_selection_rejects_oversized_k(client):
    graph_id = upload_trap(client)
    body = {"scenario": SCENARIO, "k": 99}
    assert client.post(f"/graphs/{graph_id}/influencers", json=body).status_code == 400


def test_selection_validates_body(client):
    graph_id = upload_trap(client)
    response = client.post(f"/graphs/{graph_id}/influencers", json={"k": 2})
    assert response.status_code == 422


def test_influence_estimate(client):
    graph_id = upload_trap(client)
    body = {"seeds": ["B", "C"], "activation_probability": 0.5, "runs": 200, "seed": 1}
    response = client.post(f"/graphs/{graph_id}/influence", json=body)
    assert response.status_code == 200
    payload = response.json()
    assert payload["runs"] == 200
    assert 2.0 <= payload["mean"] <= 12.0
    assert 2 <= payload["min"] <= payload["max"] <= 12
    repeat = client.post(f"/graphs/{graph_id}/influence", json=body)
    assert repeat.json() == payload


def test_influence_unknown_seed_node(client):
    graph_id = upload_trap(client)
    body = {"seeds": ["ZZZ"]}
    assert client.post(f"/graphs/{graph_id}/influence", json=body).status_code == 400


def test_recruitment_round(client):
    graph_id = upload_trap(client)
    body = {
        "scenario": SCENARIO,
        "influencer_size": 2,
        "group_size": 3,
        "activation_probability": 0.5,
        "mode": "IIWRS",
        "seed": 9,
        "ga": {"population_size": 20, "max_generations": 60, "convergence_window": 8},
        "energy": {"kind": "constant", "value": 0.8},
        "reputation": {"kind": "constant", "value": 0.6},
    }
    response = client.post(f"/graphs/{graph_id}/recruitment", json=body)
    assert response.status_code == 200
    payload = response.json()
    assert payload["mode"] == "IIWRS"
    assert payload["task_domain"] == "sports"
    assert payload["group_members"] == ["B", "C"]
    assert payload["registered_pool"] >= 2
    assert len(payload["slots"]) == 3
    filled = [slot for slot in payload["slots"] if slot["worker"] is not None]
    assert all(slot["qos"] > 0 for slot in filled)
    assert payload["average_qos"] == pytest.approx(
        sum(slot["qos"] for slot in filled) / 3
    )
    repeat = client.post(f"/graphs/{graph_id}/recruitment", json=body)
    assert repeat.json() == payload


def test_recruitment_rejects_bad_sampler(client):
    graph_id = upload_trap(client)
    body = {"scenario": SCENARIO, "energy": {"kind": "constant"}}
    response = client.post(f"/graphs/{graph_id}/recruitment", json=body)
    assert response.status_code == 400


def test_recruitment_rejects_bad_task_index(client):
    graph_id = upload_trap(client)
    body = {"scenario": SCENARIO, "task_index": 7}
    assert client.post(f"/graphs/{graph_id}/recruitment", json=body).status_code == 400
