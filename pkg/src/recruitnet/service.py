"""HTTP service over the simulation core.

Graphs are created (synthetic or uploaded CSV) into an in-memory store
and addressed by id; selection, influence estimation, and single
recruitment rounds then run against a stored graph.  Batch experiments
stay on the CLI, which talks to the core directly.
"""

from __future__ import annotations

from itertools import count
from typing import Literal

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .config import ExperimentConfig
from .diffusion import DiffusionConfig, estimate_influence
from .expharness import run_recruitment_round
from .groupmetrics import AoiPartition, InfluencerGroup, Task, TaskPortfolio
from .influencemax import GaConfig, exhaustive_select, ga_select, greedy_select
from .mcspool import SubareaGeometry, constant_sampler, uniform_sampler
from .recruitment import RecruitConfig
from .socialgraph import (
    DEFAULT_INTERESTS,
    DEFAULT_SUBAREAS,
    GraphError,
    SocialGraph,
    SynthConfig,
    filter_candidates,
    generate_synthetic,
    load_graph_from_text,
    unique_followers,
)

app = FastAPI(title="recruitnet", version="0.1.0")

_graphs: dict[str, SocialGraph] = {}
_ids = count(1)


def reset_store() -> None:
    """Drop all stored graphs (used by tests)."""
    _graphs.clear()


def _get_graph(graph_id: str) -> SocialGraph:
    graph = _graphs.get(graph_id)
    if graph is None:
        raise HTTPException(status_code=404, detail=f"unknown graph {graph_id!r}")
    return graph


def _store(graph: SocialGraph) -> "GraphOut":
    graph_id = f"g{next(_ids)}"
    _graphs[graph_id] = graph
    return GraphOut(graph_id=graph_id, nodes=len(graph), edges=len(graph.edges))


class SyntheticGraphIn(BaseModel):
    node_count: int
    edge_count: int
    edge_model: Literal["preferential_attachment", "uniform"] = "preferential_attachment"
    interests: list[str] = list(DEFAULT_INTERESTS)
    subareas: list[str] = list(DEFAULT_SUBAREAS)
    max_interests_per_node: int = 2
    posts_rate_max: float = 5.0
    seed: int = 0


class GraphUploadIn(BaseModel):
    nodes_csv: str
    edges_csv: str


class GraphOut(BaseModel):
    graph_id: str
    nodes: int
    edges: int


class SubareaIn(BaseModel):
    label: str
    weight: float
    lat: float
    lon: float
    radius_km: float = 10.0


class TaskIn(BaseModel):
    domain: str
    lat: float
    lon: float
    time_constraint_minutes: float
    min_reputation: float = 0.0


class ScenarioIn(BaseModel):
    """The area and portfolio context shared by selection and recruitment."""

    subareas: list[SubareaIn]
    tasks: list[TaskIn]
    interest_weights: dict[str, float]
    min_degree: int = 1


class SelectionIn(BaseModel):
    scenario: ScenarioIn
    k: int
    method: Literal["group", "individual", "exhaustive"] = "group"
    seed: int = 0
    ga: dict = Field(default_factory=dict)


class GroupOut(BaseModel):
    members: list[str]
    unique_followers: int
    distribution: float
    interest: float
    rank: float
    feasible: bool
    candidates: int


class InfluenceIn(BaseModel):
    seeds: list[str]
    activation_probability: float = 0.02
    runs: int = 100
    seed: int = 0


class InfluenceOut(BaseModel):
    mean: float
    runs: int
    min: int
    max: int


class SamplerIn(BaseModel):
    kind: Literal["constant", "uniform"]
    value: float | None = None
    low: float | None = None
    high: float | None = None

    def build(self):
        if self.kind == "constant":
            if self.value is None:
                raise ValueError("constant sampler needs 'value'")
            return constant_sampler(self.value)
        if self.low is None or self.high is None:
            raise ValueError("uniform sampler needs 'low' and 'high'")
        return uniform_sampler(self.low, self.high)


class RecruitmentIn(BaseModel):
    scenario: ScenarioIn
    influencer_size: int = 5
    task_index: int = 0
    group_size: int = 5
    qos_min: float = 0.0
    acceptance_probability: float = 1.0
    mode: Literal["IIWRS", "GRS", "DGRS", "SWRS", "DSWRS"] = "IIWRS"
    grs_pool_size: int = 182
    activation_probability: float = 0.02
    seed: int = 0
    ga: dict = Field(default_factory=dict)
    speed: SamplerIn | None = None
    energy: SamplerIn | None = None
    reputation: SamplerIn | None = None


class SlotOut(BaseModel):
    worker: str | None
    qos: float | None


class RecruitmentOut(BaseModel):
    mode: str
    task_domain: str
    group_members: list[str]
    registered_pool: int
    mode_pool: int
    slots: list[SlotOut]
    substitutions: int
    average_qos: float


def _scenario_parts(
    scenario: ScenarioIn,
) -> tuple[AoiPartition, dict[str, SubareaGeometry], TaskPortfolio]:
    aoi = AoiPartition(tuple((s.label, s.weight) for s in scenario.subareas))
    geometry = {
        s.label: SubareaGeometry(center=(s.lat, s.lon), radius_km=s.radius_km)
        for s in scenario.subareas
    }
    portfolio = TaskPortfolio(
        tasks=tuple(
            Task(
                location=(t.lat, t.lon),
                time_constraint_minutes=t.time_constraint_minutes,
                domain=t.domain,
                min_reputation=t.min_reputation,
            )
            for t in scenario.tasks
        ),
        interest_weights=tuple(scenario.interest_weights.items()),
    )
    return aoi, geometry, portfolio


@app.get("/healthz")
def healthz() -> dict:
    return {"status": "ok", "graphs": len(_graphs)}


@app.post("/graphs/synthetic", response_model=GraphOut)
def create_synthetic(body: SyntheticGraphIn) -> GraphOut:
    try:
        cfg = SynthConfig(
            node_count=body.node_count,
            edge_count=body.edge_count,
            edge_model=body.edge_model,
            interests=tuple(body.interests),
            subareas=tuple(body.subareas),
            max_interests_per_node=body.max_interests_per_node,
            posts_rate_max=body.posts_rate_max,
        )
        return _store(generate_synthetic(cfg, body.seed))
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None


@app.post("/graphs/upload", response_model=GraphOut)
def upload_graph(body: GraphUploadIn) -> GraphOut:
    try:
        return _store(load_graph_from_text(body.nodes_csv, body.edges_csv))
    except GraphError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None


@app.get("/graphs/{graph_id}", response_model=GraphOut)
def graph_summary(graph_id: str) -> GraphOut:
    graph = _get_graph(graph_id)
    return GraphOut(graph_id=graph_id, nodes=len(graph), edges=len(graph.edges))


@app.post("/graphs/{graph_id}/influencers", response_model=GroupOut)
def select_influencers(graph_id: str, body: SelectionIn) -> GroupOut:
    graph = _get_graph(graph_id)
    try:
        aoi, _, portfolio = _scenario_parts(body.scenario)
        candidates = filter_candidates(graph, aoi, portfolio, body.scenario.min_degree)
        if body.method == "group":
            group = ga_select(
                graph, candidates, body.k, aoi, portfolio, GaConfig(**body.ga), seed=body.seed
            )
        elif body.method == "individual":
            proxy = lambda members: float(unique_followers(graph, members))
            group = greedy_select(graph, candidates, body.k, aoi, portfolio, proxy=proxy)
        else:
            group = exhaustive_select(graph, candidates, body.k, aoi, portfolio)
    except (ValueError, RuntimeError, TypeError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    return _group_out(group, len(candidates))


def _group_out(group: InfluencerGroup, candidates: int) -> GroupOut:
    return GroupOut(
        members=sorted(group.members),
        unique_followers=group.unique_followers,
        distribution=group.distribution,
        interest=group.interest,
        rank=group.rank,
        feasible=group.feasible,
        candidates=candidates,
    )


@app.post("/graphs/{graph_id}/influence", response_model=InfluenceOut)
def influence(graph_id: str, body: InfluenceIn) -> InfluenceOut:
    graph = _get_graph(graph_id)
    try:
        cfg = DiffusionConfig(
            activation_probability=body.activation_probability, runs=body.runs
        )
        mean, sizes = estimate_influence(graph, body.seeds, cfg, body.seed)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    return InfluenceOut(mean=mean, runs=cfg.runs, min=min(sizes), max=max(sizes))


@app.post("/graphs/{graph_id}/recruitment", response_model=RecruitmentOut)
def recruitment_round(graph_id: str, body: RecruitmentIn) -> RecruitmentOut:
    graph = _get_graph(graph_id)
    try:
        aoi, geometry, portfolio = _scenario_parts(body.scenario)
        cfg = ExperimentConfig(
            aoi=aoi,
            geometry=geometry,
            portfolio=portfolio,
            ga=GaConfig(**body.ga),
            diffusion=DiffusionConfig(activation_probability=body.activation_probability),
            recruit=RecruitConfig(
                group_size=body.group_size,
                qos_min=body.qos_min,
                acceptance_probability=body.acceptance_probability,
                mode=body.mode,
                grs_pool_size=body.grs_pool_size,
            ),
            graph=graph,
            min_degree=body.scenario.min_degree,
            influencer_sizes=(body.influencer_size,),
            master_seed=body.seed,
            **{
                name: sampler.build()
                for name, sampler in (
                    ("speed_sampler", body.speed),
                    ("energy_sampler", body.energy),
                    ("reputation_sampler", body.reputation),
                )
                if sampler is not None
            },
        )
        report = run_recruitment_round(cfg, body.task_index)
    except (ValueError, RuntimeError, TypeError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from None
    return RecruitmentOut(
        mode=report.mode,
        task_domain=report.task_domain,
        group_members=list(report.group_members),
        registered_pool=report.registered_pool,
        mode_pool=report.mode_pool,
        slots=[
            SlotOut(worker=None, qos=None)
            if slot is None
            else SlotOut(worker=slot.worker, qos=slot.qos)
            for slot in report.result.slots
        ],
        substitutions=report.result.substitutions,
        average_qos=report.result.average_qos,
    )


def main() -> None:  # pragma: no cover - manual launcher
    import uvicorn

    uvicorn.run(app, host="127.0.0.1", port=8000)


if __name__ == "__main__":  # pragma: no cover
    main()
