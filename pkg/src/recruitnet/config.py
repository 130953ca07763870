"""Experiment configuration: one TOML file drives all three stages.

The file names a graph source (CSV pair or synthetic generator), the
area partition with its disc geometry, the task portfolio, per-stage
tuning tables, worker attribute sources, and the experiment grid.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .diffusion import DiffusionConfig
from .groupmetrics import AoiPartition, Task, TaskPortfolio
from .influencemax import GaConfig
from .mcspool import (
    AttributeModel,
    Sampler,
    SubareaGeometry,
    constant_sampler,
    load_attribute_table,
    uniform_sampler,
)
from .recruitment import MODES, RecruitConfig
from .seeding import derive_seed
from .socialgraph import SocialGraph, SynthConfig, generate_synthetic, load_graph


class ConfigError(ValueError):
    """A configuration file could not be interpreted."""


DEFAULT_SPEED_SAMPLER = uniform_sampler(5.0, 50.0)
DEFAULT_ENERGY_SAMPLER = uniform_sampler(0.0, 1.0)
DEFAULT_REPUTATION_SAMPLER = constant_sampler(0.5)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment needs, resolved and validated."""

    aoi: AoiPartition
    geometry: Mapping[str, SubareaGeometry]
    portfolio: TaskPortfolio
    ga: GaConfig = field(default_factory=GaConfig)
    diffusion: DiffusionConfig = field(default_factory=DiffusionConfig)
    recruit: RecruitConfig = field(default_factory=lambda: RecruitConfig(group_size=10))
    graph: SocialGraph | None = None
    synth: SynthConfig | None = None
    nodes_path: Path | None = None
    edges_path: Path | None = None
    speed_sampler: Sampler = DEFAULT_SPEED_SAMPLER
    energy_sampler: Sampler = DEFAULT_ENERGY_SAMPLER
    reputation_sampler: Sampler = DEFAULT_REPUTATION_SAMPLER
    min_degree: int = 1
    influencer_sizes: tuple[int, ...] = (2,)
    acceptance_grid: tuple[float, ...] = (1.0,)
    modes: tuple[str, ...] = MODES
    repetitions: int = 100
    master_seed: int = 0
    output_path: Path | None = None

    def __post_init__(self) -> None:
        sources = [
            self.graph is not None,
            self.synth is not None,
            self.nodes_path is not None or self.edges_path is not None,
        ]
        if sum(sources) != 1:
            raise ConfigError("exactly one graph source required: graph, synth, or CSV paths")
        if (self.nodes_path is None) != (self.edges_path is None):
            raise ConfigError("nodes and edges CSV paths must be given together")
        missing = [label for label in self.aoi.labels() if label not in self.geometry]
        if missing:
            raise ConfigError(f"subareas without geometry: {missing}")
        if self.min_degree < 0:
            raise ConfigError("min_degree must be >= 0")
        if not self.influencer_sizes or any(size < 1 for size in self.influencer_sizes):
            raise ConfigError("influencer_sizes must be positive and non-empty")
        if not self.acceptance_grid or any(not 0 <= a <= 1 for a in self.acceptance_grid):
            raise ConfigError("acceptance_grid values must be in [0, 1]")
        if not self.modes or any(mode not in MODES for mode in self.modes):
            raise ConfigError(f"modes must be a non-empty subset of {MODES}")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")

    def build_graph(self) -> SocialGraph:
        """Materialise the configured graph source (seeded off master_seed)."""
        if self.graph is not None:
            return self.graph
        if self.synth is not None:
            return generate_synthetic(self.synth, derive_seed(self.master_seed, "graph"))
        return load_graph(self.nodes_path, self.edges_path)

    def attribute_model(self) -> AttributeModel:
        return AttributeModel(
            geometry=self.geometry,
            speed_sampler=self.speed_sampler,
            energy_sampler=self.energy_sampler,
            reputation_sampler=self.reputation_sampler,
        )


def _require(table: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in table:
        raise ConfigError(f"missing key {key!r} in [{where}]")
    return table[key]


def _sampler(spec: Any, attribute: str, base: Path) -> Sampler:
    where = f"attributes.{attribute}"
    if not isinstance(spec, Mapping):
        raise ConfigError(f"[{where}] must be a table with a 'kind'")
    kind = _require(spec, "kind", where)
    try:
        if kind == "constant":
            return constant_sampler(float(_require(spec, "value", where)))
        if kind == "uniform":
            low = float(_require(spec, "low", where))
            high = float(_require(spec, "high", where))
            return uniform_sampler(low, high)
        if kind == "table":
            table = load_attribute_table(base / str(_require(spec, "path", where)))
            expected = "speed_kmh" if attribute == "speed" else "reputation"
            if table.column != expected:
                raise ConfigError(
                    f"[{where}] table column {table.column!r}, expected {expected!r}"
                )
            return table.sampler()
    except (ValueError, OSError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"[{where}]: {exc}") from None
    raise ConfigError(f"[{where}] unknown sampler kind {kind!r}")


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate an experiment TOML file.

    Relative paths inside the file (graph CSVs, attribute tables) resolve
    against the file's own directory.
    """
    path = Path(path)
    try:
        with path.open("rb") as handle:
            raw = tomllib.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    base = path.parent

    try:
        return _interpret(raw, base)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _interpret(raw: Mapping[str, Any], base: Path) -> ExperimentConfig:
    graph_table = _require(raw, "graph", "graph")
    source = _require(graph_table, "source", "graph")
    synth = None
    nodes_path = edges_path = None
    if source == "synthetic":
        synth_table = dict(_require(graph_table, "synthetic", "graph"))
        for key in ("interests", "subareas"):
            if key in synth_table:
                synth_table[key] = tuple(synth_table[key])
        synth = SynthConfig(**synth_table)
    elif source == "files":
        nodes_path = base / str(_require(graph_table, "nodes", "graph"))
        edges_path = base / str(_require(graph_table, "edges", "graph"))
    else:
        raise ConfigError(f"[graph] source must be 'synthetic' or 'files', got {source!r}")

    area_table = _require(raw, "area", "area")
    subareas = []
    geometry = {}
    for entry in _require(area_table, "subareas", "area"):
        label = str(_require(entry, "label", "area.subareas"))
        subareas.append((label, float(_require(entry, "weight", "area.subareas"))))
        geometry[label] = SubareaGeometry(
            center=(
                float(_require(entry, "lat", "area.subareas")),
                float(_require(entry, "lon", "area.subareas")),
            ),
            radius_km=float(entry.get("radius_km", SubareaGeometry.radius_km)),
        )
    aoi = AoiPartition(tuple(subareas))

    portfolio_table = _require(raw, "portfolio", "portfolio")
    tasks = []
    for entry in _require(portfolio_table, "tasks", "portfolio"):
        tasks.append(
            Task(
                location=(
                    float(_require(entry, "lat", "portfolio.tasks")),
                    float(_require(entry, "lon", "portfolio.tasks")),
                ),
                time_constraint_minutes=float(
                    _require(entry, "time_constraint_minutes", "portfolio.tasks")
                ),
                domain=str(_require(entry, "domain", "portfolio.tasks")),
                min_reputation=float(entry.get("min_reputation", 0.0)),
            )
        )
    weights = _require(portfolio_table, "interest_weights", "portfolio")
    portfolio = TaskPortfolio(
        tasks=tuple(tasks),
        interest_weights=tuple((str(k), float(v)) for k, v in weights.items()),
    )

    selection = raw.get("selection", {})
    ga = GaConfig(**selection.get("ga", {}))
    diffusion = DiffusionConfig(**raw.get("diffusion", {}))
    recruit_table = dict(raw.get("recruit", {}))
    recruit_table.setdefault("group_size", 10)
    recruit = RecruitConfig(**recruit_table)

    attributes = raw.get("attributes", {})
    speed = (
        _sampler(attributes["speed"], "speed", base)
        if "speed" in attributes
        else DEFAULT_SPEED_SAMPLER
    )
    energy = (
        _sampler(attributes["energy"], "energy", base)
        if "energy" in attributes
        else DEFAULT_ENERGY_SAMPLER
    )
    reputation = (
        _sampler(attributes["reputation"], "reputation", base)
        if "reputation" in attributes
        else DEFAULT_REPUTATION_SAMPLER
    )

    experiment = raw.get("experiment", {})
    output = experiment.get("output")
    return ExperimentConfig(
        aoi=aoi,
        geometry=geometry,
        portfolio=portfolio,
        ga=ga,
        diffusion=diffusion,
        recruit=recruit,
        synth=synth,
        nodes_path=nodes_path,
        edges_path=edges_path,
        speed_sampler=speed,
        energy_sampler=energy,
        reputation_sampler=reputation,
        min_degree=int(selection.get("min_degree", 1)),
        influencer_sizes=tuple(int(s) for s in experiment.get("influencer_sizes", (2,))),
        acceptance_grid=tuple(float(a) for a in experiment.get("acceptance_grid", (1.0,))),
        modes=tuple(experiment.get("modes", MODES)),
        repetitions=int(experiment.get("repetitions", 100)),
        master_seed=int(experiment.get("master_seed", 0)),
        output_path=(base / str(output)) if output else None,
    )
