"""Influencer group selection: genetic search plus two baselines.

All three selectors optimise the same pluggable objective (by default
the group rank from groupmetrics) over fixed-size subsets of a candidate
list.  greedy_select adds members one at a time by marginal gain,
exhaustive_select scans every combination, and ga_select runs a genetic
search whose initial population is seeded with the greedy solution so it
can never come back worse than greedy on the same objective.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from math import comb, inf
from typing import Callable, Iterable, Sequence

from .groupmetrics import AoiPartition, InfluencerGroup, TaskPortfolio, score_group
from .socialgraph import NodeId, SocialGraph

ProxyFn = Callable[[frozenset[NodeId]], float]

Chromosome = tuple[NodeId, ...]  # sorted, k distinct candidate ids


class NoFeasibleGroupError(RuntimeError):
    """No group covering every portfolio interest was found.

    Carries the best infeasible group observed so callers can inspect
    how close the search got.
    """

    def __init__(self, message: str, best_infeasible: InfluencerGroup | None = None) -> None:
        super().__init__(message)
        self.best_infeasible = best_infeasible


class CombinationCapError(ValueError):
    """Exhaustive search was asked to scan more combinations than allowed."""


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 100
    max_generations: int = 500
    convergence_window: int = 50
    crossover_rate: float = 0.9
    mutation_rate: float = 0.05
    elitism_count: int = 2
    max_possible_score: float | None = None

    def __post_init__(self) -> None:
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.max_generations < 1:
            raise ValueError("max_generations must be >= 1")
        if self.convergence_window < 1:
            raise ValueError("convergence_window must be >= 1")
        for name in ("crossover_rate", "mutation_rate"):
            rate = getattr(self, name)
            if not 0 <= rate <= 1:
                raise ValueError(f"{name} must be in [0, 1]")
        if not 0 <= self.elitism_count < self.population_size:
            raise ValueError("elitism_count must be in [0, population_size)")


def _prepare(
    graph: SocialGraph, candidates: Iterable[NodeId], k: int
) -> tuple[NodeId, ...]:
    pool = tuple(sorted(set(candidates)))
    for candidate in pool:
        graph.node(candidate)  # raises UnknownNodeError for strays
    if k < 1:
        raise ValueError("group size k must be >= 1")
    if k > len(pool):
        raise ValueError(f"group size {k} exceeds candidate pool of {len(pool)}")
    return pool


class _Scorer:
    """Memoised objective and feasibility lookups for one selection run."""

    def __init__(
        self,
        graph: SocialGraph,
        aoi: AoiPartition,
        portfolio: TaskPortfolio,
        proxy: ProxyFn | None,
    ) -> None:
        self.graph = graph
        self.aoi = aoi
        self.portfolio = portfolio
        self.proxy = proxy
        self._fitness: dict[Chromosome, float] = {}
        self._holders = {
            label: frozenset(
                nid for nid in graph.node_ids() if label in graph.node(nid).interests
            )
            for label in portfolio.interests()
        }

    def fitness(self, genes: Chromosome) -> float:
        cached = self._fitness.get(genes)
        if cached is None:
            members = frozenset(genes)
            if self.proxy is not None:
                cached = self.proxy(members)
            else:
                cached = score_group(self.graph, members, self.aoi, self.portfolio).rank
            self._fitness[genes] = cached
        return cached

    def feasible(self, genes: Chromosome) -> bool:
        genes_set = set(genes)
        return all(genes_set & holders for holders in self._holders.values())

    def missing_interests(self, genes: Sequence[NodeId]) -> list[str]:
        genes_set = set(genes)
        return [
            label
            for label in self.portfolio.interests()
            if not genes_set & self._holders[label]
        ]

    def holders_of(self, label: str) -> frozenset[NodeId]:
        return self._holders[label]


def greedy_select(
    graph: SocialGraph,
    candidates: Iterable[NodeId],
    k: int,
    aoi: AoiPartition,
    portfolio: TaskPortfolio,
    proxy: ProxyFn | None = None,
) -> InfluencerGroup:
    """Pick k members one at a time by best marginal objective gain.

    Ties go to the lowest node id, and an empty group scores zero, so the
    result is fully deterministic.  Feasibility is not enforced; under
    the default objective infeasible groups already score zero.
    """
    pool = _prepare(graph, candidates, k)
    scorer = _Scorer(graph, aoi, portfolio, proxy)
    chosen: list[NodeId] = []
    for _ in range(k):
        best_candidate = None
        best_score = -inf
        for candidate in pool:
            if candidate in chosen:
                continue
            trial = tuple(sorted(chosen + [candidate]))
            trial_score = scorer.fitness(trial)
            if trial_score > best_score:
                best_candidate, best_score = candidate, trial_score
        chosen.append(best_candidate)
    return score_group(graph, frozenset(chosen), aoi, portfolio)


def exhaustive_select(
    graph: SocialGraph,
    candidates: Iterable[NodeId],
    k: int,
    aoi: AoiPartition,
    portfolio: TaskPortfolio,
    proxy: ProxyFn | None = None,
    require_feasible: bool = True,
    max_combinations: int = 1_000_000,
) -> InfluencerGroup:
    """Scan every k-subset and return the best; the true optimum.

    Refuses to run past max_combinations subsets.  Ties resolve to the
    lexicographically smallest member tuple because subsets are visited
    in sorted order and only strict improvements replace the incumbent.
    """
    pool = _prepare(graph, candidates, k)
    total = comb(len(pool), k)
    if total > max_combinations:
        raise CombinationCapError(
            f"{total} combinations exceed the cap of {max_combinations}"
        )
    scorer = _Scorer(graph, aoi, portfolio, proxy)
    best: Chromosome | None = None
    best_score = -inf
    best_any: Chromosome | None = None
    best_any_score = -inf
    for combo in combinations(pool, k):
        fitness = scorer.fitness(combo)
        if fitness > best_any_score:
            best_any, best_any_score = combo, fitness
        if require_feasible and not scorer.feasible(combo):
            continue
        if fitness > best_score:
            best, best_score = combo, fitness
    if best is None:
        fallback = score_group(graph, frozenset(best_any), aoi, portfolio)
        raise NoFeasibleGroupError(
            f"no feasible group of size {k} covers all portfolio interests", fallback
        )
    return score_group(graph, frozenset(best), aoi, portfolio)


def _random_chromosome(rng: random.Random, pool: Sequence[NodeId], k: int) -> Chromosome:
    return tuple(sorted(rng.sample(pool, k)))


def _repair_feasibility(
    rng: random.Random,
    genes: Chromosome,
    pool: Sequence[NodeId],
    scorer: _Scorer,
) -> Chromosome:
    """Swap genes until every portfolio interest has a holder, if possible."""
    working = list(genes)
    pool_set = set(pool)
    for _ in range(2 * len(scorer.portfolio.interests()) + 2):
        missing = scorer.missing_interests(working)
        if not missing:
            break
        holders = sorted((scorer.holders_of(missing[0]) & pool_set) - set(working))
        if not holders:
            break  # nobody in the pool holds it; leave for the rank-0 penalty
        newcomer = holders[rng.randrange(len(holders))]
        # prefer evicting a gene that is not the sole holder of a covered interest
        sole = set()
        for label in scorer.portfolio.interests():
            covering = [g for g in working if g in scorer.holders_of(label)]
            if len(covering) == 1:
                sole.add(covering[0])
        evictable = [g for g in working if g not in sole] or working
        victim = evictable[rng.randrange(len(evictable))]
        working[working.index(victim)] = newcomer
    return tuple(sorted(working))


def _crossover(
    rng: random.Random, a: Chromosome, b: Chromosome, pool: Sequence[NodeId]
) -> Chromosome:
    child: list[NodeId | None] = []
    used: set[NodeId] = set()
    for gene_a, gene_b in zip(a, b):
        gene = gene_a if rng.random() < 0.5 else gene_b
        if gene in used:
            child.append(None)
        else:
            used.add(gene)
            child.append(gene)
    if None in child:
        unused = [c for c in pool if c not in used]
        for index, gene in enumerate(child):
            if gene is None:
                child[index] = unused.pop(rng.randrange(len(unused)))
    return tuple(sorted(child))  # type: ignore[arg-type]


def _mutate(
    rng: random.Random, genes: Chromosome, pool: Sequence[NodeId], rate: float
) -> Chromosome:
    working = list(genes)
    for index in range(len(working)):
        if rng.random() < rate:
            unused = [c for c in pool if c not in working]
            if unused:
                working[index] = unused[rng.randrange(len(unused))]
    return tuple(sorted(working))


def _tournament(
    rng: random.Random, scored: Sequence[tuple[float, Chromosome]]
) -> Chromosome:
    first = scored[rng.randrange(len(scored))]
    second = scored[rng.randrange(len(scored))]
    winner = max(first, second, key=lambda item: (item[0], item[1]))
    return winner[1]


def ga_select(
    graph: SocialGraph,
    candidates: Iterable[NodeId],
    k: int,
    aoi: AoiPartition,
    portfolio: TaskPortfolio,
    cfg: GaConfig | None = None,
    seed: int = 0,
    proxy: ProxyFn | None = None,
    require_feasible: bool = True,
    extra_seeds: Iterable[Iterable[NodeId]] = (),
) -> InfluencerGroup:
    """Genetic search for the best group of size k.

    Fixed-length chromosomes of distinct candidate ids; tournament
    selection of size 2, uniform crossover with duplicate repair,
    per-gene mutation, elitism.  Generation zero contains the greedy
    solution under the same objective (plus any extra_seeds), so the
    final answer is never worse than greedy.  Terminates on a stagnant
    best, on max_generations, or on reaching max_possible_score.

    With require_feasible the best is tracked over feasible groups only
    and infeasible chromosomes are repaired when possible; if no feasible
    group is ever seen, NoFeasibleGroupError is raised.
    """
    cfg = cfg or GaConfig()
    pool = _prepare(graph, candidates, k)
    scorer = _Scorer(graph, aoi, portfolio, proxy)
    rng = random.Random(seed)
    seeded: list[Chromosome] = []
    for extra in extra_seeds:
        genes = tuple(sorted(extra))
        if len(genes) != k or len(set(genes)) != k or not set(genes) <= set(pool):
            raise ValueError(f"extra seed {genes!r} is not a k-subset of the candidates")
        seeded.append(genes)

    if k == len(pool):
        # only one possible group; no search needed
        genes = tuple(pool)
        if require_feasible and not scorer.feasible(genes):
            raise NoFeasibleGroupError(
                f"the unique group of size {k} misses some portfolio interests",
                score_group(graph, frozenset(genes), aoi, portfolio),
            )
        return score_group(graph, frozenset(genes), aoi, portfolio)

    population: list[Chromosome] = [
        tuple(sorted(greedy_select(graph, pool, k, aoi, portfolio, proxy).members))
    ]
    population.extend(seeded)
    del population[cfg.population_size :]
    while len(population) < cfg.population_size:
        genes = _random_chromosome(rng, pool, k)
        if require_feasible and not scorer.feasible(genes):
            genes = _repair_feasibility(rng, genes, pool, scorer)
        population.append(genes)

    best: Chromosome | None = None
    best_score = -inf
    best_any: Chromosome | None = None
    best_any_score = -inf
    stagnant = 0
    for _generation in range(cfg.max_generations):
        scored = [(scorer.fitness(genes), genes) for genes in population]
        improved = False
        for fitness, genes in scored:
            if fitness > best_any_score:
                best_any, best_any_score = genes, fitness
            if require_feasible and not scorer.feasible(genes):
                continue
            if fitness > best_score:
                best, best_score = genes, fitness
                improved = True
            elif fitness == best_score and best is not None and genes < best:
                best = genes  # deterministic tie-break, not an improvement
        stagnant = 0 if improved else stagnant + 1
        if stagnant >= cfg.convergence_window:
            break
        if (
            cfg.max_possible_score is not None
            and best is not None
            and best_score >= cfg.max_possible_score - 1e-12
        ):
            break

        ranked = sorted(scored, key=lambda item: (-item[0], item[1]))
        next_population = [genes for _, genes in ranked[: cfg.elitism_count]]
        while len(next_population) < cfg.population_size:
            parent_a = _tournament(rng, scored)
            parent_b = _tournament(rng, scored)
            if rng.random() < cfg.crossover_rate:
                child = _crossover(rng, parent_a, parent_b, pool)
            else:
                child = parent_a
            child = _mutate(rng, child, pool, cfg.mutation_rate)
            if require_feasible and not scorer.feasible(child):
                child = _repair_feasibility(rng, child, pool, scorer)
            next_population.append(child)
        population = next_population

    if best is None:
        fallback = (
            score_group(graph, frozenset(best_any), aoi, portfolio) if best_any else None
        )
        raise NoFeasibleGroupError(
            f"no feasible group of size {k} was found by the genetic search", fallback
        )
    return score_group(graph, frozenset(best), aoi, portfolio)
