"""Ranking analyses over per-setup metrics.

The weighted score ``alpha * latency_norm + (1 - alpha) * cost_norm`` is
swept over an evenly spaced alpha grid; per alpha the winning setup is the
score argmin. Exact score ties are broken by lower raw cost, then lower raw
latency, then canonical setup name, which keeps reports reproducible even
when many setups coincide numerically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .app import AppGraph, CallMode
from .fusion import FusionPartition, FusionSetup, validate_partition
from .pricing import PricingModel, SetupMetrics, metrics_for
from .sim import PlatformModel


class AnalysisError(ValueError):
    """Raised for invalid analysis inputs."""


@dataclass(frozen=True)
class AlphaGrid:
    """Evenly spaced weights gamma / (steps - 1) for gamma in 0..steps-1."""

    steps: int = 10001

    def __post_init__(self) -> None:
        if self.steps < 2:
            raise AnalysisError("alpha grid needs at least 2 steps")

    def values(self) -> np.ndarray:
        return np.arange(self.steps, dtype=float) / (self.steps - 1)


def normalize_metrics(values: Sequence[float]) -> list[float]:
    """Min-max normalization to [0, 1]; constant input maps to all zeros."""
    if not values:
        raise AnalysisError("cannot normalize an empty list")
    lo = min(values)
    hi = max(values)
    if hi == lo:
        return [0.0 for _ in values]
    return [(v - lo) / (hi - lo) for v in values]


def score(latency_norm: float, cost_norm: float, alpha: float) -> float:
    """Weighted sum of the two normalized objectives."""
    if not (0.0 <= alpha <= 1.0):
        raise AnalysisError("alpha must lie in [0, 1]")
    return alpha * latency_norm + (1.0 - alpha) * cost_norm


@dataclass(frozen=True)
class SweepReport:
    pricing_model_id: str
    steps: int
    winner_per_alpha: tuple[str, ...]
    coverage_counts: dict[str, int]
    partition_counts: dict[str, int]
    pareto: tuple[SetupMetrics, ...]

    @property
    def coverage(self) -> dict[str, float]:
        return {
            name: 100.0 * count / self.steps
            for name, count in self.coverage_counts.items()
        }

    @property
    def partition_coverage(self) -> dict[str, float]:
        return {
            name: 100.0 * count / self.steps
            for name, count in self.partition_counts.items()
        }

    def winner_at(self, alpha_index: int) -> str:
        return self.winner_per_alpha[alpha_index]

    def breakpoints(self) -> list[dict]:
        """Contiguous alpha ranges with a stable winner."""
        spans: list[dict] = []
        denom = self.steps - 1
        start = 0
        for i in range(1, self.steps + 1):
            if i == self.steps or self.winner_per_alpha[i] != self.winner_per_alpha[start]:
                spans.append(
                    {
                        "from_alpha": start / denom,
                        "to_alpha": (i - 1) / denom,
                        "winner": self.winner_per_alpha[start],
                    }
                )
                start = i
        return spans

    def to_json(self) -> str:
        doc = {
            "pricing": self.pricing_model_id,
            "steps": self.steps,
            "coverage": self.coverage,
            "coverage_counts": self.coverage_counts,
            "partition_coverage": self.partition_coverage,
            "partition_counts": self.partition_counts,
            "alpha_breakpoints": self.breakpoints(),
            "pareto": [
                {
                    "setup": m.setup_name,
                    "latency_ms": m.latency_ms,
                    "cost_pmi_usd": m.cost_pmi_usd,
                }
                for m in self.pareto
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True)


_SWEEP_CHUNK = 512


def alpha_sweep(
    metrics: Sequence[SetupMetrics],
    grid: AlphaGrid = AlphaGrid(),
    pricing_model_id: str = "",
) -> SweepReport:
    """Pick the score-minimal setup at every grid point and summarize."""
    if not metrics:
        raise AnalysisError("alpha_sweep needs at least one metric")
    # Pre-sorting by the tie-break key makes argmin's first-minimum rule
    # implement the documented tie-break exactly.
    order = sorted(
        range(len(metrics)),
        key=lambda i: (metrics[i].cost_pmi_usd, metrics[i].latency_ms, metrics[i].setup_name),
    )
    ordered = [metrics[i] for i in order]
    lat = np.array(normalize_metrics([m.latency_ms for m in ordered]))
    cost = np.array(normalize_metrics([m.cost_pmi_usd for m in ordered]))
    alphas = grid.values()

    winners: list[str] = []
    for lo in range(0, grid.steps, _SWEEP_CHUNK):
        chunk = alphas[lo : lo + _SWEEP_CHUNK, None]
        scores = chunk * lat[None, :] + (1.0 - chunk) * cost[None, :]
        for row in np.argmin(scores, axis=1):
            winners.append(ordered[row].setup_name)

    coverage_counts: dict[str, int] = {}
    partition_counts: dict[str, int] = {}
    for name in winners:
        coverage_counts[name] = coverage_counts.get(name, 0) + 1
        part = name.split("@", 1)[0]
        partition_counts[part] = partition_counts.get(part, 0) + 1
    return SweepReport(
        pricing_model_id=pricing_model_id,
        steps=grid.steps,
        winner_per_alpha=tuple(winners),
        coverage_counts=dict(sorted(coverage_counts.items())),
        partition_counts=dict(sorted(partition_counts.items())),
        pareto=tuple(pareto_front(metrics)),
    )


def pareto_front(metrics: Sequence[SetupMetrics]) -> list[SetupMetrics]:
    """Setups not dominated in (latency, cost), sorted by cost ascending.

    A setup is dominated when another is <= in both dimensions and < in at
    least one; duplicates of a non-dominated point are all kept.
    """
    if not metrics:
        raise AnalysisError("pareto_front needs at least one metric")
    by_key = sorted(
        metrics, key=lambda m: (m.cost_pmi_usd, m.latency_ms, m.setup_name)
    )
    front: list[SetupMetrics] = []
    best_lat_strictly_cheaper = float("inf")
    i = 0
    while i < len(by_key):
        j = i
        while j < len(by_key) and by_key[j].cost_pmi_usd == by_key[i].cost_pmi_usd:
            j += 1
        group_min = min(m.latency_ms for m in by_key[i:j])
        if group_min < best_lat_strictly_cheaper:
            front.extend(
                m for m in by_key[i:j] if m.latency_ms == group_min
            )
            best_lat_strictly_cheaper = group_min
        i = j
    return front


def sync_fuse_heuristic(app: AppGraph) -> FusionPartition:
    """Fuse the connected components of the synchronous skeleton.

    Tasks linked only by asynchronous calls stay in separate groups.
    """
    parent = {n: n for n in app.task_names()}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in app.edges:
        if e.mode is CallMode.SYNC:
            parent[find(e.caller)] = find(e.callee)
    blocks: dict[str, set[str]] = {}
    for n in app.task_names():
        blocks.setdefault(find(n), set()).add(n)
    partition = FusionPartition.from_groups([frozenset(b) for b in blocks.values()])
    return validate_partition(app, partition)


@dataclass(frozen=True)
class OptimizationStep:
    kind: str  # "fusion" or "resource"
    from_setup: str
    to_setup: str
    score_before: float
    score_after: float


def _neighbors(app: AppGraph, setup: FusionSetup) -> list[tuple[str, FusionSetup]]:
    """One-move neighborhood: fuse an edge, split along an edge, shift a level."""
    out: list[tuple[str, FusionSetup]] = []
    partition = setup.partition
    palette = setup.levels
    pairs = app.undirected_pairs()

    for a, b in pairs:
        ga, gb = partition.group_of(a), partition.group_of(b)
        if ga == gb:
            continue
        merged = partition.groups[ga] | partition.groups[gb]
        groups = [g for i, g in enumerate(partition.groups) if i not in (ga, gb)]
        levels = [setup.level_indices[i] for i in range(len(partition.groups)) if i not in (ga, gb)]
        groups.append(merged)
        levels.append(max(setup.level_indices[ga], setup.level_indices[gb]))
        new_part = FusionPartition.from_groups(groups)
        realign = [
            levels[groups.index(g)] for g in new_part.groups
        ]
        out.append(("fusion", FusionSetup(new_part, tuple(realign), palette)))

    for gi, group in enumerate(partition.groups):
        if len(group) < 2:
            continue
        internal = [(a, b) for a, b in pairs if a in group and b in group]
        for cut in internal:
            kept = [p for p in internal if p != cut]
            parent = {n: n for n in group}

            def find(x: str) -> str:
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            for a, b in kept:
                parent[find(a)] = find(b)
            halves: dict[str, set[str]] = {}
            for n in group:
                halves.setdefault(find(n), set()).add(n)
            if len(halves) != 2:
                continue
            groups = [g for i, g in enumerate(partition.groups) if i != gi]
            levels = [setup.level_indices[i] for i in range(len(partition.groups)) if i != gi]
            for half in halves.values():
                groups.append(frozenset(half))
                levels.append(setup.level_indices[gi])
            new_part = FusionPartition.from_groups(groups)
            realign = [levels[groups.index(g)] for g in new_part.groups]
            out.append(("fusion", FusionSetup(new_part, tuple(realign), palette)))

    for gi in range(len(partition.groups)):
        for delta in (-1, 1):
            idx = setup.level_indices[gi] + delta
            if 0 <= idx < len(palette):
                levels = list(setup.level_indices)
                levels[gi] = idx
                out.append(("resource", FusionSetup(partition, tuple(levels), palette)))
    return out


def greedy_optimize_path(
    app: AppGraph,
    platform: PlatformModel,
    pricing: PricingModel,
    alpha: float,
    start_setup: FusionSetup,
    full_metrics: Sequence[SetupMetrics] | None = None,
) -> list[OptimizationStep]:
    """Hill-climb from ``start_setup`` to a local score optimum.

    With ``full_metrics`` (the default mode when a full run is available),
    normalization is fixed over that set. Without it, normalization is
    recomputed over every setup evaluated so far, and already-visited setups
    are never re-entered, which keeps the path finite.
    """
    if not (0.0 <= alpha <= 1.0):
        raise AnalysisError("alpha must lie in [0, 1]")
    cache: dict[str, SetupMetrics] = {}
    if full_metrics is not None:
        cache.update({m.setup_name: m for m in full_metrics})

    def measure(setup: FusionSetup) -> SetupMetrics:
        key = setup.name
        if key not in cache:
            if full_metrics is not None:
                raise AnalysisError(f"setup {key!r} missing from the metric set")
            cache[key] = metrics_for(app, setup, pricing, platform)
        return cache[key]

    def scores_for(names: Sequence[str]) -> dict[str, float]:
        pool = list(cache.values())
        lat = normalize_metrics([m.latency_ms for m in pool])
        cost = normalize_metrics([m.cost_pmi_usd for m in pool])
        table = {
            m.setup_name: score(lat[i], cost[i], alpha) for i, m in enumerate(pool)
        }
        return {n: table[n] for n in names}

    current = start_setup
    measure(current)
    visited = {current.name}
    steps: list[OptimizationStep] = []
    while True:
        neighborhood = [
            (kind, setup)
            for kind, setup in _neighbors(app, current)
            if setup.name not in visited
        ]
        for _, setup in neighborhood:
            measure(setup)
        wanted = [current.name] + [s.name for _, s in neighborhood]
        table = scores_for(wanted)
        current_score = table[current.name]
        best: tuple[float, float, float, str] | None = None
        best_move: tuple[str, FusionSetup] | None = None
        for kind, setup in neighborhood:
            m = cache[setup.name]
            key = (table[setup.name], m.cost_pmi_usd, m.latency_ms, setup.name)
            if best is None or key < best:
                best = key
                best_move = (kind, setup)
        if best is None or best[0] >= current_score:
            return steps
        kind, nxt = best_move  # type: ignore[misc]
        steps.append(
            OptimizationStep(
                kind=kind,
                from_setup=current.name,
                to_setup=nxt.name,
                score_before=current_score,
                score_after=best[0],
            )
        )
        visited.add(nxt.name)
        current = nxt


def baseline_comparison(
    metrics: Sequence[SetupMetrics], baseline_setup: str
) -> tuple[float, float]:
    """Percentage reductions of the per-dimension best versus a baseline."""
    baseline = next((m for m in metrics if m.setup_name == baseline_setup), None)
    if baseline is None:
        raise AnalysisError(f"baseline {baseline_setup!r} missing from metrics")
    best_latency = min(m.latency_ms for m in metrics)
    best_cost = min(m.cost_pmi_usd for m in metrics)
    lat_pct = (
        100.0 * (baseline.latency_ms - best_latency) / baseline.latency_ms
        if baseline.latency_ms > 0
        else 0.0
    )
    cost_pct = (
        100.0 * (baseline.cost_pmi_usd - best_cost) / baseline.cost_pmi_usd
        if baseline.cost_pmi_usd > 0
        else 0.0
    )
    return lat_pct, cost_pct
