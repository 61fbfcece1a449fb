"""Enumeration of fusion partitions and setups with canonical naming.

A fusion partition groups tasks into connected blocks along the app's edges
(direction ignored). A fusion setup adds one resource level per group.
Enumeration iterates the subsets of the undirected edge set; an edge in the
subset means its endpoints share a group. Subsets that induce the same
partition (possible on non-tree graphs) are deduplicated by canonical name.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .app import AppGraph


class FusionError(ValueError):
    """Raised for invalid partitions, setups, or setup names."""


@dataclass(frozen=True)
class ResourceConfig:
    """One resource level: fraction of a vCPU plus memory in MB."""

    cpu: float
    memory_mb: int

    def __post_init__(self) -> None:
        if not (self.cpu > 0):
            raise FusionError("cpu must be positive")
        if self.memory_mb <= 0:
            raise FusionError("memory_mb must be positive")


# The three platform resource rows used throughout the examples.
DEFAULT_LEVELS: tuple[ResourceConfig, ...] = (
    ResourceConfig(0.1, 128),
    ResourceConfig(0.5, 832),
    ResourceConfig(1.0, 1769),
)


def group_name(tasks: frozenset[str]) -> str:
    """Canonical name of one group: members sorted, '+'-joined if multi-char."""
    members = sorted(tasks)
    if any(len(m) > 1 for m in members):
        return "+".join(members)
    return "".join(members)


@dataclass(frozen=True)
class FusionPartition:
    """Disjoint connected groups covering all tasks, in canonical order."""

    groups: tuple[frozenset[str], ...]

    @staticmethod
    def from_groups(groups: Sequence[frozenset[str]]) -> "FusionPartition":
        ordered = tuple(sorted((frozenset(g) for g in groups), key=group_name))
        return FusionPartition(ordered)

    @property
    def name(self) -> str:
        return canonical_name(self)

    def group_of(self, task: str) -> int:
        for i, g in enumerate(self.groups):
            if task in g:
                return i
        raise KeyError(task)


@dataclass(frozen=True)
class FusionSetup:
    """A partition plus a resource level index per group (canonical order)."""

    partition: FusionPartition
    level_indices: tuple[int, ...]
    levels: tuple[ResourceConfig, ...]

    def __post_init__(self) -> None:
        if len(self.level_indices) != len(self.partition.groups):
            raise FusionError("one level index required per group")
        for idx in self.level_indices:
            if not (0 <= idx < len(self.levels)):
                raise FusionError(f"level index {idx} out of range")

    @property
    def name(self) -> str:
        return setup_name(self)

    def config_of(self, group_index: int) -> ResourceConfig:
        return self.levels[self.level_indices[group_index]]

    def assignment(self) -> dict[str, ResourceConfig]:
        return {
            group_name(g): self.config_of(i)
            for i, g in enumerate(self.partition.groups)
        }


def canonical_name(partition: FusionPartition) -> str:
    """Groups named individually, sorted, and comma-joined."""
    return ",".join(sorted(group_name(g) for g in partition.groups))


def setup_name(setup: FusionSetup) -> str:
    """``<partition>@<levelIdx>,...`` with indices in group order."""
    idx = ",".join(str(i) for i in setup.level_indices)
    return f"{canonical_name(setup.partition)}@{idx}"


def _adjacency(app: AppGraph) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {n: set() for n in app.task_names()}
    for a, b in app.undirected_pairs():
        adj[a].add(b)
        adj[b].add(a)
    return adj


def _is_connected(tasks: frozenset[str], adj: dict[str, set[str]]) -> bool:
    start = next(iter(tasks))
    seen = {start}
    frontier = [start]
    while frontier:
        node = frontier.pop()
        for nxt in adj[node]:
            if nxt in tasks and nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen == tasks


def validate_partition(app: AppGraph, partition: FusionPartition) -> FusionPartition:
    """Check coverage, disjointness, and per-group connectivity."""
    names = set(app.task_names())
    seen: set[str] = set()
    for g in partition.groups:
        if not g:
            raise FusionError("empty group")
        for t in g:
            if t not in names:
                raise FusionError(f"unknown task {t!r}")
            if t in seen:
                raise FusionError(f"task {t!r} appears twice")
            seen.add(t)
    if seen != names:
        missing = sorted(names - seen)
        raise FusionError(f"task {missing[0]!r} not covered")
    adj = _adjacency(app)
    for g in partition.groups:
        if not _is_connected(g, adj):
            raise FusionError(f"group {group_name(g)!r} not connected")
    return partition


def enumerate_partitions(app: AppGraph) -> list[FusionPartition]:
    """All partitions into edge-connected groups, sorted by canonical name."""
    pairs = app.undirected_pairs()
    names = app.task_names()
    by_name: dict[str, FusionPartition] = {}
    for mask in range(1 << len(pairs)):
        parent = {n: n for n in names}

        def find(x: str) -> str:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for bit, (a, b) in enumerate(pairs):
            if mask >> bit & 1:
                parent[find(a)] = find(b)
        blocks: dict[str, set[str]] = {}
        for n in names:
            blocks.setdefault(find(n), set()).add(n)
        part = FusionPartition.from_groups([frozenset(b) for b in blocks.values()])
        by_name.setdefault(part.name, part)
    return [by_name[k] for k in sorted(by_name)]


def enumerate_setups(
    app: AppGraph, levels: Sequence[ResourceConfig] = DEFAULT_LEVELS
) -> Iterator[FusionSetup]:
    """Stream every (partition, level assignment) pair in deterministic order.

    Order is partition order, then the mixed-radix counter over level indices
    with the first group most significant.
    """
    if not levels:
        raise FusionError("level list must not be empty")
    palette = tuple(levels)
    radix = len(palette)
    for partition in enumerate_partitions(app):
        k = len(partition.groups)
        for code in range(radix**k):
            digits = []
            rem = code
            for _ in range(k):
                rem, d = divmod(rem, radix)
                digits.append(d)
            digits.reverse()
            yield FusionSetup(partition, tuple(digits), palette)


def count_setups_tree(task_count: int, level_count: int) -> int:
    """Closed-form setup count for call trees: R * (R + 1) ** (n - 1)."""
    if task_count <= 0 or level_count <= 0:
        raise FusionError("task_count and level_count must be positive")
    return level_count * (level_count + 1) ** (task_count - 1)


def parse_setup_name(app: AppGraph, name: str) -> FusionPartition:
    """Inverse of canonical_name (the part before any '@')."""
    partition_text = name.split("@", 1)[0]
    groups: list[frozenset[str]] = []
    for chunk in partition_text.split(","):
        if not chunk:
            raise FusionError(f"empty group in {name!r}")
        members = chunk.split("+") if "+" in chunk else list(chunk)
        groups.append(frozenset(members))
    return validate_partition(app, FusionPartition.from_groups(groups))


def parse_full_setup_name(
    app: AppGraph, name: str, levels: Sequence[ResourceConfig] = DEFAULT_LEVELS
) -> FusionSetup:
    """Parse ``<partition>@<levelIdx>,...``; levels default to all zero."""
    partition_text, _, level_text = name.partition("@")
    partition = parse_setup_name(app, partition_text)
    if level_text:
        try:
            indices = tuple(int(x) for x in level_text.split(","))
        except ValueError:
            raise FusionError(f"bad level indices in {name!r}") from None
    else:
        indices = tuple(0 for _ in partition.groups)
    return FusionSetup(partition, indices, tuple(levels))


def singleton_setup(
    app: AppGraph, levels: Sequence[ResourceConfig] = DEFAULT_LEVELS, level_index: int = 0
) -> FusionSetup:
    """Every task in its own group at one uniform level (the usual baseline)."""
    partition = FusionPartition.from_groups(
        [frozenset([n]) for n in app.task_names()]
    )
    return FusionSetup(partition, tuple(level_index for _ in partition.groups), tuple(levels))
