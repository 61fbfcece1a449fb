"""Full-pipeline execution: enumerate, simulate, and price every setup.

Rows come out in enumeration order and with repr-exact float formatting, so
a results file is byte-identical across repeated runs and any worker count.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .app import AppGraph
from .fusion import DEFAULT_LEVELS, FusionSetup, ResourceConfig, enumerate_setups
from .pricing import (
    InstanceBasedPricing,
    SetupMetrics,
    TraditionalPricing,
    cost_of,
)
from .sim import PlatformModel, simulate

RESULT_COLUMNS = (
    "app",
    "setup",
    "latency_ms",
    "cost_traditional_pmi",
    "cost_instance_pmi",
    "invocations",
    "cold_starts",
)


@dataclass(frozen=True)
class RunRow:
    app: str
    setup: str
    latency_ms: float
    cost_traditional_pmi: float
    cost_instance_pmi: float
    invocations: int
    cold_starts: int


_WORKER_STATE: dict = {}


def _init_worker(app: AppGraph, platform: PlatformModel,
                 traditional: TraditionalPricing,
                 instance: InstanceBasedPricing) -> None:
    _WORKER_STATE["args"] = (app, platform, traditional, instance)


def _row_for(setup: FusionSetup) -> RunRow:
    app, platform, traditional, instance = _WORKER_STATE["args"]
    return evaluate_setup(app, setup, platform, traditional, instance)


def evaluate_setup(
    app: AppGraph,
    setup: FusionSetup,
    platform: PlatformModel,
    traditional: TraditionalPricing,
    instance: InstanceBasedPricing,
) -> RunRow:
    result = simulate(app, setup, platform)
    return RunRow(
        app=app.name,
        setup=setup.name,
        latency_ms=result.latency_ms,
        cost_traditional_pmi=cost_of(result, setup, traditional),
        cost_instance_pmi=cost_of(result, setup, instance),
        invocations=result.remote_calls,
        cold_starts=sum(1 for r in result.invocations if r.cold),
    )


def run_all(
    app: AppGraph,
    levels: Sequence[ResourceConfig] = DEFAULT_LEVELS,
    platform: PlatformModel = PlatformModel(),
    traditional: TraditionalPricing = TraditionalPricing(),
    instance: InstanceBasedPricing = InstanceBasedPricing(),
    jobs: int = 1,
) -> Iterator[RunRow]:
    """Yield one row per setup, in enumeration order, optionally in parallel."""
    setups = enumerate_setups(app, levels)
    if jobs <= 1:
        _init_worker(app, platform, traditional, instance)
        for setup in setups:
            yield _row_for(setup)
        return
    with ProcessPoolExecutor(
        max_workers=jobs,
        initializer=_init_worker,
        initargs=(app, platform, traditional, instance),
    ) as pool:
        yield from pool.map(_row_for, setups, chunksize=256)


def write_results_csv(rows: Iterable[RunRow], stream: io.TextIOBase) -> int:
    """Write rows with stable formatting; returns the data-row count."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    count = 0
    for row in rows:
        writer.writerow(
            [
                row.app,
                row.setup,
                repr(row.latency_ms),
                repr(row.cost_traditional_pmi),
                repr(row.cost_instance_pmi),
                row.invocations,
                row.cold_starts,
            ]
        )
        count += 1
    return count


def read_results_csv(stream: io.TextIOBase) -> list[RunRow]:
    reader = csv.DictReader(stream)
    if reader.fieldnames is None or tuple(reader.fieldnames) != RESULT_COLUMNS:
        raise ValueError("unrecognized results CSV header")
    rows = []
    for rec in reader:
        rows.append(
            RunRow(
                app=rec["app"],
                setup=rec["setup"],
                latency_ms=float(rec["latency_ms"]),
                cost_traditional_pmi=float(rec["cost_traditional_pmi"]),
                cost_instance_pmi=float(rec["cost_instance_pmi"]),
                invocations=int(rec["invocations"]),
                cold_starts=int(rec["cold_starts"]),
            )
        )
    return rows


def metrics_from_rows(rows: Sequence[RunRow], pricing_id: str) -> list[SetupMetrics]:
    """Project run rows onto one pricing model's metrics."""
    if pricing_id == "traditional":
        return [
            SetupMetrics(r.setup, r.latency_ms, r.cost_traditional_pmi) for r in rows
        ]
    if pricing_id == "instance_based":
        return [
            SetupMetrics(r.setup, r.latency_ms, r.cost_instance_pmi) for r in rows
        ]
    raise ValueError(f"unknown pricing id {pricing_id!r}")
