"""Deterministic single-request simulation of a fusion setup.

Timing rules, applied with one logical clock per request:

* The client dispatches the root invocation at t=0. Every remote invocation
  spends ``net_oneway_ms`` in transit, then the cold delay if the instance is
  cold (unbilled), then execution starts.
* A task runs its scaled compute first, then issues its calls in edge order.
* A synchronous call inside the group runs inline on the same instance.
* A synchronous call to another group spawns a fresh instance; the caller
  blocks for the round trip plus cold delay plus the callee's handler time,
  and that wait stays on the caller's bill (double billing). The response is
  sent when the callee's call chain returns; queued local work may keep the
  callee instance busy (and billed) afterwards.
* An asynchronous call to another group is delivered after one network hop;
  the caller continues immediately.
* An asynchronous call inside the group is appended to the instance's FIFO
  queue and runs after the current call chain (and earlier queue entries)
  finish. The instance bills until the queue drains.
* Billed time per instance spans execution start to completion, rounded up
  to the billing quantum. Cold delay and network transit are never billed.

Instances never block each other except through these rules, so results are
pure functions of (app, setup, model) and identical across repeated runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .app import AppGraph, CallMode, Task
from .fusion import FusionSetup, group_name


class SimulationError(ValueError):
    """Raised when a setup does not match the application."""


class ColdPolicy(str, Enum):
    ALWAYS_COLD = "always_cold"
    ALWAYS_WARM = "always_warm"


@dataclass(frozen=True)
class PlatformModel:
    """Network, cold-start, and billing parameters of the simulated platform.

    The defaults describe an idealized zero-overhead platform; pass explicit
    values to study network and cold-start effects.
    """

    net_oneway_ms: float = 0.0
    cold_start_ms: float = 0.0
    cold_policy: ColdPolicy = ColdPolicy.ALWAYS_COLD
    billing_quantum_ms: float = 1.0

    def __post_init__(self) -> None:
        if self.net_oneway_ms < 0 or self.cold_start_ms < 0:
            raise SimulationError("network and cold-start delays must be >= 0")
        if not (self.billing_quantum_ms > 0):
            raise SimulationError("billing quantum must be positive")

    @property
    def cold_delay_ms(self) -> float:
        # always_warm applies a zero delay regardless of cold_start_ms.
        if self.cold_policy is ColdPolicy.ALWAYS_WARM:
            return 0.0
        return self.cold_start_ms


def task_duration(task: Task, cpu: float) -> float:
    """Scaled compute time in ms: base work divided by the cpu fraction."""
    if not (cpu > 0):
        raise SimulationError("cpu must be positive")
    return task.base_work_ms / cpu


@dataclass(frozen=True)
class InvocationRecord:
    group: str
    instance_id: int
    start_ms: float
    end_ms: float
    billed_ms: float
    cold: bool


@dataclass(frozen=True)
class TraceEvent:
    time_ms: float
    seq: int
    kind: str
    instance_id: int
    task: str


@dataclass(frozen=True)
class SimResult:
    latency_ms: float
    invocations: tuple[InvocationRecord, ...]
    trace: tuple[TraceEvent, ...]

    @property
    def remote_calls(self) -> int:
        return len(self.invocations)

    @property
    def total_billed_ms(self) -> float:
        return sum(r.billed_ms for r in self.invocations)

    def to_dict(self) -> dict:
        return {
            "latency_ms": self.latency_ms,
            "remote_calls": self.remote_calls,
            "invocations": [
                {
                    "group": r.group,
                    "instance_id": r.instance_id,
                    "start_ms": r.start_ms,
                    "end_ms": r.end_ms,
                    "billed_ms": r.billed_ms,
                    "cold": r.cold,
                }
                for r in self.invocations
            ],
            "trace": [
                {
                    "time_ms": e.time_ms,
                    "seq": e.seq,
                    "kind": e.kind,
                    "instance_id": e.instance_id,
                    "task": e.task,
                }
                for e in self.trace
            ],
        }


def _round_up(value: float, quantum: float) -> float:
    # The epsilon absorbs float noise so exact multiples are not bumped up.
    return math.ceil(value / quantum - 1e-9) * quantum


@dataclass
class _Run:
    app: AppGraph
    setup: FusionSetup
    model: PlatformModel
    group_of: dict[str, int]
    records: list[InvocationRecord] = field(default_factory=list)
    events: list[TraceEvent] = field(default_factory=list)
    next_instance: int = 0
    next_seq: int = 0

    def log(self, time_ms: float, kind: str, instance_id: int, task: str) -> None:
        self.events.append(TraceEvent(time_ms, self.next_seq, kind, instance_id, task))
        self.next_seq += 1

    def spawn(self, entry: str, issue_time: float) -> tuple[float, float]:
        """Run a fresh instance for ``entry``; return (response, completion).

        The response time is when the entry task's call chain returns; the
        completion time includes draining the local async queue.
        """
        instance_id = self.next_instance
        self.next_instance += 1
        gidx = self.group_of[entry]
        cfg = self.setup.config_of(gidx)
        cold = self.model.cold_policy is ColdPolicy.ALWAYS_COLD
        start = issue_time + self.model.net_oneway_ms + self.model.cold_delay_ms
        self.log(start, "exec_start", instance_id, entry)

        queue: list[str] = []
        response = self.run_chain(entry, start, instance_id, gidx, cfg.cpu, queue)
        t = response
        while queue:
            t = self.run_chain(queue.pop(0), t, instance_id, gidx, cfg.cpu, queue)
        self.log(t, "instance_end", instance_id, entry)

        billed = _round_up(t - start, self.model.billing_quantum_ms)
        self.records.append(
            InvocationRecord(
                group=group_name(self.setup.partition.groups[gidx]),
                instance_id=instance_id,
                start_ms=start,
                end_ms=t,
                billed_ms=billed,
                cold=cold,
            )
        )
        return response, t

    def run_chain(
        self,
        task_name: str,
        t: float,
        instance_id: int,
        gidx: int,
        cpu: float,
        queue: list[str],
    ) -> float:
        task = self.app.task(task_name)
        self.log(t, "task_start", instance_id, task_name)
        t += task_duration(task, cpu)
        self.log(t, "task_end", instance_id, task_name)
        for edge in self.app.outgoing(task_name):
            local = self.group_of[edge.callee] == gidx
            if edge.mode is CallMode.SYNC:
                if local:
                    t = self.run_chain(edge.callee, t, instance_id, gidx, cpu, queue)
                else:
                    self.log(t, "call_sync", instance_id, edge.callee)
                    response, _ = self.spawn(edge.callee, t)
                    t = response + self.model.net_oneway_ms
            else:
                if local:
                    self.log(t, "enqueue_local", instance_id, edge.callee)
                    queue.append(edge.callee)
                else:
                    self.log(t, "call_async", instance_id, edge.callee)
                    self.spawn(edge.callee, t)
        return t


def simulate(app: AppGraph, setup: FusionSetup, model: PlatformModel) -> SimResult:
    """Simulate one request under ``setup`` and return its full timeline."""
    covered = frozenset().union(*setup.partition.groups)
    if covered != frozenset(app.task_names()):
        raise SimulationError("setup partition does not cover the app's tasks")
    group_of = {
        name: idx
        for idx, group in enumerate(setup.partition.groups)
        for name in group
    }
    run = _Run(app, setup, model, group_of)
    run.log(0.0, "dispatch", -1, app.root)
    run.spawn(app.root, 0.0)
    latency = max(r.end_ms for r in run.records)
    trace = tuple(sorted(run.events, key=lambda e: (e.time_ms, e.seq)))
    records = tuple(sorted(run.records, key=lambda r: r.instance_id))
    return SimResult(latency_ms=latency, invocations=records, trace=trace)
