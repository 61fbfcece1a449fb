from __future__ import annotations

import pytest
from hypothesis import strategies as st

from fuseplan.app import AppGraph, CallEdge, CallMode, Task, validate_app
from fuseplan.fusion import DEFAULT_LEVELS, parse_full_setup_name
from fuseplan.sim import ColdPolicy, PlatformModel


def two_task_app(mode: CallMode) -> AppGraph:
    return validate_app(
        AppGraph(
            "S2",
            (Task("A", 100.0), Task("B", 100.0)),
            (CallEdge("A", "B", mode, 0),),
            "A",
        )
    )


@pytest.fixture
def s2_sync() -> AppGraph:
    return two_task_app(CallMode.SYNC)


@pytest.fixture
def s2_async() -> AppGraph:
    return two_task_app(CallMode.ASYNC)


@pytest.fixture
def overhead_model() -> PlatformModel:
    """A platform with visible network and cold-start delays."""
    return PlatformModel(
        net_oneway_ms=5.0,
        cold_start_ms=100.0,
        cold_policy=ColdPolicy.ALWAYS_COLD,
        billing_quantum_ms=1.0,
    )


@pytest.fixture
def zero_model() -> PlatformModel:
    return PlatformModel()


def setup_of(app: AppGraph, name: str):
    return parse_full_setup_name(app, name, DEFAULT_LEVELS)


@st.composite
def call_trees(draw) -> AppGraph:
    """Random small call trees with mixed modes and positive work."""
    n = draw(st.integers(min_value=1, max_value=6))
    names = [chr(ord("A") + i) for i in range(n)]
    tasks = tuple(
        Task(name, draw(st.floats(min_value=1.0, max_value=500.0)))
        for name in names
    )
    edges = []
    per_caller: dict[str, int] = {}
    for i in range(1, n):
        caller = names[draw(st.integers(min_value=0, max_value=i - 1))]
        mode = draw(st.sampled_from([CallMode.SYNC, CallMode.ASYNC]))
        order = per_caller.get(caller, 0)
        per_caller[caller] = order + 1
        edges.append(CallEdge(caller, names[i], mode, order))
    return validate_app(AppGraph("random", tasks, tuple(edges), "A"))
