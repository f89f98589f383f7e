"""Plans: named threads of guarded steps, executed one turn at a time.

A plan interleaves several step sequences against one shared equilibrium.
Each turn a strategy picks one ready thread (its next guard holds) and runs
exactly one step. A plan with no ready thread but unfinished work is
deadlocked; deadlock halts. interleavings_oracle enumerates every legal
interleaving of a small plan and returns the set of distinct final
snapshots, which is the reference the engine is checked against.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, replace

from .canon import canonical_equilibrium
from .errors import InvalidStatus, StepPreconditionFailed, TooLarge
from .model import SourcingEquilibrium
from .steps import TransformationScope, apply_step, step_kind


@dataclass(frozen=True)
class EntityExists:
    entity: str


@dataclass(frozen=True)
class TitleAtLevel:
    source: str
    level: int


@dataclass(frozen=True)
class ContractPresent:
    contract: str


def guard_holds(guard, eq: SourcingEquilibrium) -> bool:
    if guard is None:
        return True
    if isinstance(guard, EntityExists):
        e = guard.entity
        return (e in eq.units or e in eq.subunits or e in eq.sources
                or e in eq.service_edges or e in eq.contracts)
    if isinstance(guard, TitleAtLevel):
        title = eq.titles.get(guard.source)
        return title is not None and title.level == guard.level
    if isinstance(guard, ContractPresent):
        return guard.contract in eq.contracts
    raise TypeError(f"not a guard: {guard!r}")


@dataclass(frozen=True)
class GuardedStep:
    step: object
    guard: object = None


@dataclass(frozen=True)
class Plan:
    id: str
    threads: dict
    scope: TransformationScope | None = None
    #: Path of the equilibrium document this plan runs against, when declared.
    equilibrium_ref: str | None = None

    def __post_init__(self):
        if not self.threads:
            raise ValueError(f"plan {self.id!r} declares no threads")
        for name, steps in self.threads.items():
            if not steps:
                raise ValueError(f"plan {self.id!r}: thread {name!r} is empty")

    @property
    def total_steps(self) -> int:
        return sum(len(steps) for steps in self.threads.values())


class Status(enum.Enum):
    AHEAD = "Ahead"
    IN_PROGRESS = "InProgress"
    INTERRUPTED = "Interrupted"
    DORMANT = "Dormant"
    COMPLETED = "Completed"
    HALTED = "Halted"


#: Statuses a scheduler may drive forward.
SCHEDULABLE = (Status.AHEAD, Status.IN_PROGRESS, Status.INTERRUPTED,
               Status.DORMANT)


@dataclass(frozen=True)
class TurnRecord:
    turn: int
    thread: str
    step_index: int
    kind: str
    outcome: str
    logical_time: int


@dataclass(frozen=True)
class HaltInfo:
    reason: str
    thread: str | None = None
    step_index: int | None = None


@dataclass(frozen=True)
class ExecutionState:
    status: Status
    cursors: dict
    trace: tuple = ()
    turn: int = 0
    rotation: int = 0
    halt: HaltInfo | None = None

    def with_status(self, status: Status) -> "ExecutionState":
        """Caller-driven lifecycle moves (interrupt, put dormant, resume)."""
        if self.status in (Status.COMPLETED, Status.HALTED):
            raise InvalidStatus(f"execution already {self.status.value}")
        if status in (Status.COMPLETED, Status.HALTED, Status.AHEAD):
            raise InvalidStatus(f"cannot move to {status.value} by hand")
        return replace(self, status=status)

    @property
    def finished(self) -> bool:
        return self.status in (Status.COMPLETED, Status.HALTED)


def initial_state(plan: Plan) -> ExecutionState:
    return ExecutionState(status=Status.AHEAD,
                          cursors={name: 0 for name in plan.threads})


class RoundRobin:
    """Cycle through threads in declaration order, skipping unready ones."""

    name = "round-robin"

    def choose(self, ready: list, order: list, state: ExecutionState):
        n = len(order)
        for offset in range(n):
            candidate = order[(state.rotation + offset) % n]
            if candidate in ready:
                return candidate, (order.index(candidate) + 1) % n
        raise AssertionError("choose called with no ready thread")


class SeededRandom:
    """Uniform choice among ready threads, reproducible from a 64-bit seed."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.name = f"random({self.seed})"

    def choose(self, ready: list, order: list, state: ExecutionState):
        rng = random.Random(f"{self.seed}:{state.turn}")
        return rng.choice(ready), state.rotation


def _ready_threads(eq: SourcingEquilibrium, plan: Plan, cursors: dict) -> list:
    ready = []
    for name, steps in plan.threads.items():
        cursor = cursors[name]
        if cursor >= len(steps):
            continue
        if guard_holds(steps[cursor].guard, eq):
            ready.append(name)
    return ready


def step_once(eq: SourcingEquilibrium, plan: Plan, state: ExecutionState,
              strategy) -> tuple:
    """One scheduling turn: pick a ready thread, run its next step.

    Returns (new equilibrium, new state). The equilibrium is unchanged on
    deadlock and on step failure (the last consistent snapshot survives).
    """
    if state.status not in SCHEDULABLE:
        raise InvalidStatus(f"cannot schedule from status {state.status.value}")
    order = list(plan.threads)
    ready = _ready_threads(eq, plan, state.cursors)
    if not ready:
        halt = HaltInfo(reason="deadlock: no thread is ready")
        return eq, replace(state, status=Status.HALTED, halt=halt)
    thread, rotation = strategy.choose(ready, order, state)
    cursor = state.cursors[thread]
    gstep = plan.threads[thread][cursor]
    index = cursor + 1
    try:
        new_eq = apply_step(eq, gstep.step)
    except StepPreconditionFailed as exc:
        record = TurnRecord(state.turn + 1, thread, index, step_kind(gstep.step),
                            f"failed: {exc.reason}", eq.logical_time)
        halt = HaltInfo(reason=exc.reason, thread=thread, step_index=index)
        return eq, replace(state, status=Status.HALTED, halt=halt,
                           trace=state.trace + (record,), turn=state.turn + 1)
    record = TurnRecord(state.turn + 1, thread, index, step_kind(gstep.step),
                        "applied", new_eq.logical_time)
    cursors = {**state.cursors, thread: cursor + 1}
    exhausted = all(cursors[name] >= len(steps)
                    for name, steps in plan.threads.items())
    status = Status.COMPLETED if exhausted else Status.IN_PROGRESS
    new_state = replace(state, status=status, cursors=cursors,
                        trace=state.trace + (record,), turn=state.turn + 1,
                        rotation=rotation)
    return new_eq, new_state


def execute(eq: SourcingEquilibrium, plan: Plan, strategy) -> tuple:
    """Drive a plan to Completed or Halted; returns (equilibrium, state)."""
    state = initial_state(plan)
    current = eq
    while not state.finished:
        current, state = step_once(current, plan, state, strategy)
    return current, state


#: interleavings_oracle refuses plans beyond this many steps in total.
ORACLE_STEP_BUDGET = 12


def interleavings_oracle(eq: SourcingEquilibrium, plan: Plan) -> frozenset:
    """Every legal interleaving's final snapshot, canonically serialized.

    Explores the full scheduling tree (respecting per-thread order and
    guards); paths that deadlock or hit a failing step end at their last
    consistent snapshot, exactly as the engine would. Raises TooLarge beyond
    ORACLE_STEP_BUDGET total steps.
    """
    if plan.total_steps > ORACLE_STEP_BUDGET:
        raise TooLarge(
            f"plan has {plan.total_steps} steps; the oracle explores at most "
            f"{ORACLE_STEP_BUDGET}")
    order = list(plan.threads)
    finals: set = set()
    seen: set = set()

    def explore(current: SourcingEquilibrium, cursors: tuple):
        snapshot = canonical_equilibrium(current)
        key = (cursors, snapshot)
        if key in seen:
            return
        seen.add(key)
        cursor_map = dict(zip(order, cursors))
        ready = _ready_threads(current, plan, cursor_map)
        if not ready:
            finals.add(snapshot)
            return
        for thread in ready:
            gstep = plan.threads[thread][cursor_map[thread]]
            try:
                next_eq = apply_step(current, gstep.step)
            except StepPreconditionFailed:
                finals.add(snapshot)
                continue
            position = order.index(thread)
            next_cursors = tuple(
                c + 1 if i == position else c for i, c in enumerate(cursors))
            explore(next_eq, next_cursors)

    explore(eq, tuple(0 for _ in order))
    return frozenset(finals)
