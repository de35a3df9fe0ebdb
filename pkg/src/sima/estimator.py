"""Workload arithmetic for planning a production run.

Multipliers come from observed effort on past projects: recording runs at
1.8x the final runtime, polishing a transcript by hand costs 1.5x the raw
recording, sourcing B-roll costs six minutes per narrated minute, editing
costs 2.5x narrated time when assets are ready (3.0x otherwise), and each
transition graphic takes five minutes to produce.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from enum import Enum


class DomainError(ValueError):
    """An estimator input outside its meaningful domain."""


class PlanError(ValueError):
    """A pipeline plan that is internally inconsistent."""


class Role(Enum):
    HUMAN = "human"
    JUNIOR_AGENT = "junior_agent"
    SENIOR_AGENT = "senior_agent"


def _require_positive(value: float, name: str) -> None:
    if value <= 0:
        raise DomainError(f"{name} must be positive, got {value}")


def estimate_recording(runtime_hours: float) -> float:
    """Hours at the microphone for a given final runtime (1.8x).

    Scaled-integer arithmetic so decimal inputs yield exact decimal
    results (1.5 -> 2.7, not 2.7000...0004).
    """
    _require_positive(runtime_hours, "runtime_hours")
    return runtime_hours * 18 / 10


def estimate_polishing_manual(runtime_hours: float) -> float:
    """Hours to polish the raw recording by hand (1.5x the 1.8x raw footage)."""
    _require_positive(runtime_hours, "runtime_hours")
    return runtime_hours * 18 * 15 / 100


def estimate_sourcing(narration_minutes: float) -> float:
    """Minutes to source and annotate B-roll for a stretch of narration (6x)."""
    _require_positive(narration_minutes, "narration_minutes")
    return narration_minutes * 6.0


def estimate_editing(narration_minutes: float, broll_ready: bool) -> float:
    """Minutes of editing per narrated minute: 2.5x with assets ready, 3.0x without."""
    _require_positive(narration_minutes, "narration_minutes")
    return narration_minutes * (2.5 if broll_ready else 3.0)


def estimate_transitions(part_count: int) -> float:
    """Minutes to produce the transition graphics: five per part from part 2 on."""
    if part_count < 2:
        raise DomainError(f"part_count must be at least 2, got {part_count}")
    return 5.0 * (part_count - 1)


@dataclass(frozen=True)
class SplitRange:
    id: str
    first_part: int
    last_part: int

    @property
    def part_count(self) -> int:
        return self.last_part - self.first_part + 1

    def parts(self) -> range:
        return range(self.first_part, self.last_part + 1)


def split_label(position: int) -> str:
    if position < 26:
        return string.ascii_uppercase[position]
    return f"S{position + 1}"


def plan_splits(part_count: int, split_count: int) -> list[SplitRange]:
    """Partition parts 1..part_count into contiguous splits, as equal as possible.

    Larger splits come first: (16, 3) -> 1-6, 7-11, 12-16.
    """
    if part_count < 1:
        raise DomainError(f"part_count must be at least 1, got {part_count}")
    if not 1 <= split_count <= part_count:
        raise DomainError(
            f"split_count must be between 1 and part_count, got {split_count} for {part_count}"
        )
    base, extra = divmod(part_count, split_count)
    ranges: list[SplitRange] = []
    first = 1
    for i in range(split_count):
        size = base + (1 if i < extra else 0)
        ranges.append(SplitRange(split_label(i), first, first + size - 1))
        first += size
    return ranges


@dataclass
class PipelinePlan:
    """Inputs for a full-pipeline estimate."""

    final_runtime_hours: float
    part_minutes: list[float]
    split_count: int = 3
    broll_ready: list[bool] | None = None
    senior_agents: int = 3
    finalization_hours: float = 1.0

    @classmethod
    def uniform(
        cls,
        final_runtime_hours: float = 1.5,
        part_count: int = 15,
        split_count: int = 3,
        broll_ready: bool = True,
        senior_agents: int = 3,
        finalization_hours: float = 1.0,
    ) -> PipelinePlan:
        minutes = final_runtime_hours * 60.0 / part_count
        return cls(
            final_runtime_hours,
            [minutes] * part_count,
            split_count,
            [broll_ready] * part_count,
            senior_agents,
            finalization_hours,
        )

    @property
    def part_count(self) -> int:
        return len(self.part_minutes)

    def validate(self) -> None:
        if self.part_count < 1:
            raise PlanError("a plan needs at least one part")
        if any(m <= 0 for m in self.part_minutes):
            raise PlanError("every part needs positive narration minutes")
        if abs(sum(self.part_minutes) - self.final_runtime_hours * 60.0) > 1e-6:
            raise PlanError("part minutes must sum to the final runtime")
        if self.broll_ready is not None and len(self.broll_ready) != self.part_count:
            raise PlanError("broll_ready must list one flag per part")
        if self.senior_agents < 1:
            raise PlanError("senior_agents must be at least 1")
        if self.finalization_hours < 0:
            raise PlanError("finalization_hours may not be negative")
        if not 1 <= self.split_count <= self.part_count:
            raise PlanError("split_count must be between 1 and the part count")


@dataclass(frozen=True)
class StepEstimate:
    step: int
    name: str
    role: Role
    hours: float
    note: str = ""


@dataclass
class WorkloadEstimate:
    steps: list[StepEstimate]
    role_hours: dict[Role, float]
    senior_wall_hours: float
    wall_clock_hours: float
    split_assignments: list[tuple[str, int]] = field(default_factory=list)

    @property
    def human_hours(self) -> float:
        return self.role_hours[Role.HUMAN]


def estimate_pipeline(plan: PipelinePlan) -> WorkloadEstimate:
    """Roll a plan up into per-step, per-role, and wall-clock figures.

    Human time covers recording, sourcing, transition graphics, and the
    finalization allowance. The junior agent's polishing row carries the
    manual baseline it replaces (saved human time, not added to the wall
    clock). Senior editing divides across agents by whole splits; the
    wall-clock figure is human hours plus the longest senior assignment.
    """
    plan.validate()
    ready = plan.broll_ready if plan.broll_ready is not None else [True] * plan.part_count

    recording = estimate_recording(plan.final_runtime_hours)
    polishing = estimate_polishing_manual(plan.final_runtime_hours)
    sourcing = sum(estimate_sourcing(m) for m in plan.part_minutes) / 60.0
    if plan.part_count >= 2:
        transitions = estimate_transitions(plan.part_count) / 60.0
    else:
        transitions = 0.0
    editing_minutes = [
        estimate_editing(m, flag) for m, flag in zip(plan.part_minutes, ready)
    ]
    editing = sum(editing_minutes) / 60.0

    splits = plan_splits(plan.part_count, plan.split_count)
    split_minutes = [
        sum(editing_minutes[p - 1] for p in rng.parts()) for rng in splits
    ]
    loads = [0.0] * plan.senior_agents
    assignments: list[tuple[str, int]] = []
    for rng, minutes in zip(splits, split_minutes):
        agent = min(range(plan.senior_agents), key=lambda a: (loads[a], a))
        loads[agent] += minutes
        assignments.append((rng.id, agent))
    senior_wall = max(loads) / 60.0

    steps = [
        StepEstimate(1, "Topic selection", Role.HUMAN, 0.0, "not modeled"),
        StepEstimate(2, "Research", Role.HUMAN, 0.0, "not modeled"),
        StepEstimate(3, "Script writing", Role.HUMAN, 0.0, "not modeled"),
        StepEstimate(4, "Recording", Role.HUMAN, recording, "1.8x final runtime"),
        StepEstimate(
            5,
            "Caption polishing",
            Role.JUNIOR_AGENT,
            polishing,
            "manual baseline, delegated; counts as saved human time",
        ),
        StepEstimate(6, "Image sourcing", Role.HUMAN, 0.0, "included in the sourcing total"),
        StepEstimate(7, "B-roll sourcing and annotation", Role.HUMAN, sourcing, "6x narrated time"),
        StepEstimate(8, "Asset collection", Role.JUNIOR_AGENT, 0.0, "agent-run; no human time"),
        StepEstimate(
            9,
            "Editing",
            Role.SENIOR_AGENT,
            editing,
            "2.5x narrated time when assets are ready, 3.0x otherwise",
        ),
        StepEstimate(10, "Transition graphics", Role.HUMAN, transitions, "5 min per graphic"),
        StepEstimate(
            11, "Finalization", Role.HUMAN, plan.finalization_hours, "configurable allowance"
        ),
        StepEstimate(12, "Caption export", Role.HUMAN, 0.0, "agent-run; no human time"),
    ]

    role_hours = {role: 0.0 for role in Role}
    for step in steps:
        role_hours[step.role] += step.hours
    wall_clock = role_hours[Role.HUMAN] + senior_wall
    return WorkloadEstimate(steps, role_hours, senior_wall, wall_clock, assignments)
