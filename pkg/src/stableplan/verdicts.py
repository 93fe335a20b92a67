"""Verdict records returned by the verifiers and synthesizers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .model import Configuration, JointOpenPlan, Trajectory


@dataclass(frozen=True)
class Counterexample:
    """An undetected, goal-avoiding run by ``deviator``.

    ``actions`` are the joint actions actually played from ``start``;
    ``witness`` is the initial configuration whose honest run the detector
    believes it is observing (equal to ``start`` under complete information).
    """

    deviator: int
    start: Configuration
    actions: tuple
    trajectory: Trajectory
    witness: Optional[Configuration] = None
    deviation_time: Optional[int] = None
    crash_time: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "deviator": self.deviator,
            "start": list(self.start),
            "witness": None if self.witness is None else list(self.witness),
            "deviation_time": self.deviation_time,
            "crash_time": self.crash_time,
            "actions": [list(a) for a in self.actions],
            "configs": [list(c) for c in self.trajectory.configs],
        }


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    direction: Optional[int] = None  # deviating agent of the first failure
    reason: Optional[str] = None
    counterexample: Optional[Counterexample] = None
    checked: int = 0  # scenarios or sequences examined, where meaningful

    @property
    def token(self) -> str:
        return "STABLE" if self.stable else "UNSTABLE"

    def __bool__(self):
        return self.stable

    def to_dict(self) -> dict:
        return {
            "stable": self.stable,
            "direction": self.direction,
            "reason": self.reason,
            "counterexample": None if self.counterexample is None else self.counterexample.to_dict(),
            "checked": self.checked,
        }


FOUND = "FOUND"
NOT_FOUND = "NOT_FOUND"
BUDGET_EXCEEDED = "BUDGET_EXCEEDED"


@dataclass(frozen=True)
class SynthResult:
    status: str
    plan: Optional[JointOpenPlan] = None
    nodes: int = 0
    stats: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status == FOUND

    @property
    def token(self) -> str:
        return self.status
