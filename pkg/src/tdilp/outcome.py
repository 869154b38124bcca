"""Solve outcome record shared by the solver, the oracles and the CLI."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
BOUND_EXHAUSTED = "bound_exhausted"

_STATUSES = (OPTIMAL, INFEASIBLE, UNBOUNDED, BOUND_EXHAUSTED)


@dataclass(frozen=True)
class SolveOutcome:
    """Result of an exact solve.

    ``value`` and ``assignment`` (variable id -> value) are populated only
    for ``optimal``.  ``kernel_vars`` / ``original_vars`` report how many
    variables the search actually ran on versus how many came in.
    """

    status: str
    value: int | None = None
    assignment: dict[int, int] | None = None
    kernel_vars: int | None = None
    original_vars: int | None = None

    def __post_init__(self):
        if self.status not in _STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == OPTIMAL:
            if self.value is None or self.assignment is None:
                raise ValueError("optimal outcome needs value and assignment")
        elif self.assignment is not None or self.value is not None:
            raise ValueError(f"{self.status} outcome must not carry a solution")

    @staticmethod
    def optimal(value: int, assignment: Mapping[int, int], **meta) -> "SolveOutcome":
        return SolveOutcome(OPTIMAL, value, dict(assignment), **meta)

    @staticmethod
    def infeasible(**meta) -> "SolveOutcome":
        return SolveOutcome(INFEASIBLE, **meta)

    @staticmethod
    def unbounded(**meta) -> "SolveOutcome":
        return SolveOutcome(UNBOUNDED, **meta)

    @staticmethod
    def bound_exhausted(**meta) -> "SolveOutcome":
        return SolveOutcome(BOUND_EXHAUSTED, **meta)

    def is_optimal(self) -> bool:
        return self.status == OPTIMAL

    def with_counts(self, kernel_vars: int, original_vars: int) -> "SolveOutcome":
        return SolveOutcome(self.status, self.value, self.assignment, kernel_vars, original_vars)

    def to_json(self, name_of=None) -> str:
        """Render for the CLI; ``name_of`` maps variable ids to names."""
        doc: dict = {"status": self.status, "value": self.value}
        if self.assignment is None:
            doc["assignment"] = None
        else:
            if name_of is None:
                doc["assignment"] = {str(k): v for k, v in sorted(self.assignment.items())}
            else:
                doc["assignment"] = {
                    name_of(k): v for k, v in sorted(self.assignment.items())
                }
        if self.kernel_vars is not None:
            doc["kernel_vars"] = self.kernel_vars
        if self.original_vars is not None:
            doc["original_vars"] = self.original_vars
        return json.dumps(doc, indent=2, sort_keys=False)
