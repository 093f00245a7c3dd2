"""Patch records: ordered AST edits plus diff rendering, provenance, and a
one-way lifecycle (candidate -> plausible -> pending_review -> approved ->
merged, or rejected from review)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Tuple

from .edits import AstEdit

CANDIDATE = "candidate"
PLAUSIBLE = "plausible"
PENDING_REVIEW = "pending_review"
APPROVED = "approved"
REJECTED = "rejected"
MERGED = "merged"

_TRANSITIONS = {
    CANDIDATE: {PLAUSIBLE},
    PLAUSIBLE: {PENDING_REVIEW},
    PENDING_REVIEW: {APPROVED, REJECTED},
    APPROVED: {MERGED},
    REJECTED: set(),
    MERGED: set(),
}


class LifecycleError(Exception):
    pass


@dataclass
class Patch:
    patch_id: str
    project_id: str
    base_commit: str
    build_id: str
    edits: Tuple[AstEdit, ...]
    diff: str
    operator: str
    suspiciousness: float
    candidate_index: int
    found_at: float              # logical minutes, fractional within the stage
    status: str = CANDIDATE
    overfitting: Optional[bool] = None   # None until held-out tests are run
    report_summary: Optional[dict] = None
    pr_id: Optional[str] = None          # set when approval opens a pull request

    def advance(self, new_status: str) -> None:
        if new_status not in _TRANSITIONS.get(self.status, set()):
            raise LifecycleError(f"patch {self.patch_id}: {self.status} -> {new_status}")
        self.status = new_status

    def to_dict(self) -> dict:
        return {
            "patch_id": self.patch_id,
            "project_id": self.project_id,
            "base_commit": self.base_commit,
            "build_id": self.build_id,
            "edits": [e.to_dict() for e in self.edits],
            "operator": self.operator,
            "suspiciousness": self.suspiciousness,
            "candidate_index": self.candidate_index,
            "found_at": self.found_at,
            "status": self.status,
            "overfitting": self.overfitting,
            "report": self.report_summary,
            "pr_id": self.pr_id,
        }

    @staticmethod
    def from_dict(data: dict, diff: str = "") -> "Patch":
        return Patch(
            patch_id=data["patch_id"],
            project_id=data["project_id"],
            base_commit=data["base_commit"],
            build_id=data["build_id"],
            edits=tuple(AstEdit.from_dict(e) for e in data["edits"]),
            diff=diff,
            operator=data["operator"],
            suspiciousness=data["suspiciousness"],
            candidate_index=data["candidate_index"],
            found_at=data["found_at"],
            status=data["status"],
            overfitting=data.get("overfitting"),
            report_summary=data.get("report"),
            pr_id=data.get("pr_id"),
        )

    def write_files(self, patches_dir) -> None:
        """Write <id>.diff and <id>.json under the patches directory."""
        patches_dir.mkdir(parents=True, exist_ok=True)
        (patches_dir / f"{self.patch_id}.diff").write_text(self.diff)
        (patches_dir / f"{self.patch_id}.json").write_text(
            json.dumps(self.to_dict(), indent=2) + "\n")
