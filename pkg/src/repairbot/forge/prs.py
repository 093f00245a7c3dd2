"""Pull requests: proposed diffs sitting in a per-forge inbox."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

OPEN = "open"
MERGED = "merged"
REJECTED = "rejected"


class PullRequestError(Exception):
    pass


@dataclass
class PullRequest:
    pr_id: str
    project_id: str
    base_commit: str
    diff: str
    message: str
    opened_at: int
    decision: str = OPEN
    decided_at: Optional[int] = None

    def mark(self, decision: str, at: int) -> None:
        if self.decision != OPEN:
            raise PullRequestError(
                f"pull request {self.pr_id} already {self.decision}")
        if decision not in (MERGED, REJECTED):
            raise PullRequestError(f"invalid decision {decision!r}")
        self.decision = decision
        self.decided_at = at

    def to_dict(self) -> dict:
        return {
            "pr_id": self.pr_id,
            "project_id": self.project_id,
            "base_commit": self.base_commit,
            "diff": self.diff,
            "message": self.message,
            "opened_at": self.opened_at,
            "decision": self.decision,
            "decided_at": self.decided_at,
        }

    @staticmethod
    def from_dict(data: dict) -> "PullRequest":
        return PullRequest(**data)
