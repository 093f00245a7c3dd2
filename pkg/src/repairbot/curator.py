"""Patch lifecycle management and research-data collection.

The curator owns the human review queue, turns approvals into pull
requests on the forge, simulates the maintainer merge after a fixed
delay, appends one record per repair attempt to ``attempts.jsonl`` (the
single source of truth for every aggregate statistic), and computes
bot-vs-human race outcomes.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from .forge.core import Forge
from .repair.patches import (
    APPROVED,
    MERGED,
    PENDING_REVIEW,
    PLAUSIBLE,
    REJECTED,
    Patch,
)

logger = logging.getLogger(__name__)

DEFAULT_REVIEW_LATENCY = 17   # patch in hand -> human validates the PR
DEFAULT_MERGE_DELAY = 35      # PR opened -> maintainer merges

NO_FAILURE = "no_failure"
NOT_REPRODUCED = "not_reproduced"
NO_PATCH = "no_patch"
PATCH_PENDING = "patch_pending"
PATCH_DECIDED = "patch_decided"

TERMINAL_STATES = (NO_FAILURE, NOT_REPRODUCED, NO_PATCH, PATCH_PENDING, PATCH_DECIDED)

# Wall-clock fields are excluded from determinism comparisons.
WALL_CLOCK_FIELDS = ("wall_ms",)


class DuplicateEnqueue(Exception):
    pass


class NotPlausible(Exception):
    pass


class UnknownPatch(Exception):
    pass


class AlreadyDecided(Exception):
    pass


class MissingHumanFixEvent(Exception):
    pass


class AttemptLogError(Exception):
    pass


@dataclass
class RepairAttempt:
    attempt_id: str
    build_id: str
    project_id: str
    classification: str
    failing_tests: List[str] = field(default_factory=list)
    reproduction: Optional[str] = None
    local_failing_tests: List[str] = field(default_factory=list)
    candidates_tried: int = 0
    plausible: int = 0
    patch_ids: List[str] = field(default_factory=list)
    top_patch: Optional[str] = None
    overfitting_patch_ids: List[str] = field(default_factory=list)
    detect_latency: int = 0
    reproduce_duration: int = 0
    repair_duration: int = 0
    patch_found_at: Optional[int] = None
    enqueued_at: Optional[int] = None
    decided_at: Optional[int] = None
    decision: Optional[str] = None      # approved | rejected
    pr_id: Optional[str] = None
    pr_opened_at: Optional[int] = None
    merged_at: Optional[int] = None
    human_fix_at: Optional[int] = None
    human_competitive: Optional[bool] = None
    terminal: str = NO_FAILURE
    wall_ms: float = 0.0

    def to_dict(self) -> dict:
        return {
            "kind": "attempt",
            "attempt_id": self.attempt_id,
            "build_id": self.build_id,
            "project_id": self.project_id,
            "classification": self.classification,
            "failing_tests": self.failing_tests,
            "reproduction": self.reproduction,
            "local_failing_tests": self.local_failing_tests,
            "candidates_tried": self.candidates_tried,
            "plausible": self.plausible,
            "patch_ids": self.patch_ids,
            "top_patch": self.top_patch,
            "overfitting_patch_ids": self.overfitting_patch_ids,
            "detect_latency": self.detect_latency,
            "reproduce_duration": self.reproduce_duration,
            "repair_duration": self.repair_duration,
            "patch_found_at": self.patch_found_at,
            "enqueued_at": self.enqueued_at,
            "decided_at": self.decided_at,
            "decision": self.decision,
            "pr_id": self.pr_id,
            "pr_opened_at": self.pr_opened_at,
            "merged_at": self.merged_at,
            "human_fix_at": self.human_fix_at,
            "human_competitive": self.human_competitive,
            "terminal": self.terminal,
            "wall_ms": self.wall_ms,
        }

    @staticmethod
    def from_dict(data: dict) -> "RepairAttempt":
        fields = {k: v for k, v in data.items() if k != "kind"}
        return RepairAttempt(**fields)

    def validate(self) -> None:
        if self.terminal not in TERMINAL_STATES:
            raise AttemptLogError(f"bad terminal state {self.terminal!r}")
        if min(self.detect_latency, self.reproduce_duration, self.repair_duration) < 0:
            raise AttemptLogError("durations must be non-negative")
        if bool(self.patch_ids) != (self.plausible > 0):
            raise AttemptLogError("patch ids present iff at least one plausible patch")


@dataclass(frozen=True)
class RaceOutcome:
    build_id: str
    patch_found_at: int
    pr_opened_at: Optional[int]
    human_fix_at: int
    decision: str            # merged | rejected | open
    human_competitive: bool

    def to_dict(self) -> dict:
        return {
            "build_id": self.build_id,
            "patch_found_at": self.patch_found_at,
            "pr_opened_at": self.pr_opened_at,
            "human_fix_at": self.human_fix_at,
            "decision": self.decision,
            "human_competitive": self.human_competitive,
        }


class Curator:
    def __init__(self, forge: Forge, data_dir,
                 review_latency: int = DEFAULT_REVIEW_LATENCY,
                 merge_delay: int = DEFAULT_MERGE_DELAY):
        self.forge = forge
        self.data_dir = Path(data_dir)
        self.attempts_path = self.data_dir / "attempts.jsonl"
        self.patches_dir = self.data_dir / "patches"
        self.review_latency = review_latency
        self.merge_delay = merge_delay

        self._lock = threading.RLock()
        self._patches: Dict[str, Patch] = {}
        self._queue: List[str] = []           # pending patch ids, found_at order
        self._ever_enqueued: set = set()
        self._attempts: List[RepairAttempt] = []
        self._attempts_by_build: Dict[str, RepairAttempt] = {}
        self._header: Optional[dict] = None
        self._recover_attempt_log()

    # -------------------------------------------------------------- attempts

    def _recover_attempt_log(self) -> None:
        """Load prior attempts; a corrupted trailing partial line (crash mid
        write) is detected, truncated away, and logged."""
        if not self.attempts_path.exists():
            return
        raw = self.attempts_path.read_text()
        good_end = 0
        for line in raw.splitlines(keepends=True):
            stripped = line.strip()
            complete = line.endswith("\n")
            if stripped:
                try:
                    data = json.loads(stripped)
                    if not complete:
                        raise ValueError("no trailing newline")
                except ValueError:
                    logger.warning("attempts.jsonl: truncating corrupted trailing "
                                   "line (%d bytes)", len(line))
                    with open(self.attempts_path, "w") as fh:
                        fh.write(raw[:good_end])
                    return
                if data.get("kind") == "header":
                    self._header = data
                else:
                    attempt = RepairAttempt.from_dict(data)
                    self._attempts.append(attempt)
                    self._attempts_by_build[attempt.build_id] = attempt
            good_end += len(line)

    def write_header(self, config: dict) -> None:
        with self._lock:
            if self._header is not None:
                return
            self._header = {"kind": "header", "config": config}
            self.data_dir.mkdir(parents=True, exist_ok=True)
            with open(self.attempts_path, "a") as fh:
                fh.write(json.dumps(self._header) + "\n")

    def append_attempt(self, attempt: RepairAttempt) -> None:
        attempt.validate()
        with self._lock:
            if attempt.build_id in self._attempts_by_build:
                raise AttemptLogError(f"build {attempt.build_id} already attempted")
            self._attempts.append(attempt)
            self._attempts_by_build[attempt.build_id] = attempt
            self.data_dir.mkdir(parents=True, exist_ok=True)
            with open(self.attempts_path, "a") as fh:
                fh.write(json.dumps(attempt.to_dict()) + "\n")

    def attempts(self) -> List[RepairAttempt]:
        with self._lock:
            return list(self._attempts)

    def attempted_build_ids(self) -> set:
        with self._lock:
            return set(self._attempts_by_build)

    def attempt_for_build(self, build_id: str) -> Optional[RepairAttempt]:
        with self._lock:
            return self._attempts_by_build.get(build_id)

    # --------------------------------------------------------------- patches

    def register_patch(self, patch: Patch) -> None:
        """Track a plausible patch and write its diff + provenance files."""
        with self._lock:
            self._patches[patch.patch_id] = patch
            patch.write_files(self.patches_dir)

    def patch(self, patch_id: str) -> Patch:
        with self._lock:
            patch = self._patches.get(patch_id)
        if patch is None:
            raise UnknownPatch(patch_id)
        return patch

    def enqueue_for_review(self, patch: Patch, at: Optional[int] = None) -> Patch:
        with self._lock:
            if patch.patch_id in self._ever_enqueued:
                raise DuplicateEnqueue(patch.patch_id)
            if patch.status != PLAUSIBLE:
                raise NotPlausible(f"patch {patch.patch_id} is {patch.status}")
            patch.advance(PENDING_REVIEW)
            self._patches.setdefault(patch.patch_id, patch)
            self._ever_enqueued.add(patch.patch_id)
            self._queue.append(patch.patch_id)
            self._queue.sort(key=lambda pid: (self._patches[pid].found_at, pid))
            patch.write_files(self.patches_dir)
        return patch

    def review_queue(self) -> List[Patch]:
        with self._lock:
            return [self._patches[pid] for pid in self._queue]

    def decide(self, patch_id: str, decision: str, reviewer: str,
               at: Optional[int] = None, eager_merge: bool = False):
        """Apply a review decision. Approval opens a pull request; the
        simulated maintainer merges it ``merge_delay`` minutes later, either
        eagerly here (interactive mode) or via a finalize_merge call that an
        event loop schedules.

        Returns (patch, pull_request_or_None).
        """
        if decision not in ("approve", "reject"):
            raise ValueError(f"decision must be approve or reject, got {decision!r}")
        with self._lock:
            patch = self._patches.get(patch_id)
            if patch is None:
                raise UnknownPatch(patch_id)
            if patch.status != PENDING_REVIEW:
                raise AlreadyDecided(f"patch {patch_id} is {patch.status}")
            now = self.forge.clock.now if at is None else at

            if decision == "reject":
                patch.advance(REJECTED)
                self._queue.remove(patch_id)
                patch.write_files(self.patches_dir)
                return patch, None

            pr = self.forge.submit_pull_request(
                patch.project_id, patch.base_commit, patch.diff,
                message=f"repair {patch.build_id}: {patch.operator} "
                        f"(reviewed by {reviewer})",
                opened_at=now)
            patch.advance(APPROVED)
            patch.pr_id = pr.pr_id
            self._queue.remove(patch_id)
            patch.write_files(self.patches_dir)
            if eager_merge:
                self.finalize_merge(patch_id, pr.pr_id, at=now + self.merge_delay)
            return patch, pr

    def finalize_merge(self, patch_id: str, pr_id: str, at: int) -> None:
        """Maintainer merge of an approved patch's pull request."""
        with self._lock:
            patch = self._patches.get(patch_id)
            if patch is None:
                raise UnknownPatch(patch_id)
            self.forge.merge_pull_request(pr_id, at=at)
            patch.advance(MERGED)
            patch.write_files(self.patches_dir)

    # ------------------------------------------------------------------ race

    def compute_race(self, build_id: str) -> RaceOutcome:
        with self._lock:
            attempt = self._attempts_by_build.get(build_id)
        if attempt is None or attempt.patch_found_at is None:
            raise AttemptLogError(f"build {build_id} has no patch-producing attempt")
        human_fix_at = self.forge.human_fix_at(build_id)
        if human_fix_at is None:
            raise MissingHumanFixEvent(build_id)

        decision = "open"
        pr_opened_at = None
        pr_id = attempt.pr_id
        if attempt.top_patch is not None:
            patch = self._patches.get(attempt.top_patch)
            if patch is not None:
                if patch.status == MERGED:
                    decision = "merged"
                elif patch.status == REJECTED:
                    decision = "rejected"
                pr_id = pr_id or patch.pr_id
        if pr_id is not None:
            pr = self.forge.pull_requests.get(pr_id)
            if pr is not None:
                pr_opened_at = pr.opened_at
                if pr.decision != "open":
                    decision = pr.decision

        return RaceOutcome(
            build_id=build_id,
            patch_found_at=attempt.patch_found_at,
            pr_opened_at=pr_opened_at,
            human_fix_at=human_fix_at,
            decision=decision,
            human_competitive=(attempt.patch_found_at < human_fix_at
                               and decision == "merged"),
        )

    def races(self) -> List[RaceOutcome]:
        outcomes = []
        for attempt in self.attempts():
            if attempt.patch_found_at is None:
                continue
            if self.forge.human_fix_at(attempt.build_id) is None:
                continue
            outcomes.append(self.compute_race(attempt.build_id))
        return outcomes

    # ----------------------------------------------------------------- stats

    def stats(self) -> dict:
        # Computed from attempt records only, so live stats always equal
        # `repairbot stats` over the same attempts.jsonl.
        return aggregate_stats(self.attempts())


def aggregate_stats(attempts: List[RepairAttempt],
                    races: Optional[List[dict]] = None) -> dict:
    """Aggregates over attempt records; replaying the log reproduces these
    numbers exactly."""
    counts = {state: 0 for state in TERMINAL_STATES}
    eligible = reproduced = plausible_patches = 0
    with_plausible = overfitting = prs = merged = rejected = 0
    competitive = 0
    for attempt in attempts:
        counts[attempt.terminal] += 1
        if attempt.classification == "test_failure":
            eligible += 1
        if attempt.reproduction == "reproduced":
            reproduced += 1
        plausible_patches += attempt.plausible
        overfitting += len(attempt.overfitting_patch_ids)
        if attempt.plausible > 0:
            with_plausible += 1
        if attempt.pr_id is not None:
            prs += 1
        if attempt.decision == "rejected":
            rejected += 1
        if attempt.merged_at is not None:
            merged += 1
        if attempt.human_competitive:
            competitive += 1
    if races is not None:
        competitive = sum(1 for r in races if r["human_competitive"])
    reproduction_rate = round(reproduced / eligible, 4) if eligible else 0.0
    return {
        "attempts": len(attempts),
        "eligible": eligible,
        "reproduced": reproduced,
        "reproduction_rate": reproduction_rate,
        "with_plausible": with_plausible,
        "plausible_patches": plausible_patches,
        "overfitting_patches": overfitting,
        "prs_opened": prs,
        "merged": merged,
        "rejected": rejected,
        "human_competitive": competitive,
        "terminal": counts,
    }


def replay_attempts(path) -> List[RepairAttempt]:
    """Re-read an attempt log; used by `repairbot replay` and the tests."""
    attempts = []
    path = Path(path)
    if not path.exists():
        raise AttemptLogError(f"no attempt log at {path}")
    for line in path.read_text().splitlines():
        if not line.strip():
            continue
        data = json.loads(line)
        if data.get("kind") == "header":
            continue
        attempts.append(RepairAttempt.from_dict(data))
    return attempts
