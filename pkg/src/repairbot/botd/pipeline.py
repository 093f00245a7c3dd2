"""The bot's orchestration loop as a deterministic discrete-event run.

CI builds every commit, then each failing build flows through
detect -> classify -> reproduce -> repair -> review -> merge, with every
stage charged its configured logical latency. Events are processed in
global (time, seq) order off one heap, so stored timestamps are monotonic
and two runs with the same seed produce identical attempt logs modulo
wall-clock fields.

Stage concurrency is simulated by these per-build latencies rather than
by worker threads: at desk scale the pipeline is compute-light, and the
determinism contract is easier to guarantee with a single event loop.
"""

from __future__ import annotations

import heapq
import json
import math
import time
from pathlib import Path
from typing import Callable, List, Tuple

from ..curator import (
    NO_FAILURE,
    NO_PATCH,
    NOT_REPRODUCED,
    PATCH_DECIDED,
    PATCH_PENDING,
    Curator,
    RepairAttempt,
)
from ..forge.core import Forge
from ..forge.repo import RepoError, split_snapshot
from ..minilang import parse_program, parse_suite
from ..minilang.parser import ParseError, ResolveError
from ..monitor import classify_build
from ..repair import (
    fails_held_out,
    generate_candidates,
    localize,
    rank_plausible,
    validate,
)
from ..reproducer import REPRODUCED, reproduce
from .config import BotConfig, ForgeNotFound


class Pipeline:
    def __init__(self, config: BotConfig):
        self.config = config.validate()
        root = Path(config.forge_dir)
        if not (root / "projects").is_dir():
            raise ForgeNotFound(f"{root} is not a forge directory")
        try:
            self.forge = Forge(root, build_duration=config.build_duration,
                               ci_step_budget=config.ci_step_budget)
        except RepoError as exc:
            raise ForgeNotFound(str(exc)) from None
        self.curator = Curator(self.forge, root,
                               review_latency=config.review_latency,
                               merge_delay=config.merge_delay)
        self._events: List[Tuple[int, int, Callable[[int], None]]] = []
        self._seq = 0
        self._classifications_path = root / "classifications.jsonl"
        self._reproductions_path = root / "reproductions.jsonl"
        self._classified: set = set()
        if self._classifications_path.exists():
            for line in self._classifications_path.read_text().splitlines():
                if line.strip():
                    self._classified.add(json.loads(line)["build_id"])

    # ------------------------------------------------------------ event loop

    def _schedule(self, at: int, action: Callable[[int], None]) -> None:
        heapq.heappush(self._events, (at, self._seq, action))
        self._seq += 1

    def _drain(self) -> None:
        while self._events:
            at, _, action = heapq.heappop(self._events)
            self.forge.clock.advance_to(at)
            action(at)

    # ------------------------------------------------------------------- run

    def run(self) -> dict:
        """Process every failing build exactly once; returns the summary.

        CI builds and bot stages share one event timeline: the build chain
        is serialized while detections, reviews, and merges interleave at
        their own logical times.
        """
        self.curator.write_header(self.config.to_dict())
        already_attempted = self.curator.attempted_build_ids()

        # Builds already in the stream (restart): detect as soon as possible.
        for record in self.forge.builds:
            self._schedule_detection(record, already_attempted)

        pending = []
        built = {(b.project_id, b.commit_id) for b in self.forge.builds}
        for project_id in sorted(self.forge.projects):
            for commit in self.forge.projects[project_id].commits:
                if (project_id, commit.commit_id) not in built:
                    pending.append((project_id, commit.commit_id))
        if pending:
            queue = list(reversed(pending))  # pop() from the tail
            # Builds are scheduled at their finish times: that is when the
            # record lands in the stream.
            self._schedule(self.forge.clock.now + self.config.build_duration,
                           self._make_ci_step(queue, already_attempted))
        self._drain()

        stats = self.curator.stats()
        return {
            "attempts": stats["attempts"],
            "reproduced": stats["reproduced"],
            "plausible": stats["with_plausible"],
            "prs": stats["prs_opened"],
            "human_competitive": stats["human_competitive"],
        }

    # ------------------------------------------------------------ per build

    def _make_ci_step(self, queue: List[Tuple[str, str]],
                      already_attempted: set) -> Callable[[int], None]:
        def build_next(at: int) -> None:
            project_id, commit_id = queue.pop()
            record = self.forge.run_build(project_id, commit_id,
                                          started_at=at - self.config.build_duration)
            self._schedule_detection(record, already_attempted)
            if queue:
                self._schedule(record.finished_at + self.config.build_duration,
                               self._make_ci_step(queue, already_attempted))
        return build_next

    def _schedule_detection(self, record, already_attempted: set) -> None:
        if record.build_id in already_attempted:
            return
        at = max(record.finished_at + self.config.poll_interval,
                 self.forge.clock.now)
        self._schedule(at, self._make_detection(record))

    def _make_detection(self, record) -> Callable[[int], None]:
        def detect(at: int) -> None:
            classification = classify_build(record.log)
            if record.build_id not in self._classified:
                self._classified.add(record.build_id)
                self._append_jsonl(self._classifications_path, classification.to_dict())
            if record.status == "passed":
                return
            self._run_attempt(record, classification, at)
        return detect

    def _run_attempt(self, record, classification, detected_at: int) -> None:
        config = self.config
        attempt = RepairAttempt(
            attempt_id=f"att-{record.build_id}",
            build_id=record.build_id,
            project_id=record.project_id,
            classification=classification.kind,
            failing_tests=list(classification.failing_tests),
            detect_latency=config.poll_interval,
        )
        wall_start = time.perf_counter()

        if not classification.eligible_for_repair:
            attempt.terminal = NO_FAILURE
            self._finish(attempt, wall_start)
            return

        snapshot = self.forge.snapshot(record.project_id, record.commit_id)
        repro = reproduce(classification, snapshot,
                          step_budget=config.step_budget,
                          duration=config.reproduce_cost)
        self._append_jsonl(self._reproductions_path, repro.to_dict())
        attempt.reproduction = repro.outcome
        attempt.local_failing_tests = list(repro.local_failing_tests)
        attempt.reproduce_duration = config.reproduce_cost
        stage_start = detected_at + config.reproduce_cost

        if repro.outcome != REPRODUCED:
            attempt.terminal = NOT_REPRODUCED
            self._finish(attempt, wall_start)
            return

        sources, tests, heldout_files = split_snapshot(snapshot)
        program = parse_program(sources)
        suite = parse_suite(tests)
        heldout = None
        if heldout_files:
            try:
                heldout = parse_suite(heldout_files)
            except (ParseError, ResolveError):
                heldout = None

        suspects = localize(repro.report)
        plausible = []
        tried = 0
        for patch in generate_candidates(
                program, suspects, config.candidate_budget,
                project_id=record.project_id, base_commit=record.commit_id,
                build_id=record.build_id):
            patch.found_at = stage_start + (tried + 1) * config.per_candidate_tick
            tried += 1
            if validate(program, patch, suite, config.step_budget).plausible:
                plausible.append(patch)

        attempt.candidates_tried = tried
        attempt.repair_duration = math.ceil(tried * config.per_candidate_tick)
        stage_end = stage_start + attempt.repair_duration
        attempt.plausible = len(plausible)

        if not plausible:
            attempt.terminal = NO_PATCH
            self._finish(attempt, wall_start)
            return

        for patch in plausible:
            if heldout is not None:
                patch.overfitting = fails_held_out(program, patch, heldout,
                                                   config.step_budget)
            self.curator.register_patch(patch)
        ranked = rank_plausible(plausible)
        top = ranked[0]

        attempt.patch_ids = [p.patch_id for p in ranked]
        attempt.top_patch = top.patch_id
        attempt.overfitting_patch_ids = [p.patch_id for p in ranked if p.overfitting]
        attempt.patch_found_at = stage_end
        attempt.human_fix_at = self.forge.human_fix_at(record.build_id)

        self.curator.enqueue_for_review(top, at=stage_end)
        attempt.enqueued_at = stage_end

        if config.review_mode == "auto":
            decide_at = stage_end + config.review_latency
            self._schedule(decide_at, self._make_auto_decision(attempt, top, wall_start))
        else:
            attempt.terminal = PATCH_PENDING
            self._finish(attempt, wall_start)

    def _make_auto_decision(self, attempt, patch, wall_start) -> Callable[[int], None]:
        def decide(at: int) -> None:
            _, pr = self.curator.decide(patch.patch_id, "approve",
                                        reviewer="auto-reviewer", at=at)
            attempt.decided_at = at
            attempt.decision = "approved"
            attempt.pr_id = pr.pr_id
            attempt.pr_opened_at = pr.opened_at
            merge_at = at + self.config.merge_delay
            self._schedule(merge_at, self._make_merge(attempt, patch, pr, wall_start))
        return decide

    def _make_merge(self, attempt, patch, pr, wall_start) -> Callable[[int], None]:
        def merge(at: int) -> None:
            self.curator.finalize_merge(patch.patch_id, pr.pr_id, at=at)
            attempt.merged_at = at
            attempt.terminal = PATCH_DECIDED
            if attempt.human_fix_at is not None:
                attempt.human_competitive = (
                    attempt.patch_found_at < attempt.human_fix_at)
            self._finish(attempt, wall_start)
        return merge

    def _finish(self, attempt: RepairAttempt, wall_start: float) -> None:
        attempt.wall_ms = round((time.perf_counter() - wall_start) * 1000.0, 3)
        self.curator.append_attempt(attempt)

    @staticmethod
    def _append_jsonl(path: Path, data: dict) -> None:
        with open(path, "a") as fh:
            fh.write(json.dumps(data) + "\n")


def run_pipeline(config: BotConfig) -> dict:
    return Pipeline(config).run()
