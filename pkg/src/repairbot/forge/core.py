"""The Forge: simulated hosting platform plus CI runner.

Owns the logical clock, the project store, the append-only build stream
(``builds.jsonl``), the pull-request inbox, and the human-fix schedule
derived from the corpus manifest. All mutations go through this single
owner; reads hand out snapshots.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional

from ..minilang import parse_program, parse_suite, prettyprint_file
from ..minilang.parser import ParseError, ResolveError
from ..minilang.printer import format_test
from ..udiff import apply_diff
from .build import (
    DEFAULT_BUILD_DURATION,
    DEFAULT_CI_STEP_BUDGET,
    TEST_FAILURE,
    BuildRecord,
    execute_build,
)
from .clock import LogicalClock
from .prs import OPEN, PullRequest
from .repo import ProjectRepo, RepoError, list_project_ids, load_project

BUILDS_FILE = "builds.jsonl"
MANIFEST_FILE = "corpus.manifest.json"
INBOX_DIR = "inbox"


class UnknownProject(Exception):
    pass


class UnknownCommit(Exception):
    pass


@dataclass
class ManifestEntry:
    project_id: str
    kind: str                      # healthy | buggy | flaky
    head_commit: str
    human_fix_delay: Optional[int]
    injected: Optional[dict]
    ground_truth_fix: Optional[dict]
    ci_failing_tests: List[str]

    @staticmethod
    def from_dict(data: dict) -> "ManifestEntry":
        return ManifestEntry(
            project_id=data["project_id"],
            kind=data["kind"],
            head_commit=data["head_commit"],
            human_fix_delay=data.get("human_fix_delay"),
            injected=data.get("injected"),
            ground_truth_fix=data.get("ground_truth_fix"),
            ci_failing_tests=data.get("ci_failing_tests", []),
        )

    def to_dict(self) -> dict:
        return {
            "project_id": self.project_id,
            "kind": self.kind,
            "head_commit": self.head_commit,
            "human_fix_delay": self.human_fix_delay,
            "injected": self.injected,
            "ground_truth_fix": self.ground_truth_fix,
            "ci_failing_tests": self.ci_failing_tests,
        }


@dataclass
class CorpusManifest:
    params: dict
    projects: Dict[str, ManifestEntry] = field(default_factory=dict)

    @staticmethod
    def load(path: Path) -> "CorpusManifest":
        data = json.loads(path.read_text())
        projects = {pid: ManifestEntry.from_dict(entry)
                    for pid, entry in data["projects"].items()}
        return CorpusManifest(params=data["params"], projects=projects)

    def save(self, path: Path) -> None:
        data = {
            "params": self.params,
            "projects": {pid: e.to_dict() for pid, e in sorted(self.projects.items())},
        }
        path.write_text(json.dumps(data, indent=2) + "\n")


class Forge:
    def __init__(self, root, build_duration: int = DEFAULT_BUILD_DURATION,
                 ci_step_budget: int = DEFAULT_CI_STEP_BUDGET):
        self.root = Path(root)
        if not self.root.is_dir():
            raise RepoError(f"forge directory {self.root} does not exist")
        self.build_duration = build_duration
        self.ci_step_budget = ci_step_budget
        self.clock = LogicalClock()

        self.projects: Dict[str, ProjectRepo] = {
            pid: load_project(self.root, pid) for pid in list_project_ids(self.root)}

        manifest_path = self.root / MANIFEST_FILE
        self.manifest: Optional[CorpusManifest] = (
            CorpusManifest.load(manifest_path) if manifest_path.exists() else None)

        self.builds: List[BuildRecord] = []
        self._builds_by_id: Dict[str, BuildRecord] = {}
        self._load_build_stream()

        self.pull_requests: Dict[str, PullRequest] = {}
        self._load_inbox()
        self._human_fix_at: Dict[str, int] = {}
        for record in self.builds:
            self._schedule_human_fix(record)

    # ------------------------------------------------------------- stream io

    def _load_build_stream(self) -> None:
        stream_path = self.root / BUILDS_FILE
        if not stream_path.exists():
            return
        for line in stream_path.read_text().splitlines():
            if not line.strip():
                continue
            record = BuildRecord.from_dict(json.loads(line))
            self.builds.append(record)
            self._builds_by_id[record.build_id] = record
        if self.builds:
            self.clock.advance_to(max(r.finished_at for r in self.builds))

    def _append_build(self, record: BuildRecord) -> None:
        self.builds.append(record)
        self._builds_by_id[record.build_id] = record
        with open(self.root / BUILDS_FILE, "a") as stream:
            stream.write(json.dumps(record.to_dict()) + "\n")

    def _load_inbox(self) -> None:
        inbox = self.root / INBOX_DIR
        if not inbox.is_dir():
            return
        for path in sorted(inbox.glob("*.json")):
            pr = PullRequest.from_dict(json.loads(path.read_text()))
            self.pull_requests[pr.pr_id] = pr

    def _persist_pr(self, pr: PullRequest) -> None:
        inbox = self.root / INBOX_DIR
        inbox.mkdir(exist_ok=True)
        (inbox / f"{pr.pr_id}.json").write_text(json.dumps(pr.to_dict(), indent=2) + "\n")

    # ------------------------------------------------------------- projects

    def project(self, project_id: str) -> ProjectRepo:
        repo = self.projects.get(project_id)
        if repo is None:
            raise UnknownProject(project_id)
        return repo

    def snapshot(self, project_id: str, commit_id: str) -> Mapping[str, str]:
        try:
            return self.project(project_id).commit(commit_id).files
        except RepoError as exc:
            raise UnknownCommit(str(exc)) from None

    def canonical_snapshot(self, project_id: str, commit_id: str) -> Dict[str, str]:
        """Snapshot with every parseable file re-rendered in canonical form.

        Pull-request diffs are generated over canonical text, so they are
        applied against canonical text too.
        """
        files = dict(self.snapshot(project_id, commit_id))
        sources = {p: t for p, t in files.items() if p.startswith("src/")}
        try:
            program = parse_program(sources)
            for path in sources:
                files[path] = prettyprint_file(program, path)
        except (ParseError, ResolveError):
            pass  # unparseable sources stay raw; diffs against them will fail
        for group in ("tests/", "tests_heldout/"):
            test_files = {p: t for p, t in files.items() if p.startswith(group)}
            if not test_files:
                continue
            try:
                suite = parse_suite(test_files)
            except (ParseError, ResolveError):
                continue
            for path in test_files:
                rendered = [format_test(t) for t in suite.tests if t.span.file == path]
                files[path] = "\n".join(rendered)
        return files

    # ---------------------------------------------------------------- builds

    def run_build(self, project_id: str, commit_id: str,
                  started_at: Optional[int] = None) -> BuildRecord:
        """Execute CI for one commit; appends to the build stream and moves
        the clock to the build's finish time.

        A record is issued when the build finishes; its start time is
        descriptive metadata and may precede other already-issued events
        (the farm works while the bot does).
        """
        files = self.snapshot(project_id, commit_id)
        started = self.clock.now if started_at is None else started_at
        finished = started + self.build_duration
        self.clock.advance_to(finished)
        build_id = f"b{len(self.builds) + 1:05d}"
        record = execute_build(build_id, project_id, commit_id, files,
                               started, finished, self.ci_step_budget)
        self._append_build(record)
        self._schedule_human_fix(record)
        return record

    def build(self, build_id: str) -> BuildRecord:
        record = self._builds_by_id.get(build_id)
        if record is None:
            raise UnknownCommit(f"no build {build_id}")
        return record

    def run_all_head_builds(self) -> List[BuildRecord]:
        """CI sweep: one build per commit, serialized on the clock in
        project-id order. Per-build race timelines are measured from each
        build's own finish, so serialization does not distort them.
        """
        already_built = {(b.project_id, b.commit_id) for b in self.builds}
        records = []
        for project_id in sorted(self.projects):
            for commit in self.projects[project_id].commits:
                if (project_id, commit.commit_id) in already_built:
                    continue
                records.append(self.run_build(project_id, commit.commit_id))
        return records

    # ------------------------------------------------------------ human race

    def _schedule_human_fix(self, record: BuildRecord) -> None:
        if self.manifest is None or record.status != TEST_FAILURE:
            return
        entry = self.manifest.projects.get(record.project_id)
        if entry is None or entry.human_fix_delay is None:
            return
        if record.commit_id != entry.head_commit:
            return
        # The human is notified when the failing build finishes; the race
        # starts there for both parties.
        self._human_fix_at.setdefault(record.build_id, record.finished_at + entry.human_fix_delay)

    def human_fix_at(self, build_id: str) -> Optional[int]:
        return self._human_fix_at.get(build_id)

    # ------------------------------------------------------------------- prs

    def submit_pull_request(self, project_id: str, base_commit: str,
                            diff: str, message: str,
                            opened_at: Optional[int] = None) -> PullRequest:
        base_files = self.canonical_snapshot(project_id, base_commit)
        apply_diff(base_files, diff)  # DiffApplyError if it does not apply
        opened = self.clock.now if opened_at is None else opened_at
        self.clock.advance_to(opened)
        pr = PullRequest(
            pr_id=f"pr-{len(self.pull_requests) + 1:04d}",
            project_id=project_id,
            base_commit=base_commit,
            diff=diff,
            message=message,
            opened_at=opened,
        )
        self.pull_requests[pr.pr_id] = pr
        self._persist_pr(pr)
        return pr

    def merge_pull_request(self, pr_id: str, at: int) -> PullRequest:
        """Maintainer merge. Recorded on the PR; the narrative ends here, so
        no counter-commit lands (stream ratios stay exact)."""
        pr = self.pull_requests[pr_id]
        self.clock.advance_to(at)
        pr.mark("merged", at)
        self._persist_pr(pr)
        return pr

    def reject_pull_request(self, pr_id: str, at: int) -> PullRequest:
        pr = self.pull_requests[pr_id]
        self.clock.advance_to(at)
        pr.mark("rejected", at)
        self._persist_pr(pr)
        return pr

    def open_pull_requests(self) -> List[PullRequest]:
        return [pr for pr in self.pull_requests.values() if pr.decision == OPEN]
