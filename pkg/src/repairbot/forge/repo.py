"""Project repositories: full-snapshot commits stored as plain directories.

Layout under the forge root:

    projects/<project_id>/project.json        commit ids + timestamps
    projects/<project_id>/commits/<commit_id>/<files...>

Snapshots hold ``src/*.mini`` sources and ``tests/*.mini`` suites; seeded
bug projects may carry ``tests_heldout/*.mini`` research tests that CI
never runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping


class RepoError(Exception):
    pass


@dataclass(frozen=True)
class Commit:
    commit_id: str
    timestamp: int
    files: Mapping[str, str]


@dataclass
class ProjectRepo:
    project_id: str
    commits: List[Commit]

    def head(self) -> Commit:
        if not self.commits:
            raise RepoError(f"project {self.project_id} has no commits")
        return self.commits[-1]

    def commit(self, commit_id: str) -> Commit:
        for commit in self.commits:
            if commit.commit_id == commit_id:
                return commit
        raise RepoError(f"project {self.project_id} has no commit {commit_id}")

    def add_commit(self, commit: Commit) -> None:
        if any(c.commit_id == commit.commit_id for c in self.commits):
            raise RepoError(f"duplicate commit id {commit.commit_id}")
        if self.commits and commit.timestamp <= self.commits[-1].timestamp:
            raise RepoError("commit timestamps must strictly increase")
        self.commits.append(commit)


def _snapshot_files(commit_dir: Path) -> Dict[str, str]:
    files = {}
    for path in sorted(commit_dir.rglob("*.mini")):
        files[path.relative_to(commit_dir).as_posix()] = path.read_text()
    return files


def save_project(root: Path, repo: ProjectRepo) -> None:
    project_dir = root / "projects" / repo.project_id
    for commit in repo.commits:
        commit_dir = project_dir / "commits" / commit.commit_id
        for rel_path, content in commit.files.items():
            target = commit_dir / rel_path
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(content)
    meta = {
        "project_id": repo.project_id,
        "commits": [{"commit_id": c.commit_id, "timestamp": c.timestamp}
                    for c in repo.commits],
    }
    (project_dir / "project.json").write_text(json.dumps(meta, indent=2) + "\n")


def load_project(root: Path, project_id: str) -> ProjectRepo:
    project_dir = root / "projects" / project_id
    meta_path = project_dir / "project.json"
    if not meta_path.exists():
        raise RepoError(f"no such project {project_id!r} under {root}")
    meta = json.loads(meta_path.read_text())
    commits = []
    for entry in meta["commits"]:
        commit_dir = project_dir / "commits" / entry["commit_id"]
        commits.append(Commit(entry["commit_id"], entry["timestamp"],
                              _snapshot_files(commit_dir)))
    return ProjectRepo(meta["project_id"], commits)


def list_project_ids(root: Path) -> List[str]:
    projects_dir = root / "projects"
    if not projects_dir.exists():
        return []
    return sorted(p.name for p in projects_dir.iterdir() if (p / "project.json").exists())


def split_snapshot(files: Mapping[str, str]):
    """(sources, tests, heldout) file groups of a snapshot."""
    sources = {p: t for p, t in files.items() if p.startswith("src/")}
    tests = {p: t for p, t in files.items() if p.startswith("tests/")}
    heldout = {p: t for p, t in files.items() if p.startswith("tests_heldout/")}
    return sources, tests, heldout
