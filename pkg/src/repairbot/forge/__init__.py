"""Simulated hosting + CI platform with a logical clock."""

from .build import (
    COMPILE_ERROR,
    DEFAULT_BUILD_DURATION,
    DEFAULT_CI_STEP_BUDGET,
    PASSED,
    TEST_FAILURE,
    BuildRecord,
    execute_build,
)
from .clock import ClockError, LogicalClock, format_hhmm
from .core import CorpusManifest, Forge, ManifestEntry, UnknownCommit, UnknownProject
from .prs import PullRequest
from .repo import Commit, ProjectRepo, RepoError, load_project, save_project, split_snapshot
from .seed import DEFAULT_LOCAL_STEP_BUDGET, InvalidRate, SeedError, seed_corpus

__all__ = [
    "Forge", "CorpusManifest", "ManifestEntry",
    "BuildRecord", "execute_build",
    "PASSED", "COMPILE_ERROR", "TEST_FAILURE",
    "DEFAULT_BUILD_DURATION", "DEFAULT_CI_STEP_BUDGET", "DEFAULT_LOCAL_STEP_BUDGET",
    "LogicalClock", "ClockError", "format_hhmm",
    "PullRequest",
    "Commit", "ProjectRepo", "RepoError",
    "load_project", "save_project", "split_snapshot",
    "seed_corpus", "InvalidRate", "SeedError",
    "UnknownProject", "UnknownCommit",
]
