"""Repair stage: fault localization, candidate generation, validation."""

from .edits import AstEdit, PatchApplyError, apply_edit, apply_edits
from .engine import (
    DEFAULT_CANDIDATE_BUDGET,
    ValidationResult,
    fails_held_out,
    generate_candidates,
    rank_plausible,
    validate,
)
from .localize import NoFailingTests, SuspiciousStatement, localize
from .patches import Patch

__all__ = [
    "AstEdit", "PatchApplyError", "apply_edit", "apply_edits",
    "generate_candidates", "validate", "rank_plausible", "fails_held_out",
    "ValidationResult", "DEFAULT_CANDIDATE_BUDGET",
    "localize", "SuspiciousStatement", "NoFailingTests",
    "Patch",
]
