import json

import pytest

from repairbot.curator import (
    AlreadyDecided,
    AttemptLogError,
    Curator,
    DuplicateEnqueue,
    MissingHumanFixEvent,
    NotPlausible,
    RepairAttempt,
    aggregate_stats,
    replay_attempts,
)
from repairbot.forge import Commit, Forge, ProjectRepo, save_project
from repairbot.minilang import parse_program, prettyprint_file
from repairbot.repair.edits import AstEdit, KIND_REPLACE_EXPR
from repairbot.repair.patches import PLAUSIBLE, Patch
from repairbot.udiff import make_file_diff

FAILING_FILES = {
    "src/main.mini": "fn inc(x) {\n  return x + 2;\n}\n",
    "tests/main_test.mini": "test t_inc {\n  assert inc(2) == 3;\n}\n",
}


@pytest.fixture
def forge(tmp_path):
    save_project(tmp_path, ProjectRepo("p0001", [Commit("c1", 0, FAILING_FILES)]))
    return Forge(tmp_path)


@pytest.fixture
def curator(forge, tmp_path):
    return Curator(forge, tmp_path)


def plausible_patch(forge, patch_id="b00001-x00001") -> Patch:
    base = FAILING_FILES["src/main.mini"]
    fixed = base.replace("x + 2", "x + 1")
    diff = make_file_diff("src/main.mini", base, fixed)
    edit = AstEdit(KIND_REPLACE_EXPR, 0, ("value",), "constant_adjustment",
                   "x + 2", "x + 1")
    return Patch(patch_id, "p0001", "c1", "b00001", (edit,), diff,
                 "constant_adjustment", 1.0, 1, 42.5, status=PLAUSIBLE)


def test_enqueue_appears_in_queue(curator, forge):
    patch = plausible_patch(forge)
    curator.enqueue_for_review(patch)
    assert [p.patch_id for p in curator.review_queue()] == [patch.patch_id]
    assert patch.status == "pending_review"


def test_enqueue_twice_rejected(curator, forge):
    patch = plausible_patch(forge)
    curator.enqueue_for_review(patch)
    with pytest.raises(DuplicateEnqueue):
        curator.enqueue_for_review(patch)


def test_rejected_patch_cannot_be_reenqueued(curator, forge):
    patch = plausible_patch(forge)
    curator.enqueue_for_review(patch)
    curator.decide(patch.patch_id, "reject", "alex")
    with pytest.raises(DuplicateEnqueue):
        curator.enqueue_for_review(patch)


def test_non_plausible_rejected(curator, forge):
    patch = plausible_patch(forge)
    patch.status = "candidate"
    with pytest.raises(NotPlausible):
        curator.enqueue_for_review(patch)


def test_queue_ordered_by_found_at(curator, forge):
    late = plausible_patch(forge, "b00001-x00009")
    late.found_at = 99.0
    early = plausible_patch(forge, "b00001-x00003")
    early.found_at = 10.0
    curator.enqueue_for_review(late)
    curator.enqueue_for_review(early)
    assert [p.patch_id for p in curator.review_queue()] == [early.patch_id, late.patch_id]


def test_approve_opens_pr_with_patch_diff(curator, forge):
    patch = plausible_patch(forge)
    curator.enqueue_for_review(patch)
    decided, pr = curator.decide(patch.patch_id, "approve", "alex", eager_merge=True)
    assert decided.status == "merged"
    assert pr.diff == patch.diff
    assert forge.pull_requests[pr.pr_id].decision == "merged"
    assert curator.review_queue() == []


def test_reject_creates_no_pr(curator, forge):
    patch = plausible_patch(forge)
    curator.enqueue_for_review(patch)
    decided, pr = curator.decide(patch.patch_id, "reject", "alex")
    assert pr is None
    assert decided.status == "rejected"
    assert forge.pull_requests == {}


def test_second_decision_rejected(curator, forge):
    patch = plausible_patch(forge)
    curator.enqueue_for_review(patch)
    curator.decide(patch.patch_id, "reject", "alex")
    with pytest.raises(AlreadyDecided):
        curator.decide(patch.patch_id, "approve", "alex")


def test_unknown_patch_rejected(curator):
    from repairbot.curator import UnknownPatch
    with pytest.raises(UnknownPatch):
        curator.decide("ghost", "approve", "alex")


def test_exactly_one_pr_per_approved_patch(curator, forge):
    a = plausible_patch(forge, "pa")
    b = plausible_patch(forge, "pb")
    curator.enqueue_for_review(a)
    curator.enqueue_for_review(b)
    curator.decide(a.patch_id, "approve", "alex", eager_merge=True)
    curator.decide(b.patch_id, "reject", "alex")
    assert len(forge.pull_requests) == 1


def test_merge_unreachable_without_review():
    """The human gate is unbypassable: plausible cannot jump to merged."""
    from repairbot.repair.patches import LifecycleError
    patch = Patch("p", "p0001", "c1", "b1", (), "", "op", 1.0, 0, 0.0,
                  status=PLAUSIBLE)
    with pytest.raises(LifecycleError):
        patch.advance("merged")
    with pytest.raises(LifecycleError):
        patch.advance("approved")


def test_patch_files_written(curator, forge, tmp_path):
    patch = plausible_patch(forge)
    curator.register_patch(patch)
    diff_file = tmp_path / "patches" / f"{patch.patch_id}.diff"
    meta_file = tmp_path / "patches" / f"{patch.patch_id}.json"
    assert diff_file.read_text() == patch.diff
    assert json.loads(meta_file.read_text())["operator"] == "constant_adjustment"


# ---------------------------------------------------------------- attempts

def make_attempt(i, terminal="no_patch", **kw) -> RepairAttempt:
    base = dict(
        attempt_id=f"att-b{i:05d}",
        build_id=f"b{i:05d}",
        project_id=f"p{i:04d}",
        classification="test_failure",
        failing_tests=["t_x"],
        reproduction="reproduced",
        terminal=terminal,
    )
    base.update(kw)
    return RepairAttempt(**base)


def test_attempt_log_append_and_replay(curator, tmp_path):
    for i in range(10):
        curator.append_attempt(make_attempt(i))
    lines = (tmp_path / "attempts.jsonl").read_text().splitlines()
    assert len(lines) == 10
    ids = [json.loads(line)["attempt_id"] for line in lines]
    assert len(set(ids)) == 10
    replayed = replay_attempts(tmp_path / "attempts.jsonl")
    assert aggregate_stats(replayed) == aggregate_stats(curator.attempts())


def test_attempt_log_rejects_duplicate_build(curator):
    curator.append_attempt(make_attempt(1))
    with pytest.raises(AttemptLogError):
        curator.append_attempt(make_attempt(1))


def test_attempt_invariant_patch_ids_iff_plausible():
    attempt = make_attempt(1, plausible=2, patch_ids=[])
    with pytest.raises(AttemptLogError):
        attempt.validate()
    attempt = make_attempt(2, plausible=0, patch_ids=["x"])
    with pytest.raises(AttemptLogError):
        attempt.validate()


def test_corrupted_trailing_line_truncated(forge, tmp_path):
    curator = Curator(forge, tmp_path)
    curator.append_attempt(make_attempt(1))
    curator.append_attempt(make_attempt(2))
    with open(tmp_path / "attempts.jsonl", "a") as fh:
        fh.write('{"kind": "attempt", "attempt_id": "att-b0')  # crash mid-write
    recovered = Curator(forge, tmp_path)
    assert len(recovered.attempts()) == 2
    lines = (tmp_path / "attempts.jsonl").read_text().splitlines()
    assert len(lines) == 2
    # and the log accepts appends again
    recovered.append_attempt(make_attempt(3))
    assert len(replay_attempts(tmp_path / "attempts.jsonl")) == 3


def test_header_written_once(curator, tmp_path):
    curator.write_header({"seed": 1})
    curator.write_header({"seed": 2})
    lines = (tmp_path / "attempts.jsonl").read_text().splitlines()
    headers = [json.loads(l) for l in lines if json.loads(l)["kind"] == "header"]
    assert len(headers) == 1
    assert headers[0]["config"] == {"seed": 1}


# -------------------------------------------------------------------- races

def seeded_curator(tmp_path, delay=60):
    from repairbot.forge import seed_corpus
    seed_corpus(tmp_path / "c", 4, 1.0, 0.0, seed=3, human_delay_range=(delay, delay))
    forge = Forge(tmp_path / "c")
    forge.run_all_head_builds()
    return Curator(forge, tmp_path / "c"), forge


def test_race_competitive_iff_early_and_merged(tmp_path):
    curator, forge = seeded_curator(tmp_path)
    build = next(b for b in forge.builds if b.status == "test_failure")
    human_at = forge.human_fix_at(build.build_id)

    patch = plausible_patch(forge, "race-x1")
    patch.project_id = build.project_id
    patch.build_id = build.build_id
    # give the patch a diff that really applies: the ground-truth fix
    base = forge.canonical_snapshot(build.project_id, "c1")["src/main.mini"]
    entry = forge.manifest.projects[build.project_id]
    program = parse_program({"src/main.mini": base})
    from repairbot.repair.edits import apply_edit
    fixed_program = apply_edit(program, AstEdit.from_dict(entry.ground_truth_fix))
    patch.diff = make_file_diff("src/main.mini", base,
                                prettyprint_file(fixed_program, "src/main.mini"))

    curator.register_patch(patch)
    curator.enqueue_for_review(patch, at=50)
    attempt = make_attempt(1, terminal="patch_decided",
                           build_id=build.build_id, project_id=build.project_id,
                           plausible=1, patch_ids=[patch.patch_id],
                           top_patch=patch.patch_id, patch_found_at=50,
                           human_fix_at=human_at)
    curator.append_attempt(attempt)

    race_open = curator.compute_race(build.build_id)
    assert race_open.decision == "open"
    assert race_open.human_competitive is False

    _, pr = curator.decide(patch.patch_id, "approve", "alex", at=55, eager_merge=True)
    race = curator.compute_race(build.build_id)
    assert race.decision == "merged"
    assert race.human_competitive == (50 < human_at)
    assert race.human_competitive is True
    assert race.pr_opened_at == 55


def test_race_late_patch_never_competitive(tmp_path):
    curator, forge = seeded_curator(tmp_path, delay=60)
    build = next(b for b in forge.builds if b.status == "test_failure")
    human_at = forge.human_fix_at(build.build_id)
    attempt = make_attempt(2, terminal="patch_pending",
                           build_id=build.build_id, project_id=build.project_id,
                           plausible=1, patch_ids=["late-x"], top_patch="late-x",
                           patch_found_at=human_at + 50, human_fix_at=human_at)
    curator.append_attempt(attempt)
    race = curator.compute_race(build.build_id)
    assert race.human_competitive is False


def test_race_rejected_patch_never_competitive(tmp_path):
    curator, forge = seeded_curator(tmp_path)
    build = next(b for b in forge.builds if b.status == "test_failure")
    patch = plausible_patch(forge, "rej-x1")
    patch.project_id = build.project_id
    patch.build_id = build.build_id
    curator.register_patch(patch)
    curator.enqueue_for_review(patch, at=10)
    curator.decide(patch.patch_id, "reject", "alex", at=12)
    attempt = make_attempt(3, terminal="patch_pending",
                           build_id=build.build_id, project_id=build.project_id,
                           plausible=1, patch_ids=[patch.patch_id],
                           top_patch=patch.patch_id, patch_found_at=10,
                           human_fix_at=forge.human_fix_at(build.build_id))
    curator.append_attempt(attempt)
    race = curator.compute_race(build.build_id)
    assert race.decision == "rejected"
    assert race.human_competitive is False


def test_race_requires_human_fix_event(forge, tmp_path):
    curator = Curator(forge, tmp_path)
    record = forge.run_build("p0001", "c1")
    attempt = make_attempt(4, terminal="patch_pending", build_id=record.build_id,
                           plausible=1, patch_ids=["x"], top_patch="x",
                           patch_found_at=10)
    curator.append_attempt(attempt)
    with pytest.raises(MissingHumanFixEvent):
        curator.compute_race(record.build_id)
