import pytest

from repairbot.forge import Forge, seed_corpus
from repairbot.monitor import (
    BuildClassification,
    EmptyStream,
    MalformedLog,
    classify_build,
    stream_stats,
)

PASSING_LOG = """BUILD b0001 START 00:00
TEST PASS t_one
BUILD b0001 RESULT passed
"""

COMPILE_LOG = """BUILD b0002 START 00:02
COMPILE ERROR a.mini:3
BUILD b0002 RESULT compile_error
"""

FAILING_LOG = """BUILD b0003 START 00:04
TEST FAIL t_upper at a.mini:9
TEST PASS t_lower
BUILD b0003 RESULT test_failure
"""

TWO_FAILURES_LOG = """BUILD b0004 START 00:06
TEST FAIL t_first at a.mini:2
TEST ERROR t_second division_by_zero
TEST PASS t_third
BUILD b0004 RESULT test_failure
"""


def test_compile_error_not_eligible():
    c = classify_build(COMPILE_LOG)
    assert c.kind == "compile_error"
    assert not c.eligible_for_repair
    assert c.failing_tests == ()


def test_single_test_failure_extracted():
    c = classify_build(FAILING_LOG)
    assert c.kind == "test_failure"
    assert c.eligible_for_repair
    assert c.failing_tests == ("t_upper",)


def test_two_failures_in_log_order():
    c = classify_build(TWO_FAILURES_LOG)
    assert c.failing_tests == ("t_first", "t_second")


def test_failing_names_deduplicated():
    log = ("BUILD b1 START 00:00\n"
           "TEST FAIL t_x at a.mini:1\n"
           "TEST FAIL t_x at a.mini:1\n"
           "BUILD b1 RESULT test_failure\n")
    assert classify_build(log).failing_tests == ("t_x",)


def test_success_has_no_failing_tests():
    c = classify_build(PASSING_LOG)
    assert c.kind == "success"
    assert not c.eligible_for_repair


def test_missing_result_line_is_malformed():
    with pytest.raises(MalformedLog):
        classify_build("BUILD b9 START 00:00\nTEST PASS t\n")
    with pytest.raises(MalformedLog):
        classify_build("")


def test_eligibility_matches_kind_invariant():
    for log in (PASSING_LOG, COMPILE_LOG, FAILING_LOG):
        c = classify_build(log)
        assert c.eligible_for_repair == (c.kind == "test_failure")
        assert bool(c.failing_tests) == (c.kind == "test_failure")


def test_classification_agrees_with_forge_status(tmp_path):
    """Log-only classification must reconstruct ground truth for every build."""
    seed_corpus(tmp_path / "c", 12, 0.5, 0.25, seed=31)
    forge = Forge(tmp_path / "c")
    for record in forge.run_all_head_builds():
        c = classify_build(record.log)
        kind = {"passed": "success", "compile_error": "compile_error",
                "test_failure": "test_failure"}[record.status]
        assert c.kind == kind
        assert c.build_id == record.build_id
        assert c.failing_tests == record.failing_tests


def make(kind, n):
    return [BuildClassification(f"b{i}", kind, ("t",) if kind == "test_failure" else ())
            for i in range(n)]


def test_stream_stats_quarter_ratio():
    stats = stream_stats(make("success", 3) + make("test_failure", 1))
    assert stats.fail_ratio == 0.25
    assert stats.test_failure_share == 1.0
    assert not stats.no_failures


def test_stream_stats_no_failures_flagged():
    stats = stream_stats(make("success", 5))
    assert stats.fail_ratio == 0.0
    assert stats.test_failure_share == 0.0
    assert stats.no_failures


def test_stream_stats_rounding_four_decimals():
    stats = stream_stats(make("success", 2) + make("test_failure", 1))
    assert stats.fail_ratio == 0.3333


def test_stream_stats_empty_stream_raises():
    with pytest.raises(EmptyStream):
        stream_stats([])


def test_stream_stats_on_seeded_corpus_exact(tmp_path):
    seed_corpus(tmp_path / "c", 20, 0.25, 0.0, seed=77)
    forge = Forge(tmp_path / "c")
    classifications = [classify_build(r.log) for r in forge.run_all_head_builds()]
    stats = stream_stats(classifications)
    assert stats.fail_ratio == 0.25
    assert stats.test_failure_share == 1.0
