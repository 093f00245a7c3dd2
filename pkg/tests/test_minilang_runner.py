import pytest

from repairbot.minilang import (
    BUDGET_EXCEEDED,
    ERROR,
    FAIL,
    parse,
    parse_suite,
    run_tests,
)
from repairbot.minilang.ast import Return, program_statements


def suite_of(text):
    return parse_suite({"tests/main_test.mini": text})


def test_inc_passes_and_covers_return():
    program = parse("fn inc(x) { return x + 1; }")
    suite = suite_of("test t_inc { assert inc(2) == 3; }")
    report = run_tests(program, suite)
    assert report.all_passed()
    return_id = next(s.stmt_id for _, s in program_statements(program)
                     if isinstance(s, Return))
    assert report.coverage[return_id] == frozenset({"t_inc"})


def test_infinite_loop_hits_budget_not_hang():
    program = parse("fn spin() { while (true) { } return 0; }")
    suite = suite_of("test t_spin { assert spin() == 0; }")
    report = run_tests(program, suite, step_budget=10_000)
    assert report.verdicts[0].status == BUDGET_EXCEEDED


def test_two_failing_tests_reported_by_name():
    program = parse("fn mid(x) { return x / 2; }")
    suite = suite_of("""
test t_low { assert mid(4) == 3; }
test t_ok { assert mid(8) == 4; }
test t_hi { assert mid(10) == 6; }
""")
    report = run_tests(program, suite)
    assert report.failing_test_names() == ("t_low", "t_hi")


def test_fail_verdict_carries_assert_location():
    program = parse("fn f() { return 1; }")
    suite = parse_suite({"tests/a.mini": "test t {\n  let x = f();\n  assert x == 2;\n}"})
    report = run_tests(program, suite)
    verdict = report.verdicts[0]
    assert verdict.status == FAIL
    assert verdict.fail_file == "tests/a.mini"
    assert verdict.fail_line == 3


def test_division_by_zero_is_a_verdict():
    program = parse("fn f(x) { return 10 / x; }")
    suite = suite_of("test t { assert f(0) == 0; }")
    report = run_tests(program, suite)
    verdict = report.verdicts[0]
    assert verdict.status == ERROR
    assert verdict.error_kind == "division_by_zero"


def test_modulo_by_zero_is_a_verdict():
    program = parse("fn f(x) { return 10 % x; }")
    suite = suite_of("test t { assert f(0) == 0; }")
    assert run_tests(program, suite).verdicts[0].error_kind == "division_by_zero"


def test_type_errors_are_verdicts():
    program = parse("fn f(x) { return x + true; }")
    suite = suite_of("test t { assert f(1) == 1; }")
    assert run_tests(program, suite).verdicts[0].error_kind == "type_error"


def test_non_bool_condition_is_type_error():
    program = parse("fn f(x) { if (x) { return 1; } return 0; }")
    suite = suite_of("test t { assert f(1) == 1; }")
    assert run_tests(program, suite).verdicts[0].error_kind == "type_error"


def test_mixed_equality_is_type_error():
    program = parse("fn f() { return 1; }")
    suite = suite_of("test t { assert f() == true; }")
    assert run_tests(program, suite).verdicts[0].error_kind == "type_error"


def test_unknown_call_in_test_body():
    program = parse("fn f() { return 1; }")
    suite = suite_of("test t { assert g() == 1; }")
    assert run_tests(program, suite).verdicts[0].error_kind == "unknown_call"


def test_arity_mismatch_in_test_body_is_unknown_call():
    program = parse("fn f(x) { return x; }")
    suite = suite_of("test t { assert f(1, 2) == 1; }")
    assert run_tests(program, suite).verdicts[0].error_kind == "unknown_call"


def test_fall_off_function_end_is_type_error():
    program = parse("fn f(x) { if (x > 0) { return 1; } }")
    suite = suite_of("test t { assert f(-5) == 1; }")
    assert run_tests(program, suite).verdicts[0].error_kind == "type_error"


def test_short_circuit_skips_rhs():
    program = parse("fn f(x) { if (x > 0 && 10 / x > 1) { return 1; } return 0; }")
    suite = suite_of("test t { assert f(0) == 0; }")
    report = run_tests(program, suite)
    assert report.all_passed()


def test_truncating_division_and_modulo():
    program = parse("fn q(a, b) { return a / b; }\nfn r(a, b) { return a % b; }")
    suite = suite_of("""
test t_div {
  assert q(7, 2) == 3;
  assert q(-7, 2) == -3;
  assert q(7, -2) == -3;
  assert q(-7, -2) == 3;
}
test t_mod {
  assert r(7, 2) == 1;
  assert r(-7, 2) == -1;
  assert r(7, -2) == 1;
  assert r(-7, -2) == -1;
}
""")
    report = run_tests(program, suite)
    assert report.all_passed(), report.verdicts


def test_arithmetic_wraps_at_64_bits():
    program = parse("fn quad(x) { return x * 4; }")
    # (2^62)*4 wraps to 0; (2^62+1)*4 wraps to 4; (2^62)*4 - 1 wraps to -1
    big = 2**62
    suite = suite_of(f"""
test t_wrap {{
  assert quad({big}) == 0;
  assert quad({big + 1}) == 4;
  assert quad({big}) - 1 == -1;
}}
""")
    report = run_tests(program, suite)
    assert report.all_passed(), report.verdicts


def test_negation_of_min_int_wraps():
    # -(-2^63) wraps back to -2^63
    program = parse(f"fn f() {{ return -(-{2**63 - 1} - 1); }}")
    suite = suite_of(f"test t {{ assert f() == -{2**63 - 1} - 1; }}")
    assert run_tests(program, suite).all_passed()


def test_coverage_tracks_branches_separately():
    program = parse("""
fn pick(x) {
  if (x > 0) {
    return 1;
  } else {
    return -1;
  }
}
""")
    suite = suite_of("""
test t_pos { assert pick(5) == 1; }
test t_neg { assert pick(-5) == -1; }
""")
    report = run_tests(program, suite)
    stmts = {type(s).__name__ + str(s.stmt_id): s.stmt_id
             for _, s in program_statements(program)}
    # stmt 0: if; stmt 1: return 1; stmt 2: return -1
    assert report.coverage[0] == frozenset({"t_pos", "t_neg"})
    assert report.coverage[1] == frozenset({"t_pos"})
    assert report.coverage[2] == frozenset({"t_neg"})


def test_coverage_only_references_program_statements():
    program = parse("fn f() { return 1; }")
    suite = suite_of("test t { let x = f(); assert x == 1; }")
    report = run_tests(program, suite)
    valid_ids = {s.stmt_id for _, s in program_statements(program)}
    assert set(report.coverage) <= valid_ids


def test_budget_one_still_terminates():
    program = parse("fn f() { return 1; }")
    suite = suite_of("test t { assert f() == 1; }")
    report = run_tests(program, suite, step_budget=1)
    assert report.verdicts[0].status == BUDGET_EXCEEDED
    assert report.total_steps <= 1


def test_invalid_budget_rejected():
    program = parse("fn f() { return 1; }")
    suite = suite_of("test t { assert f() == 1; }")
    with pytest.raises(ValueError):
        run_tests(program, suite, step_budget=0)


def test_repeated_runs_are_identical():
    program = parse("""
fn collatz_steps(n) {
  let steps = 0;
  let x = n;
  while (x > 1) {
    if (x % 2 == 0) {
      x = x / 2;
    } else {
      x = 3 * x + 1;
    }
    steps = steps + 1;
  }
  return steps;
}
""")
    suite = suite_of("""
test t_one { assert collatz_steps(1) == 0; }
test t_six { assert collatz_steps(6) == 8; }
test t_conv { assert collatz_steps(27) == 111; }
""")
    baseline = run_tests(program, suite)
    assert baseline.all_passed(), baseline.verdicts
    for _ in range(100):
        assert run_tests(program, suite) == baseline


def test_recursion_works_within_budget():
    program = parse("""
fn fact(n) {
  if (n <= 1) {
    return 1;
  }
  return n * fact(n - 1);
}
""")
    suite = suite_of("test t { assert fact(10) == 3628800; }")
    assert run_tests(program, suite).all_passed()


def test_unbounded_recursion_hits_budget():
    program = parse("fn f(n) { return f(n + 1); }")
    suite = suite_of("test t { assert f(0) == 1; }")
    report = run_tests(program, suite, step_budget=50_000)
    assert report.verdicts[0].status == BUDGET_EXCEEDED
