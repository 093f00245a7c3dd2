import pytest

from repairbot.minilang import parse, parse_program, parse_suite, prettyprint
from repairbot.minilang.ast import Return, program_statements
from repairbot.minilang.parser import ParseError, ResolveError

INC = "fn inc(x) { return x + 1; }"


def test_parse_single_function():
    program = parse(INC)
    assert len(program.functions) == 1
    fn = program.functions[0]
    assert fn.name == "inc"
    assert fn.params == ("x",)
    assert len(fn.body) == 1
    assert isinstance(fn.body[0], Return)


def test_parse_malformed_input_reports_position_and_expectation():
    with pytest.raises(ParseError) as exc:
        parse("fn f( { }")
    assert exc.value.line == 1
    assert "expected" in str(exc.value)


def test_roundtrip_reparse_is_identity():
    source = """
fn clamp(x, lo, hi) {
  if (x < lo) {
    return lo;
  }
  if (x > hi) {
    return hi;
  }
  return x;
}

fn scan(n) {
  let total = 0;
  let i = 0;
  while (i < n) {
    if (i % 2 == 0 && total < 100) {
      total = total + i;
    } else {
      total = total - 1;
    }
    i = i + 1;
  }
  return total;
}
"""
    first = parse(source)
    second = parse(prettyprint(first))
    assert first == second


def test_stmt_ids_are_dense_preorder():
    program = parse("""
fn a(x) {
  let y = 1;
  if (x > 0) {
    y = 2;
    while (y < 10) {
      y = y + 1;
    }
  } else {
    y = 3;
  }
  return y;
}
fn b() { return 0; }
""")
    ids = [stmt.stmt_id for _, stmt in program_statements(program)]
    assert ids == list(range(len(ids)))
    # Preorder: let, if, then-assign, while, inner-assign, else-assign, return, b's return
    kinds = [type(stmt).__name__ for _, stmt in program_statements(program)]
    assert kinds == ["Let", "If", "Assign", "While", "Assign", "Assign", "Return", "Return"]


def test_stmt_ids_stable_under_prettyprint_reparse():
    program = parse("fn f(a) { let b = a * 2; if (b > 4) { return b; } return a; }")
    reparsed = parse(prettyprint(program))
    original_ids = [s.stmt_id for _, s in program_statements(program)]
    reparsed_ids = [s.stmt_id for _, s in program_statements(reparsed)]
    assert original_ids == reparsed_ids


def test_unknown_identifier_rejected():
    with pytest.raises(ResolveError, match="unknown identifier 'y'"):
        parse("fn f(x) { return y; }")


def test_use_before_let_rejected():
    with pytest.raises(ResolveError, match="unknown identifier"):
        parse("fn f() { let a = b; let b = 1; return a; }")


def test_let_scoped_to_block():
    with pytest.raises(ResolveError, match="unknown identifier 'tmp'"):
        parse("fn f(x) { if (x > 0) { let tmp = 1; } return tmp; }")


def test_duplicate_function_rejected():
    with pytest.raises(ResolveError, match="duplicate function"):
        parse("fn f() { return 1; } fn f() { return 2; }")


def test_duplicate_let_rejected():
    with pytest.raises(ResolveError, match="duplicate variable"):
        parse("fn f() { let a = 1; let a = 2; return a; }")


def test_call_arity_checked_in_program():
    with pytest.raises(ResolveError, match="expects 1 argument"):
        parse("fn g(x) { return x; } fn f() { return g(1, 2); }")


def test_unknown_function_rejected_in_program():
    with pytest.raises(ResolveError, match="unknown function"):
        parse("fn f() { return g(1); }")


def test_assert_rejected_outside_tests():
    with pytest.raises(ParseError, match="only allowed in test bodies"):
        parse("fn f() { assert 1 == 1; return 0; }")


def test_return_rejected_in_tests():
    with pytest.raises(ParseError, match="not allowed in test bodies"):
        parse_suite({"t.mini": "test t { return 1; }"})


def test_test_without_assert_rejected():
    with pytest.raises(ResolveError, match="contains no assert"):
        parse_suite({"t.mini": "test t { let a = 1; }"})


def test_duplicate_test_name_rejected():
    with pytest.raises(ResolveError, match="duplicate test"):
        parse_suite({"t.mini": "test t { assert true; } test t { assert true; }"})


def test_suite_calls_are_not_resolved_at_parse_time():
    suite = parse_suite({"t.mini": "test t { assert nothere(1) == 2; }"})
    assert suite.tests[0].name == "t"


def test_multifile_program_ids_follow_sorted_paths():
    program = parse_program({
        "src/b.mini": "fn beta() { return 2; }",
        "src/a.mini": "fn alpha() { return 1; }",
    })
    assert [fn.name for fn in program.functions] == ["alpha", "beta"]
    ids = [s.stmt_id for _, s in program_statements(program)]
    assert ids == [0, 1]


def test_integer_literal_out_of_range():
    with pytest.raises(ParseError, match="out of range"):
        parse(f"fn f() {{ return {2**63}; }}")


def test_comments_are_skipped():
    program = parse("fn f() { // setup\n  return 1; // done\n}")
    assert len(program.functions[0].body) == 1
