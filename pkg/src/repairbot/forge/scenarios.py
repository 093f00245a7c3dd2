"""Hand-crafted fixture forges.

write_canonical_scenario: one project whose repair run reproduces the
canonical timeline minute for minute with default knobs: commit at T+0,
build fails at T+2, detected at T+42, patch in hand at T+52 (the 2000
candidate budget at 0.005 min each), PR opened at T+69, merged at T+104.
The project is sized so the single-edit candidate space exceeds the
default budget and contains a plausible fix well inside it; both facts
are verified at write time.

write_overfit_scenario: a minimal project where the build suite
underdetermines the fix, so the search finds both the ground-truth
repair and a degenerate constant patch that passes the build suite but
fails the held-out tests.
"""

from __future__ import annotations

from pathlib import Path

from ..minilang import parse, parse_suite, prettyprint, run_tests
from ..repair import generate_candidates, localize, validate
from .build import DEFAULT_CI_STEP_BUDGET
from .core import CorpusManifest, ManifestEntry
from .repo import Commit, ProjectRepo, save_project
from .seed import DEFAULT_LOCAL_STEP_BUDGET, SeedError, eval_call

CANONICAL_BUDGET = 2_000

# Truth version; the shipped head carries `rim < cap` instead of `rim <= cap`.
_CANONICAL_SRC = """\
fn border(w, h, pad, cap, base) {
  let inner_w = w - 2 * pad;
  let inner_h = h - 2 * pad;
  let rim = w * h - inner_w * inner_h;
  let trim = offset(rim, cap);
  if (rim <= cap) {
    trim = trim + rim * 3;
  } else {
    trim = trim + cap * 2;
  }
  let i = 0;
  let acc = base + trim % 7;
  while (i < pad) {
    acc = acc + inner_w + i * 2;
    i = i + 1;
  }
  let span = offset(acc, trim);
  let blend = acc * 2 - span + base;
  if (acc > trim + base) {
    let top = blend + rim - pad * 4;
    return top - cap + base * 2;
  }
  let low = span + inner_h * 3 - pad;
  return low + trim - base * 3 + acc;
}

fn offset(a, b) {
  if (a < b) {
    return b - a;
  }
  return a - b;
}

fn scale(v, k) {
  let out = v * k + v % (k + 3);
  return out;
}
"""

# (w, h, pad, cap, base): the first two sit exactly on the rim == cap
# boundary, so only they observe the `<` vs `<=` defect.
_CANONICAL_INPUTS = [
    ("t_border_edge_narrow", (10, 8, 1, 32, 5)),
    ("t_border_edge_wide", (6, 6, 1, 20, 3)),
    ("t_border_inside", (8, 6, 1, 40, 2)),
    ("t_border_outside", (12, 10, 2, 30, 4)),
    ("t_offset_basic", None),
    ("t_scale_basic", None),
]


def _canonical_tests(program) -> str:
    blocks = []
    for name, args in _CANONICAL_INPUTS:
        if name == "t_offset_basic":
            value = eval_call(program, "offset", (9, 4))
            body = f"  assert offset(9, 4) == {value};"
        elif name == "t_scale_basic":
            value = eval_call(program, "scale", (7, 4))
            body = f"  assert scale(7, 4) == {value};"
        else:
            value = eval_call(program, "border", args)
            rendered = ", ".join(str(a) for a in args)
            body = f"  assert border({rendered}) == {value};"
        blocks.append(f"test {name} {{\n{body}\n}}\n")
    return "\n".join(blocks)


def write_canonical_scenario(out_dir) -> CorpusManifest:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    truth = parse(_CANONICAL_SRC, "src/main.mini")
    truth_src = prettyprint(truth)
    buggy_src = truth_src.replace("if (rim <= cap) {", "if (rim < cap) {")
    if buggy_src == truth_src:
        raise SeedError("canonical bug site not found")
    tests_text = _canonical_tests(truth)

    buggy = parse(buggy_src, "src/main.mini")
    suite = parse_suite({"tests/main_test.mini": tests_text})

    report = run_tests(buggy, suite, DEFAULT_CI_STEP_BUDGET)
    failing = report.failing_test_names()
    if set(failing) != {"t_border_edge_narrow", "t_border_edge_wide"}:
        raise SeedError(f"canonical scenario must fail exactly the two edge tests, "
                        f"got {failing}")
    if not run_tests(parse(truth_src, "src/main.mini"), suite,
                     DEFAULT_LOCAL_STEP_BUDGET).all_passed():
        raise SeedError("canonical truth program must pass its suite")

    # The replay timeline needs the search to run to its full budget and
    # still find a plausible patch: verify both properties now.
    suspects = localize(run_tests(buggy, suite, DEFAULT_LOCAL_STEP_BUDGET))
    emitted = 0
    first_plausible = None
    for patch in generate_candidates(buggy, suspects, CANONICAL_BUDGET):
        emitted += 1
        if first_plausible is None and validate(
                buggy, patch, suite, DEFAULT_LOCAL_STEP_BUDGET).plausible:
            first_plausible = patch.candidate_index
    if emitted < CANONICAL_BUDGET:
        raise SeedError(f"canonical candidate space too small: {emitted}")
    if first_plausible is None:
        raise SeedError("no plausible patch within the canonical budget")

    files = {"src/main.mini": buggy_src, "tests/main_test.mini": tests_text}
    save_project(out, ProjectRepo("p0001", [Commit("c1", 0, files)]))

    from ..minilang.ast import If, program_statements
    from ..minilang.printer import format_expr
    bug_stmt_id = next(
        s.stmt_id for _, s in program_statements(buggy)
        if isinstance(s, If) and format_expr(s.cond) == "rim < cap")
    manifest = CorpusManifest(params={
        "scenario": "canonical",
        "n_projects": 1,
        "fail_rate": 1.0,
        "flaky_rate": 0.0,
        "seed": 0,
        "human_fix_delay_range": [600, 600],
    })
    manifest.projects["p0001"] = ManifestEntry(
        project_id="p0001",
        kind="buggy",
        head_commit="c1",
        human_fix_delay=600,
        injected={"kind": "replace_expr", "stmt_id": bug_stmt_id, "path": ["cond"],
                  "operator": "relational_replacement",
                  "before": "rim <= cap", "after": "rim < cap"},
        ground_truth_fix={"kind": "replace_expr", "stmt_id": bug_stmt_id,
                          "path": ["cond"], "operator": "relational_replacement",
                          "before": "rim < cap", "after": "rim <= cap"},
        ci_failing_tests=list(failing),
    )
    manifest.save(out / "corpus.manifest.json")
    return manifest


_OVERFIT_SRC = """\
fn grade(x) {
  if (x <= 10) {
    return 0;
  }
  return 1;
}
"""

_OVERFIT_TESTS = """\
test t_edge {
  assert grade(10) == 0;
}

test t_low {
  assert grade(3) == 0;
}
"""

_OVERFIT_HELDOUT = """\
test t_above {
  assert grade(15) == 1;
}

test t_just_above {
  assert grade(11) == 1;
}
"""


def write_overfit_scenario(out_dir) -> CorpusManifest:
    """Build suite only probes x <= 10, so zeroing the other return is
    plausible yet wrong; held-out tests above the boundary expose it."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    truth_src = prettyprint(parse(_OVERFIT_SRC, "src/main.mini"))
    buggy_src = truth_src.replace("x <= 10", "x < 10")
    buggy = parse(buggy_src, "src/main.mini")
    suite = parse_suite({"tests/main_test.mini": _OVERFIT_TESTS})
    heldout = parse_suite({"tests_heldout/heldout.mini": _OVERFIT_HELDOUT})

    report = run_tests(buggy, suite, DEFAULT_CI_STEP_BUDGET)
    if report.failing_test_names() != ("t_edge",):
        raise SeedError("overfit scenario must fail exactly t_edge")
    truth = parse(truth_src, "src/main.mini")
    if not run_tests(truth, suite).all_passed():
        raise SeedError("overfit truth program must pass the build suite")
    if not run_tests(truth, heldout).all_passed():
        raise SeedError("overfit truth program must pass the held-out tests")

    files = {
        "src/main.mini": buggy_src,
        "tests/main_test.mini": _OVERFIT_TESTS,
        "tests_heldout/heldout.mini": _OVERFIT_HELDOUT,
    }
    save_project(out, ProjectRepo("p0001", [Commit("c1", 0, files)]))

    manifest = CorpusManifest(params={
        "scenario": "overfit",
        "n_projects": 1,
        "fail_rate": 1.0,
        "flaky_rate": 0.0,
        "seed": 0,
        "human_fix_delay_range": [240, 240],
    })
    manifest.projects["p0001"] = ManifestEntry(
        project_id="p0001",
        kind="buggy",
        head_commit="c1",
        human_fix_delay=240,
        injected={"kind": "replace_expr", "stmt_id": 0, "path": ["cond"],
                  "operator": "relational_replacement",
                  "before": "x <= 10", "after": "x < 10"},
        ground_truth_fix={"kind": "replace_expr", "stmt_id": 0, "path": ["cond"],
                          "operator": "relational_replacement",
                          "before": "x < 10", "after": "x <= 10"},
        ci_failing_tests=["t_edge"],
    )
    manifest.save(out / "corpus.manifest.json")
    return manifest
