"""Corpus seeding: deterministic generation of projects with passing
baselines, single-edit injected bugs, environment-dependent (flaky)
failures, and ground-truth manifests.

Flaky failures are modeled honestly rather than by flipping a coin at
reproduction time: those projects carry a test whose step count fits
under the local interpreter budget but exceeds the (smaller) CI budget,
so the CI build fails with budget_exceeded while a local run passes.
"""

from __future__ import annotations

import math
import random
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from ..minilang import parse, parse_program, parse_suite, prettyprint, run_tests
from ..minilang.ast import (
    Binary, BoolLit, Call, IntLit, Program, Unary, Var,
    program_statements,
)
from ..repair.edits import AstEdit, apply_edit
from ..repair.operators import seedable_edits
from .build import DEFAULT_CI_STEP_BUDGET
from .core import CorpusManifest, ManifestEntry
from .repo import Commit, ProjectRepo, save_project

DEFAULT_LOCAL_STEP_BUDGET = 100_000
DEFAULT_HUMAN_DELAY_RANGE = (60, 2880)


class InvalidRate(Exception):
    pass


class SeedError(Exception):
    pass


# ----------------------------------------------------------- tiny evaluator

class _EvalError(Exception):
    pass


def _wrap(x: int) -> int:
    x &= (1 << 64) - 1
    return x - (1 << 64) if x >= (1 << 63) else x


def eval_call(program: Program, fname: str, args: Sequence[int],
              max_ops: int = 200_000):
    """Direct AST evaluation used to compute expected test outputs.

    Any runtime problem raises _EvalError; callers regenerate. Correctness
    of emitted tests is separately enforced by running them through the
    real interpreter before a project is accepted.
    """
    functions = {fn.name: fn for fn in program.functions}
    budget = [max_ops]

    class _Return(Exception):
        def __init__(self, value):
            self.value = value

    def tick():
        budget[0] -= 1
        if budget[0] <= 0:
            raise _EvalError("evaluation too long")

    def call(name, values):
        fn = functions.get(name)
        if fn is None or len(fn.params) != len(values):
            raise _EvalError("unknown call")
        env = dict(zip(fn.params, values))
        try:
            run_body(fn.body, env)
        except _Return as ret:
            return ret.value
        raise _EvalError("no return")

    def run_body(body, env):
        for stmt in body:
            tick()
            kind = type(stmt).__name__
            if kind in ("Let", "Assign"):
                env[stmt.name] = ev(stmt.value, env)
            elif kind == "If":
                if as_bool(ev(stmt.cond, env)):
                    run_body(stmt.then_body, env)
                elif stmt.else_body is not None:
                    run_body(stmt.else_body, env)
            elif kind == "While":
                while as_bool(ev(stmt.cond, env)):
                    tick()
                    run_body(stmt.body, env)
            elif kind == "Return":
                raise _Return(ev(stmt.value, env))
            elif kind == "ExprStmt":
                ev(stmt.expr, env)
            elif kind == "Block":
                run_body(stmt.body, env)
            else:
                raise _EvalError(f"statement {kind} not allowed here")

    def as_bool(v):
        if not isinstance(v, bool):
            raise _EvalError("type error")
        return v

    def as_int(v):
        if isinstance(v, bool):
            raise _EvalError("type error")
        return v

    def ev(expr, env):
        tick()
        if isinstance(expr, IntLit):
            return expr.value
        if isinstance(expr, BoolLit):
            return expr.value
        if isinstance(expr, Var):
            if expr.name not in env:
                raise _EvalError("unbound")
            return env[expr.name]
        if isinstance(expr, Call):
            return call(expr.name, [ev(a, env) for a in expr.args])
        if isinstance(expr, Unary):
            v = ev(expr.operand, env)
            return _wrap(-as_int(v)) if expr.op == "-" else not as_bool(v)
        if isinstance(expr, Binary):
            op = expr.op
            if op == "&&":
                return as_bool(ev(expr.left, env)) and as_bool(ev(expr.right, env))
            if op == "||":
                return as_bool(ev(expr.left, env)) or as_bool(ev(expr.right, env))
            a = ev(expr.left, env)
            b = ev(expr.right, env)
            if op in ("==", "!="):
                if isinstance(a, bool) != isinstance(b, bool):
                    raise _EvalError("type error")
                return (a == b) if op == "==" else (a != b)
            a, b = as_int(a), as_int(b)
            if op == "+":
                return _wrap(a + b)
            if op == "-":
                return _wrap(a - b)
            if op == "*":
                return _wrap(a * b)
            if op in ("/", "%"):
                if b == 0:
                    raise _EvalError("division by zero")
                q = abs(a) // abs(b)
                if (a < 0) != (b < 0):
                    q = -q
                return _wrap(q) if op == "/" else _wrap(a - q * b)
            if op == "<":
                return a < b
            if op == "<=":
                return a <= b
            if op == ">":
                return a > b
            if op == ">=":
                return a >= b
        raise _EvalError("bad expression")

    return call(fname, list(args))


# ------------------------------------------------------------- templates

def _fmt_int(value: int) -> str:
    return str(value)


_NAME_POOLS = {
    "fn": ["calc", "merge", "scan", "blend", "probe", "route", "tally",
           "weigh", "fold", "trim"],
    "helper": ["step", "scale", "clip", "wrap", "bump", "mix"],
}


class _Namer:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.used = set()

    def pick(self, pool: str) -> str:
        while True:
            base = self.rng.choice(_NAME_POOLS[pool])
            name = f"{base}{self.rng.randrange(10, 100)}"
            if name not in self.used:
                self.used.add(name)
                return name


def _template_loop_sum(rng, namer):
    helper = namer.pick("helper")
    main = namer.pick("fn")
    c0 = rng.randrange(0, 4)
    src = f"""
fn {helper}(a, n) {{
  let total = {c0};
  let i = 0;
  while (i < n) {{
    total = total + a;
    i = i + 1;
  }}
  return total;
}}
fn {main}(a, n, bias) {{
  let t = {helper}(a, n);
  if (t > bias) {{
    return t - bias;
  }}
  return bias - t;
}}
"""
    inputs = lambda: (rng.randrange(-9, 10), rng.randrange(0, 9), rng.randrange(-20, 21))
    return src, main, inputs


def _template_clamp(rng, namer):
    main = namer.pick("fn")
    spread = rng.randrange(2, 9)
    src = f"""
fn {main}(x, lo) {{
  let hi = lo + {spread};
  if (x < lo) {{
    return lo;
  }}
  if (x > hi) {{
    return hi;
  }}
  return x;
}}
"""
    inputs = lambda: (rng.randrange(-15, 26), rng.randrange(-5, 11))
    return src, main, inputs


def _template_wrap_mod(rng, namer):
    main = namer.pick("fn")
    src = f"""
fn {main}(x, m) {{
  let r = x % m;
  if (r < 0) {{
    r = r + m;
  }}
  return r;
}}
"""
    inputs = lambda: (rng.randrange(-30, 31), rng.randrange(1, 10))
    return src, main, inputs


def _template_biggest(rng, namer):
    main = namer.pick("fn")
    src = f"""
fn {main}(a, b, c) {{
  if (a >= b && a >= c) {{
    return a;
  }}
  if (b >= a && b >= c) {{
    return b;
  }}
  return c;
}}
"""
    inputs = lambda: (rng.randrange(-9, 10), rng.randrange(-9, 10), rng.randrange(-9, 10))
    return src, main, inputs


def _template_scaled_combo(rng, namer):
    helper = namer.pick("helper")
    main = namer.pick("fn")
    k = rng.randrange(2, 7)
    c = rng.randrange(0, 9)
    src = f"""
fn {helper}(x) {{
  return x * {k} + {c};
}}
fn {main}(x, y) {{
  let p = {helper}(x);
  let q = {helper}(y);
  if (p == q) {{
    return 0;
  }}
  if (p < q) {{
    return q - p;
  }}
  return p - q;
}}
"""
    inputs = lambda: (rng.randrange(-12, 13), rng.randrange(-12, 13))
    return src, main, inputs


def _template_halving(rng, namer):
    main = namer.pick("fn")
    src = f"""
fn {main}(n) {{
  let count = 0;
  let x = n;
  while (x > 0) {{
    if (x % 2 == 0) {{
      x = x / 2;
    }} else {{
      x = x - 1;
    }}
    count = count + 1;
  }}
  return count;
}}
"""
    inputs = lambda: (rng.randrange(0, 60),)
    return src, main, inputs


_TEMPLATES = [_template_loop_sum, _template_clamp, _template_wrap_mod,
              _template_biggest, _template_scaled_combo, _template_halving]


def _render_tests(tests: List[Tuple[str, List[str]]]) -> str:
    blocks = []
    for name, asserts in tests:
        lines = [f"test {name} {{"] + [f"  assert {a};" for a in asserts] + ["}"]
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


def _call_text(fname: str, args: Sequence[int]) -> str:
    return f"{fname}({', '.join(_fmt_int(a) for a in args)})"


def _generate_baseline(rng: random.Random):
    """One baseline project: canonical sources, passing tests, held-out pool.

    Returns (src_text, tests_text, heldout_text, program, main_fn).
    """
    namer = _Namer(rng)
    template = rng.choice(_TEMPLATES)
    raw_src, main, inputs = template(rng, namer)
    program = parse(raw_src.strip() + "\n", "src/main.mini")
    src_text = prettyprint(program)
    program = parse(src_text, "src/main.mini")

    seen_inputs = set()

    def fresh_assert() -> Optional[str]:
        for _ in range(30):
            args = inputs()
            if args in seen_inputs:
                continue
            seen_inputs.add(args)
            try:
                value = eval_call(program, main, args)
            except _EvalError:
                continue
            if isinstance(value, bool):
                continue
            return f"{_call_text(main, args)} == {_fmt_int(value)}"
        return None

    n_tests = rng.randrange(2, 5)
    tests = []
    for t in range(n_tests):
        n_asserts = rng.randrange(1, 3)
        asserts = []
        for _ in range(n_asserts):
            text = fresh_assert()
            if text:
                asserts.append(text)
        if asserts:
            tests.append((f"t_{main}_{t + 1}", asserts))
    if not tests:
        raise SeedError("could not derive tests for baseline")

    heldout = []
    for _ in range(2):
        text = fresh_assert()
        if text:
            heldout.append(text)
    heldout_tests = [(f"t_{main}_heldout_{i + 1}", [a]) for i, a in enumerate(heldout)]

    return src_text, _render_tests(tests), _render_tests(heldout_tests), program, main


def _inject_bug(rng: random.Random, program: Program, tests_text: str,
                ci_budget: int, local_budget: int):
    """Pick a single-edit mutation that breaks the suite identically under
    both budgets. Returns (buggy_src, injected_edit, reverse_edit,
    failing_tests) or None."""
    suite = parse_suite({"tests/main_test.mini": tests_text})
    sites = []
    for _, stmt in program_statements(program):
        for edit in seedable_edits(stmt):
            sites.append(edit)
    if not sites:
        return None
    order = list(range(len(sites)))
    rng.shuffle(order)
    for idx in order[:40]:
        edit = sites[idx]
        try:
            buggy = apply_edit(program, edit)
        except Exception:
            continue
        buggy_src = prettyprint(buggy)
        if buggy_src == prettyprint(program):
            continue
        ci_report = run_tests(buggy, suite, ci_budget)
        failing_ci = set(ci_report.failing_test_names())
        if not failing_ci:
            continue
        local_report = run_tests(buggy, suite, local_budget)
        if set(local_report.failing_test_names()) != failing_ci:
            continue
        reverse = AstEdit(
            kind=edit.kind,
            stmt_id=edit.stmt_id,
            path=edit.path,
            operator=edit.operator,
            before_src=edit.after_src,
            after_src=edit.before_src,
        )
        # The reverse edit must itself be in the mutation space, or the
        # seeded bug would not be single-edit repairable (e.g. c -> 0 is
        # only invertible when |c| == 1).
        buggy_stmt = next(s for _, s in program_statements(buggy)
                          if s.stmt_id == edit.stmt_id)
        if not any(e.path == reverse.path
                   and e.before_src == reverse.before_src
                   and e.after_src == reverse.after_src
                   for e in seedable_edits(buggy_stmt)):
            continue
        fixed = apply_edit(buggy, reverse)
        if prettyprint(fixed) != prettyprint(program):
            continue
        ordered_failing = [v.name for v in ci_report.verdicts if v.failed()]
        return buggy_src, edit, reverse, ordered_failing
    return None


_SLOW_TEMPLATE = """
fn {spin}(n) {{
  let i = 0;
  let acc = 0;
  while (i < n) {{
    acc = acc + 2;
    i = i + 1;
  }}
  return acc;
}}
"""


def _make_flaky_project(rng: random.Random, ci_budget: int, local_budget: int):
    """Baseline plus a test that only fits in the local step budget."""
    src_text, tests_text, heldout_text, program, main = _generate_baseline(rng)
    namer = _Namer(rng)
    spin = namer.pick("helper") + "spin"
    slow_src = _SLOW_TEMPLATE.format(spin=spin)
    combined = src_text + "\n" + prettyprint(parse(slow_src.strip() + "\n"))

    # Calibrate the loop bound: aim midway between the two budgets.
    target_steps = min(3 * ci_budget, (ci_budget + local_budget) // 2)
    probe_n = 500
    program_all = parse(combined, "src/main.mini")
    probe_suite = parse_suite(
        {"tests/probe.mini": f"test t_probe {{ assert {spin}({probe_n}) == {probe_n * 2}; }}"})
    probe_steps = run_tests(program_all, probe_suite, local_budget).total_steps
    per_iter = max((probe_steps - 10) / probe_n, 1.0)
    n = int((target_steps - 10) / per_iter)
    slow_test = (f"t_{spin}_heavy", [f"{spin}({n}) == {n * 2}"])

    tests_text = tests_text + "\n" + _render_tests([slow_test])
    return combined, tests_text, heldout_text, slow_test[0]


def seed_corpus(out_dir, n_projects: int, fail_rate: float, flaky_rate: float,
                seed: int,
                human_delay_range: Tuple[int, int] = DEFAULT_HUMAN_DELAY_RANGE,
                ci_step_budget: int = DEFAULT_CI_STEP_BUDGET,
                local_step_budget: int = DEFAULT_LOCAL_STEP_BUDGET) -> CorpusManifest:
    """Generate a corpus; same arguments produce byte-identical trees.

    Exactly ceil(fail_rate * n_projects) head builds fail on CI, of which
    round(flaky_rate * n_failing) are environment-dependent and pass
    locally.
    """
    if not (0.0 <= fail_rate <= 1.0) or not (0.0 <= flaky_rate <= 1.0):
        raise InvalidRate(f"rates must be within [0, 1]: {fail_rate}, {flaky_rate}")
    if n_projects < 0:
        raise InvalidRate("n_projects must be non-negative")

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    master = random.Random(seed)
    n_failing = math.ceil(fail_rate * n_projects)
    failing_positions = sorted(master.sample(range(n_projects), n_failing))
    n_flaky = round(flaky_rate * n_failing)
    flaky_positions = set(sorted(master.sample(failing_positions, n_flaky)))

    manifest = CorpusManifest(params={
        "n_projects": n_projects,
        "fail_rate": fail_rate,
        "flaky_rate": flaky_rate,
        "seed": seed,
        "human_fix_delay_range": list(human_delay_range),
        "ci_step_budget": ci_step_budget,
        "local_step_budget": local_step_budget,
    })

    for index in range(n_projects):
        project_id = f"p{index + 1:04d}"
        kind = ("flaky" if index in flaky_positions
                else "buggy" if index in set(failing_positions)
                else "healthy")
        for attempt in range(50):
            rng = random.Random(seed * 1_000_003 + index * 101 + attempt)
            try:
                entry = _build_project(out, project_id, kind, rng,
                                       human_delay_range, ci_step_budget,
                                       local_step_budget)
            except SeedError:
                continue
            if entry is not None:
                manifest.projects[project_id] = entry
                break
        else:
            raise SeedError(f"could not generate project {project_id} ({kind})")

    manifest.save(out / "corpus.manifest.json")
    return manifest


def _build_project(out: Path, project_id: str, kind: str, rng: random.Random,
                   human_delay_range, ci_budget, local_budget) -> Optional[ManifestEntry]:
    heldout_name = "tests_heldout/heldout.mini"
    if kind == "healthy":
        src_text, tests_text, heldout_text, _, _ = _generate_baseline(rng)
        files = {"src/main.mini": src_text, "tests/main_test.mini": tests_text}
        entry = ManifestEntry(project_id, "healthy", "c1", None, None, None, [])
    elif kind == "flaky":
        src_text, tests_text, heldout_text, slow_name = _make_flaky_project(
            rng, ci_budget, local_budget)
        files = {"src/main.mini": src_text, "tests/main_test.mini": tests_text}
        entry = ManifestEntry(
            project_id, "flaky", "c1",
            rng.randint(*human_delay_range), None, None, [slow_name])
    else:
        src_text, tests_text, heldout_text, program, _ = _generate_baseline(rng)
        injected = _inject_bug(rng, program, tests_text, ci_budget, local_budget)
        if injected is None:
            return None
        buggy_src, edit, reverse, failing = injected
        files = {
            "src/main.mini": buggy_src,
            "tests/main_test.mini": tests_text,
            heldout_name: heldout_text,
        }
        entry = ManifestEntry(
            project_id, "buggy", "c1",
            rng.randint(*human_delay_range),
            edit.to_dict(), reverse.to_dict(), failing)

    _verify_expectations(files, kind, ci_budget, local_budget, entry)
    save_project(out, ProjectRepo(project_id, [Commit("c1", 0, files)]))
    return entry


def _verify_expectations(files, kind, ci_budget, local_budget, entry) -> None:
    """Reject any generated project that does not behave as promised."""
    sources = {p: t for p, t in files.items() if p.startswith("src/")}
    tests = {p: t for p, t in files.items() if p.startswith("tests/")}
    program = parse_program(sources)
    suite = parse_suite(tests)
    ci_failing = set(run_tests(program, suite, ci_budget).failing_test_names())
    local_failing = set(run_tests(program, suite, local_budget).failing_test_names())
    if kind == "healthy":
        if ci_failing or local_failing:
            raise SeedError("healthy project fails")
    elif kind == "flaky":
        if not ci_failing or local_failing:
            raise SeedError("flaky project must fail on CI and pass locally")
    else:
        if not ci_failing or ci_failing != local_failing:
            raise SeedError("buggy project must fail identically in both environments")
        if set(entry.ci_failing_tests) != ci_failing:
            raise SeedError("manifest failing set out of date")
