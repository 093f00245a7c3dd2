#!/usr/bin/env python3
"""Benchmark the interpreter kernels against each other.

Workloads mirror what the repair pipeline actually does: straight-line
suites, loop-heavy programs, recursion, and a burst of candidate
validations over a seeded bug. Results also cross-check that every
kernel produced identical reports.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import sys
import time

from repairbot.minilang import parse, parse_suite, run_tests
from repairbot.minilang.kernel import available_kernels

LOOPY = """
fn churn(n, k) {
  let total = 0;
  let i = 0;
  while (i < n) {
    if (i % k == 0) {
      total = total + i * 3;
    } else {
      total = total - 1;
    }
    i = i + 1;
  }
  return total;
}
"""

RECURSIVE = """
fn fib(n) {
  if (n < 2) {
    return n;
  }
  return fib(n - 1) + fib(n - 2);
}
"""

STRAIGHT = """
fn mix(a, b, c) {
  let p = a * b + c;
  let q = p % 7 - b / 2;
  let r = p * q - a;
  if (r < 0 && p > q || c == 0) {
    return r + p;
  }
  return r - q;
}
"""


def workload_suites():
    yield "loops", parse(LOOPY), parse_suite({"t.mini": """
test t_small { assert churn(500, 3) != 0; }
test t_big { assert churn(4000, 7) != 0; }
"""})
    yield "recursion", parse(RECURSIVE), parse_suite({"t.mini": """
test t_fib { assert fib(17) == 1597; }
"""})
    yield "straightline", parse(STRAIGHT), parse_suite({"t.mini": "\n".join(
        f"test t_{i} {{ assert mix({i}, {i + 3}, {i % 5}) == mix({i}, {i + 3}, {i % 5}); }}"
        for i in range(40))})


def candidate_burst_workload():
    """Validation burst: run the suite over many mutated programs."""
    from repairbot.repair import generate_candidates, localize, validate

    source = """
fn cap(x, lo, hi) {
  let out = x;
  if (out < lo) {
    out = lo;
  }
  if (out > hi) {
    out = hi;
  }
  return out;
}
"""
    tests = """
test t_mid { assert cap(5, 0, 10) == 5; }
test t_low { assert cap(-3, 0, 10) == 0; }
test t_hi { assert cap(30, 0, 10) == 10; }
test t_edge { assert cap(10, 0, 10) == 10; }
"""
    suite = parse_suite({"t.mini": tests})
    buggy = parse(source.replace("out > hi", "out < hi"))
    report = run_tests(buggy, suite)
    suspects = localize(report) if report.failing_test_names() else []
    patches = list(generate_candidates(buggy, suspects, 400))
    return buggy, suite, patches


def bench_run_tests(kernel, program, suite, repeat):
    timings = []
    report = None
    for _ in range(repeat):
        start = time.perf_counter()
        report = run_tests(program, suite, kernel=kernel)
        timings.append(time.perf_counter() - start)
    return min(timings), report


def bench_burst(kernel, buggy, suite, patches, repeat):
    from repairbot.repair import validate

    timings = []
    outcome = None
    for _ in range(repeat):
        start = time.perf_counter()
        plausible = 0
        for patch in patches:
            patch.status = "candidate"
            if validate(buggy, patch, suite).plausible:
                plausible += 1
        timings.append(time.perf_counter() - start)
        outcome = plausible
    return min(timings), outcome


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    kernels = available_kernels()
    print(f"kernels available: {', '.join(kernels)}")
    if len(kernels) < 2:
        print("note: compiled kernel not built; benchmarking the fallback alone")

    rows = []
    for name, program, suite in workload_suites():
        reports = {}
        for kname, kernel in kernels.items():
            best, report = bench_run_tests(kernel, program, suite, args.repeat)
            steps = report.total_steps
            rows.append((name, kname, best, steps / best / 1e6))
            reports[kname] = report
        if len(set(map(repr, reports.values()))) != 1:
            print(f"!! kernel mismatch on workload {name}", file=sys.stderr)
            return 1

    buggy, suite, patches = candidate_burst_workload()
    burst_outcomes = {}
    for kname, kernel in kernels.items():
        import repairbot.minilang.kernel as kernel_mod
        previous = kernel_mod._active
        kernel_mod._active = kernel
        try:
            best, outcome = bench_burst(kernel, buggy, suite, patches, args.repeat)
        finally:
            kernel_mod._active = previous
        rows.append((f"candidate-burst[{len(patches)}]", kname, best, None))
        burst_outcomes[kname] = outcome
    if len(set(burst_outcomes.values())) != 1:
        print("!! kernels disagree on plausible counts", file=sys.stderr)
        return 1

    print(f"\n{'workload':<24} {'kernel':<14} {'best (ms)':>10} {'Msteps/s':>10}")
    print("-" * 62)
    base_times = {}
    for workload, kname, best, throughput in rows:
        base_times.setdefault(workload, {})[kname] = best
        rate = f"{throughput:10.1f}" if throughput else " " * 10
        print(f"{workload:<24} {kname:<14} {best * 1000:10.2f} {rate}")
    if len(kernels) == 2:
        print("\nspeedup (pure-python / cython):")
        for workload, times in base_times.items():
            if len(times) == 2:
                ratio = times["pure-python"] / times["cython"]
                print(f"  {workload:<24} {ratio:6.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
