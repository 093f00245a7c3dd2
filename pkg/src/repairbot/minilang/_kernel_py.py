"""Pure-Python interpreter kernel.

Executes the instruction stream produced by :mod:`repairbot.minilang.bytecode`.
The compiled Cython kernel (``_kernel.pyx``) mirrors this loop instruction
for instruction; both must stay bit-identical in verdicts, coverage, and
step counts. MiniLang integers are 64-bit two's complement with wrapping
arithmetic and truncating division.
"""

from __future__ import annotations

from .bytecode import (
    ERR_DIV_ZERO,
    ERR_TYPE,
    ERR_UNKNOWN_CALL,
    OP_AND_SC,
    OP_ASSERT,
    OP_BADCALL,
    OP_BINOP,
    OP_CALL,
    OP_CHECK_BOOL,
    OP_COV,
    OP_FALLOFF,
    OP_HALT,
    OP_JF,
    OP_JUMP,
    OP_LOAD,
    OP_OR_SC,
    OP_POP,
    OP_PUSH_BOOL,
    OP_PUSH_INT,
    OP_RET,
    OP_STORE,
    OP_UNOP,
    VERDICT_BUDGET,
    VERDICT_ERROR,
    VERDICT_FAIL,
    VERDICT_PASS,
)

KERNEL_NAME = "pure-python"

_MASK = (1 << 64) - 1
_SIGN = 1 << 63

TAG_INT = 0
TAG_BOOL = 1


def execute(code, func_entries, func_nparams, func_nlocals,
            test_entries, test_nlocals, n_stmts, step_budget):
    """Run every test body; returns (verdicts, coverage, steps_per_test).

    verdicts: list of (verdict_code, detail) per test.
    coverage: bytearray of length n_tests * n_stmts, row per test.
    """
    code = list(code)
    func_entries = list(func_entries)
    func_nparams = list(func_nparams)
    func_nlocals = list(func_nlocals)
    test_entries = list(test_entries)
    test_nlocals = list(test_nlocals)

    n_tests = len(test_entries)
    coverage = bytearray(n_tests * n_stmts)
    verdicts = []
    steps_per_test = []

    for t in range(n_tests):
        verdict, detail, steps = _run_one(
            code, func_entries, func_nparams, func_nlocals,
            test_entries[t], test_nlocals[t],
            coverage, t * n_stmts, step_budget)
        verdicts.append((verdict, detail))
        steps_per_test.append(steps)
    return verdicts, coverage, steps_per_test


def _run_one(code, func_entries, func_nparams, func_nlocals,
             entry, entry_nlocals, coverage, cov_base, budget):
    vals = []
    tags = []
    loc_vals = [0] * entry_nlocals
    loc_tags = [0] * entry_nlocals
    frames = []  # (return_pc, caller_locals_base)
    base = 0
    pc = entry
    steps = 0

    while True:
        if steps == budget:
            return VERDICT_BUDGET, 0, steps
        op = code[pc]
        arg = code[pc + 1]
        pc += 2
        steps += 1

        if op == OP_COV:
            coverage[cov_base + arg] = 1
        elif op == OP_PUSH_INT:
            vals.append(arg)
            tags.append(TAG_INT)
        elif op == OP_PUSH_BOOL:
            vals.append(arg)
            tags.append(TAG_BOOL)
        elif op == OP_LOAD:
            idx = base + arg
            vals.append(loc_vals[idx])
            tags.append(loc_tags[idx])
        elif op == OP_STORE:
            idx = base + arg
            loc_vals[idx] = vals.pop()
            loc_tags[idx] = tags.pop()
        elif op == OP_JUMP:
            pc = arg
        elif op == OP_JF:
            v = vals.pop()
            if tags.pop() != TAG_BOOL:
                return VERDICT_ERROR, ERR_TYPE, steps
            if v == 0:
                pc = arg
        elif op == OP_AND_SC:
            if tags[-1] != TAG_BOOL:
                return VERDICT_ERROR, ERR_TYPE, steps
            if vals[-1] == 0:
                pc = arg
            else:
                vals.pop()
                tags.pop()
        elif op == OP_OR_SC:
            if tags[-1] != TAG_BOOL:
                return VERDICT_ERROR, ERR_TYPE, steps
            if vals[-1] != 0:
                pc = arg
            else:
                vals.pop()
                tags.pop()
        elif op == OP_CHECK_BOOL:
            if tags[-1] != TAG_BOOL:
                return VERDICT_ERROR, ERR_TYPE, steps
        elif op == OP_BINOP:
            b = vals.pop()
            tb = tags.pop()
            a = vals.pop()
            ta = tags.pop()
            if arg <= 8:
                if ta != TAG_INT or tb != TAG_INT:
                    return VERDICT_ERROR, ERR_TYPE, steps
                if arg == 0:
                    r = (a + b) & _MASK
                    if r >= _SIGN:
                        r -= 1 << 64
                    vals.append(r)
                    tags.append(TAG_INT)
                elif arg == 1:
                    r = (a - b) & _MASK
                    if r >= _SIGN:
                        r -= 1 << 64
                    vals.append(r)
                    tags.append(TAG_INT)
                elif arg == 2:
                    r = (a * b) & _MASK
                    if r >= _SIGN:
                        r -= 1 << 64
                    vals.append(r)
                    tags.append(TAG_INT)
                elif arg == 3 or arg == 4:
                    if b == 0:
                        return VERDICT_ERROR, ERR_DIV_ZERO, steps
                    q = abs(a) // abs(b)
                    if (a < 0) != (b < 0):
                        q = -q
                    if arg == 3:
                        r = q & _MASK
                    else:
                        r = (a - q * b) & _MASK
                    if r >= _SIGN:
                        r -= 1 << 64
                    vals.append(r)
                    tags.append(TAG_INT)
                elif arg == 5:
                    vals.append(1 if a < b else 0)
                    tags.append(TAG_BOOL)
                elif arg == 6:
                    vals.append(1 if a <= b else 0)
                    tags.append(TAG_BOOL)
                elif arg == 7:
                    vals.append(1 if a > b else 0)
                    tags.append(TAG_BOOL)
                else:  # arg == 8
                    vals.append(1 if a >= b else 0)
                    tags.append(TAG_BOOL)
            else:  # ==, != require same-type operands
                if ta != tb:
                    return VERDICT_ERROR, ERR_TYPE, steps
                if arg == 9:
                    vals.append(1 if a == b else 0)
                else:
                    vals.append(1 if a != b else 0)
                tags.append(TAG_BOOL)
        elif op == OP_UNOP:
            if arg == 0:
                if tags[-1] != TAG_INT:
                    return VERDICT_ERROR, ERR_TYPE, steps
                r = (-vals[-1]) & _MASK
                if r >= _SIGN:
                    r -= 1 << 64
                vals[-1] = r
            else:
                if tags[-1] != TAG_BOOL:
                    return VERDICT_ERROR, ERR_TYPE, steps
                vals[-1] = 1 - vals[-1]
        elif op == OP_CALL:
            nparams = func_nparams[arg]
            nlocals = func_nlocals[arg]
            new_base = len(loc_vals)
            loc_vals.extend([0] * nlocals)
            loc_tags.extend([0] * nlocals)
            for i in range(nparams - 1, -1, -1):
                loc_vals[new_base + i] = vals.pop()
                loc_tags[new_base + i] = tags.pop()
            frames.append((pc, base))
            base = new_base
            pc = func_entries[arg]
        elif op == OP_RET:
            del loc_vals[base:]
            del loc_tags[base:]
            pc, base = frames.pop()
        elif op == OP_ASSERT:
            v = vals.pop()
            if tags.pop() != TAG_BOOL:
                return VERDICT_ERROR, ERR_TYPE, steps
            if v == 0:
                return VERDICT_FAIL, arg, steps
        elif op == OP_POP:
            vals.pop()
            tags.pop()
        elif op == OP_HALT:
            return VERDICT_PASS, 0, steps
        elif op == OP_FALLOFF:
            return VERDICT_ERROR, ERR_TYPE, steps
        elif op == OP_BADCALL:
            return VERDICT_ERROR, ERR_UNKNOWN_CALL, steps
        else:
            raise RuntimeError(f"bad opcode {op}")
