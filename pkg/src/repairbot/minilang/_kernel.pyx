# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled interpreter kernel.

Mirrors ``_kernel_py`` instruction for instruction: verdicts, coverage
bytes, and step counts must be bit-identical between the two. Compiled
with -fwrapv so signed arithmetic wraps like the pure kernel's masked
64-bit math.
"""

from libc.stdlib cimport free, malloc, realloc

KERNEL_NAME = "cython"

cdef enum:
    OP_HALT = 0
    OP_PUSH_INT = 1
    OP_PUSH_BOOL = 2
    OP_LOAD = 3
    OP_STORE = 4
    OP_JUMP = 5
    OP_JF = 6
    OP_AND_SC = 7
    OP_OR_SC = 8
    OP_CHECK_BOOL = 9
    OP_BINOP = 10
    OP_UNOP = 11
    OP_CALL = 12
    OP_RET = 13
    OP_COV = 14
    OP_ASSERT = 15
    OP_POP = 16
    OP_FALLOFF = 17
    OP_BADCALL = 18

cdef enum:
    VERDICT_PASS = 0
    VERDICT_FAIL = 1
    VERDICT_ERROR = 2
    VERDICT_BUDGET = 3

cdef enum:
    ERR_DIV_ZERO = 0
    ERR_UNKNOWN_CALL = 1
    ERR_TYPE = 2

cdef enum:
    TAG_INT = 0
    TAG_BOOL = 1

cdef long long INT64_MIN = <long long>(<unsigned long long>1 << 63)


cdef struct Frame:
    long long ret_pc
    long long base


def execute(code_arr, func_entries_arr, func_nparams_arr, func_nlocals_arr,
            test_entries_arr, test_nlocals_arr, n_stmts, step_budget):
    """Same contract as _kernel_py.execute."""
    cdef const long long[::1] code = code_arr
    cdef const long long[::1] func_entries = func_entries_arr
    cdef const long long[::1] func_nparams = func_nparams_arr
    cdef const long long[::1] func_nlocals = func_nlocals_arr
    cdef const long long[::1] test_entries = test_entries_arr
    cdef const long long[::1] test_nlocals = test_nlocals_arr

    cdef Py_ssize_t n_tests = test_entries.shape[0]
    cdef long long stmt_count = n_stmts
    cdef long long budget = step_budget

    coverage_obj = bytearray(n_tests * stmt_count if n_tests * stmt_count > 0 else 0)
    cdef unsigned char[::1] coverage
    if len(coverage_obj) > 0:
        coverage = coverage_obj

    verdicts = []
    steps_list = []

    # Shared, growable machine state reused across tests.
    cdef Py_ssize_t stack_cap = 4096
    cdef Py_ssize_t locals_cap = 4096
    cdef Py_ssize_t frames_cap = 1024
    cdef long long* vals = <long long*>malloc(stack_cap * sizeof(long long))
    cdef unsigned char* vtags = <unsigned char*>malloc(stack_cap)
    cdef long long* loc_vals = <long long*>malloc(locals_cap * sizeof(long long))
    cdef unsigned char* loc_tags = <unsigned char*>malloc(locals_cap)
    cdef Frame* frames = <Frame*>malloc(frames_cap * sizeof(Frame))
    if vals == NULL or vtags == NULL or loc_vals == NULL or loc_tags == NULL or frames == NULL:
        free(vals); free(vtags); free(loc_vals); free(loc_tags); free(frames)
        raise MemoryError()

    cdef Py_ssize_t sp, n_loc, n_frames, i, new_cap
    cdef long long pc, steps, base, cov_base
    cdef long long op, arg, a, b, r, q, v
    cdef unsigned char ta, tb
    cdef int verdict, detail
    cdef long long nparams, nlocals, new_base
    cdef Py_ssize_t t

    try:
        for t in range(n_tests):
            pc = test_entries[t]
            cov_base = t * stmt_count
            sp = 0
            n_frames = 0
            base = 0
            n_loc = test_nlocals[t]
            while n_loc > locals_cap:
                locals_cap *= 2
                loc_vals = <long long*>realloc(loc_vals, locals_cap * sizeof(long long))
                loc_tags = <unsigned char*>realloc(loc_tags, locals_cap)
                if loc_vals == NULL or loc_tags == NULL:
                    raise MemoryError()
            for i in range(n_loc):
                loc_vals[i] = 0
                loc_tags[i] = 0
            steps = 0
            verdict = -1
            detail = 0

            while True:
                if steps == budget:
                    verdict = VERDICT_BUDGET
                    detail = 0
                    break
                op = code[pc]
                arg = code[pc + 1]
                pc += 2
                steps += 1

                if op == OP_COV:
                    coverage[cov_base + arg] = 1
                elif op == OP_PUSH_INT or op == OP_PUSH_BOOL:
                    if sp == stack_cap:
                        stack_cap *= 2
                        vals = <long long*>realloc(vals, stack_cap * sizeof(long long))
                        vtags = <unsigned char*>realloc(vtags, stack_cap)
                        if vals == NULL or vtags == NULL:
                            raise MemoryError()
                    vals[sp] = arg
                    vtags[sp] = TAG_INT if op == OP_PUSH_INT else TAG_BOOL
                    sp += 1
                elif op == OP_LOAD:
                    if sp == stack_cap:
                        stack_cap *= 2
                        vals = <long long*>realloc(vals, stack_cap * sizeof(long long))
                        vtags = <unsigned char*>realloc(vtags, stack_cap)
                        if vals == NULL or vtags == NULL:
                            raise MemoryError()
                    vals[sp] = loc_vals[base + arg]
                    vtags[sp] = loc_tags[base + arg]
                    sp += 1
                elif op == OP_STORE:
                    sp -= 1
                    loc_vals[base + arg] = vals[sp]
                    loc_tags[base + arg] = vtags[sp]
                elif op == OP_JUMP:
                    pc = arg
                elif op == OP_JF:
                    sp -= 1
                    if vtags[sp] != TAG_BOOL:
                        verdict = VERDICT_ERROR
                        detail = ERR_TYPE
                        break
                    if vals[sp] == 0:
                        pc = arg
                elif op == OP_AND_SC:
                    if vtags[sp - 1] != TAG_BOOL:
                        verdict = VERDICT_ERROR
                        detail = ERR_TYPE
                        break
                    if vals[sp - 1] == 0:
                        pc = arg
                    else:
                        sp -= 1
                elif op == OP_OR_SC:
                    if vtags[sp - 1] != TAG_BOOL:
                        verdict = VERDICT_ERROR
                        detail = ERR_TYPE
                        break
                    if vals[sp - 1] != 0:
                        pc = arg
                    else:
                        sp -= 1
                elif op == OP_CHECK_BOOL:
                    if vtags[sp - 1] != TAG_BOOL:
                        verdict = VERDICT_ERROR
                        detail = ERR_TYPE
                        break
                elif op == OP_BINOP:
                    sp -= 2
                    a = vals[sp]
                    ta = vtags[sp]
                    b = vals[sp + 1]
                    tb = vtags[sp + 1]
                    if arg <= 8:
                        if ta != TAG_INT or tb != TAG_INT:
                            verdict = VERDICT_ERROR
                            detail = ERR_TYPE
                            break
                        if arg == 0:
                            vals[sp] = a + b
                            vtags[sp] = TAG_INT
                        elif arg == 1:
                            vals[sp] = a - b
                            vtags[sp] = TAG_INT
                        elif arg == 2:
                            vals[sp] = a * b
                            vtags[sp] = TAG_INT
                        elif arg == 3 or arg == 4:
                            if b == 0:
                                verdict = VERDICT_ERROR
                                detail = ERR_DIV_ZERO
                                break
                            if a == INT64_MIN and b == -1:
                                # C division would trap; wraps like the pure kernel
                                vals[sp] = INT64_MIN if arg == 3 else 0
                            else:
                                vals[sp] = a / b if arg == 3 else a % b
                            vtags[sp] = TAG_INT
                        elif arg == 5:
                            vals[sp] = 1 if a < b else 0
                            vtags[sp] = TAG_BOOL
                        elif arg == 6:
                            vals[sp] = 1 if a <= b else 0
                            vtags[sp] = TAG_BOOL
                        elif arg == 7:
                            vals[sp] = 1 if a > b else 0
                            vtags[sp] = TAG_BOOL
                        else:
                            vals[sp] = 1 if a >= b else 0
                            vtags[sp] = TAG_BOOL
                    else:
                        if ta != tb:
                            verdict = VERDICT_ERROR
                            detail = ERR_TYPE
                            break
                        if arg == 9:
                            vals[sp] = 1 if a == b else 0
                        else:
                            vals[sp] = 1 if a != b else 0
                        vtags[sp] = TAG_BOOL
                    sp += 1
                elif op == OP_UNOP:
                    if arg == 0:
                        if vtags[sp - 1] != TAG_INT:
                            verdict = VERDICT_ERROR
                            detail = ERR_TYPE
                            break
                        vals[sp - 1] = -vals[sp - 1]
                    else:
                        if vtags[sp - 1] != TAG_BOOL:
                            verdict = VERDICT_ERROR
                            detail = ERR_TYPE
                            break
                        vals[sp - 1] = 1 - vals[sp - 1]
                elif op == OP_CALL:
                    nparams = func_nparams[arg]
                    nlocals = func_nlocals[arg]
                    new_base = n_loc
                    while n_loc + nlocals > locals_cap:
                        locals_cap *= 2
                        loc_vals = <long long*>realloc(loc_vals, locals_cap * sizeof(long long))
                        loc_tags = <unsigned char*>realloc(loc_tags, locals_cap)
                        if loc_vals == NULL or loc_tags == NULL:
                            raise MemoryError()
                    for i in range(nlocals):
                        loc_vals[new_base + i] = 0
                        loc_tags[new_base + i] = 0
                    n_loc += nlocals
                    for i in range(nparams - 1, -1, -1):
                        sp -= 1
                        loc_vals[new_base + i] = vals[sp]
                        loc_tags[new_base + i] = vtags[sp]
                    if n_frames == frames_cap:
                        frames_cap *= 2
                        frames = <Frame*>realloc(frames, frames_cap * sizeof(Frame))
                        if frames == NULL:
                            raise MemoryError()
                    frames[n_frames].ret_pc = pc
                    frames[n_frames].base = base
                    n_frames += 1
                    base = new_base
                    pc = func_entries[arg]
                elif op == OP_RET:
                    n_loc = base
                    n_frames -= 1
                    pc = frames[n_frames].ret_pc
                    base = frames[n_frames].base
                elif op == OP_ASSERT:
                    sp -= 1
                    if vtags[sp] != TAG_BOOL:
                        verdict = VERDICT_ERROR
                        detail = ERR_TYPE
                        break
                    if vals[sp] == 0:
                        verdict = VERDICT_FAIL
                        detail = <int>arg
                        break
                elif op == OP_POP:
                    sp -= 1
                elif op == OP_HALT:
                    verdict = VERDICT_PASS
                    detail = 0
                    break
                elif op == OP_FALLOFF:
                    verdict = VERDICT_ERROR
                    detail = ERR_TYPE
                    break
                elif op == OP_BADCALL:
                    verdict = VERDICT_ERROR
                    detail = ERR_UNKNOWN_CALL
                    break
                else:
                    raise RuntimeError(f"bad opcode {op}")

            verdicts.append((verdict, detail))
            steps_list.append(steps)
    finally:
        free(vals)
        free(vtags)
        free(loc_vals)
        free(loc_tags)
        free(frames)

    return verdicts, coverage_obj, steps_list
