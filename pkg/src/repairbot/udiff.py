"""Unified diff rendering and application over project file snapshots.

Diffs use ``a/<path>`` / ``b/<path>`` headers with paths relative to the
project root. Application is strict: any context or deletion line that
does not match the target text raises DiffApplyError.
"""

from __future__ import annotations

import difflib
import re
from typing import Dict, List, Mapping, Tuple


class DiffApplyError(Exception):
    pass


_HUNK_RE = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")


def make_file_diff(path: str, old: str, new: str, context: int = 3) -> str:
    """Unified diff for one file; empty string when contents are equal."""
    if old == new:
        return ""
    lines = difflib.unified_diff(
        old.splitlines(keepends=True),
        new.splitlines(keepends=True),
        fromfile=f"a/{path}",
        tofile=f"b/{path}",
        n=context,
    )
    out = []
    for line in lines:
        if not line.endswith("\n"):
            line += "\n"
        out.append(line)
    return "".join(out)


def make_diff(old_files: Mapping[str, str], new_files: Mapping[str, str]) -> str:
    """Multi-file unified diff; files processed in sorted path order."""
    parts = []
    for path in sorted(set(old_files) | set(new_files)):
        parts.append(make_file_diff(path, old_files.get(path, ""), new_files.get(path, "")))
    return "".join(p for p in parts if p)


def changed_line_count(diff: str) -> int:
    """Number of added plus removed lines (headers excluded)."""
    count = 0
    for line in diff.splitlines():
        if line.startswith("+++") or line.startswith("---"):
            continue
        if line.startswith("+") or line.startswith("-"):
            count += 1
    return count


def _split_file_sections(diff: str) -> List[Tuple[str, List[str]]]:
    sections: List[Tuple[str, List[str]]] = []
    lines = diff.splitlines()
    i = 0
    while i < len(lines):
        if lines[i].startswith("--- "):
            if i + 1 >= len(lines) or not lines[i + 1].startswith("+++ "):
                raise DiffApplyError(f"malformed diff: {lines[i]!r} without +++ header")
            target = lines[i + 1][4:].strip()
            if target.startswith("b/"):
                target = target[2:]
            body: List[str] = []
            i += 2
            while i < len(lines) and not lines[i].startswith("--- "):
                body.append(lines[i])
                i += 1
            sections.append((target, body))
        else:
            raise DiffApplyError(f"malformed diff: unexpected line {lines[i]!r}")
    return sections


def apply_diff(files: Mapping[str, str], diff: str) -> Dict[str, str]:
    """Apply a unified diff to a file snapshot, returning the new snapshot."""
    result = dict(files)
    for path, body in _split_file_sections(diff):
        if path not in result:
            raise DiffApplyError(f"diff targets unknown file {path!r}")
        result[path] = _apply_hunks(result[path], body, path)
    return result


def _apply_hunks(text: str, body: List[str], path: str) -> str:
    source = text.splitlines()
    output: List[str] = []
    cursor = 0  # index into source of the next uncopied line
    i = 0
    while i < len(body):
        header = _HUNK_RE.match(body[i])
        if header is None:
            raise DiffApplyError(f"{path}: expected hunk header, found {body[i]!r}")
        old_start = int(header.group(1))
        old_len = int(header.group(2) or "1")
        # Copy unchanged lines up to the hunk.
        hunk_begin = old_start - 1 if old_len > 0 else old_start
        if hunk_begin < cursor or hunk_begin > len(source):
            raise DiffApplyError(f"{path}: hunk start {old_start} out of range")
        output.extend(source[cursor:hunk_begin])
        cursor = hunk_begin
        i += 1
        consumed = 0
        while i < len(body) and body[i][:1] in (" ", "-", "+", ""):
            line = body[i]
            if line.startswith("@@"):
                break
            tag, content = (line[:1] or " "), line[1:]
            if tag == " ":
                if cursor >= len(source) or source[cursor] != content:
                    raise DiffApplyError(
                        f"{path}: context mismatch at line {cursor + 1}: "
                        f"expected {content!r}, found "
                        f"{source[cursor] if cursor < len(source) else '<eof>'!r}")
                output.append(content)
                cursor += 1
                consumed += 1
            elif tag == "-":
                if cursor >= len(source) or source[cursor] != content:
                    raise DiffApplyError(
                        f"{path}: deletion mismatch at line {cursor + 1}: "
                        f"expected {content!r}")
                cursor += 1
                consumed += 1
            else:  # "+"
                output.append(content)
            i += 1
        if consumed != old_len:
            raise DiffApplyError(
                f"{path}: hunk consumed {consumed} lines, header declared {old_len}")
    output.extend(source[cursor:])
    # All project files are newline-terminated canonical text.
    return "".join(line + "\n" for line in output)
