"""Logical simulation clock in integer minutes.

Every timestamp the forge issues comes from one clock instance, which
only moves forward; that makes the bot-vs-human race deterministic and
replayable.
"""

from __future__ import annotations


class ClockError(Exception):
    pass


class LogicalClock:
    def __init__(self, start: int = 0):
        if start < 0:
            raise ClockError("clock cannot start before minute 0")
        self._now = start

    @property
    def now(self) -> int:
        return self._now

    def advance(self, minutes: int) -> int:
        if minutes < 0:
            raise ClockError("clock cannot move backwards")
        self._now += minutes
        return self._now

    def advance_to(self, at: int) -> int:
        if at < self._now:
            raise ClockError(f"clock cannot rewind from {self._now} to {at}")
        self._now = at
        return self._now


def format_hhmm(minutes: int) -> str:
    """Wall-clock rendering of a logical timestamp, wrapping at midnight."""
    return f"{(minutes // 60) % 24:02d}:{minutes % 60:02d}"
