"""Simulation-time helpers.

All simulation times in this package are unsigned 64-bit picosecond counts.
Command line arguments and workload flags use ``<int><unit>`` strings with
units ``ps|ns|us|ms|s``.
"""

from __future__ import annotations

PS_PER_UNIT = {
    "ps": 1,
    "ns": 10**3,
    "us": 10**6,
    "ms": 10**9,
    "s": 10**12,
}

TIME_MAX = 2**64 - 1


class TimeParseError(ValueError):
    """Raised for malformed ``<int><unit>`` time strings."""


def parse_time_ps(text: str) -> int:
    """Parse ``"100us"``-style strings into picoseconds."""
    s = text.strip()
    unit = None
    for candidate in PS_PER_UNIT:
        if s.endswith(candidate) and (unit is None or len(candidate) > len(unit)):
            unit = candidate
    if unit is None:
        raise TimeParseError(f"missing time unit in {text!r} (expected ps|ns|us|ms|s)")
    digits = s[: -len(unit)].strip()
    if not digits.isdigit():
        raise TimeParseError(f"bad time value in {text!r} (expected <int><unit>)")
    value = int(digits) * PS_PER_UNIT[unit]
    if value > TIME_MAX:
        raise TimeParseError(f"time {text!r} exceeds 64-bit picosecond range")
    return value


def ps_to_seconds_str(ps: int, digits: int = 12) -> str:
    """Render a picosecond count as an exact decimal seconds string.

    Works on integers only, so the output is reproducible byte for byte
    (12 fractional digits represent picoseconds exactly).
    """
    if ps < 0:
        raise ValueError("negative time")
    whole, frac = divmod(ps, 10**12)
    text = f"{whole}.{frac:012d}"
    if digits < 12:
        text = text[: len(str(whole)) + 1 + digits]
    return text
