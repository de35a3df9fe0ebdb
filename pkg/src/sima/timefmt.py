"""Time and speed token helpers shared across the script, manifest, and EDL layers."""

from __future__ import annotations

import re

_CLOCK_RE = re.compile(r"^(\d+):([0-5]\d)(?::([0-5]\d))?$")
_DURATION_RE = re.compile(r"^(?:(\d+(?:\.\d+)?)min)?(?:(\d+(?:\.\d+)?)s)?$")


def parse_clock(text: str) -> float:
    """Parse ``m:ss`` or ``h:mm:ss`` into seconds."""
    m = _CLOCK_RE.match(text)
    if not m:
        raise ValueError(f"bad clock value {text!r}, expected m:ss or h:mm:ss")
    a, b, c = m.groups()
    if c is None:
        return int(a) * 60 + int(b)
    return int(a) * 3600 + int(b) * 60 + int(c)


def fmt_clock(seconds: float) -> str:
    """Render seconds in the shortest clock form: ``m:ss``, or ``h:mm:ss`` from one hour up."""
    total = round(seconds)
    if total >= 3600:
        return f"{total // 3600}:{total % 3600 // 60:02d}:{total % 60:02d}"
    return f"{total // 60}:{total % 60:02d}"


def parse_duration(text: str) -> float:
    """Parse a tag duration token (``40s``, ``1min``, ``1min30s``) into seconds."""
    m = _DURATION_RE.match(text)
    if not m or (m.group(1) is None and m.group(2) is None) or not text:
        raise ValueError(f"bad duration token {text!r}, expected <n>s, <n>min, or <m>min<n>s")
    minutes = float(m.group(1)) if m.group(1) else 0.0
    secs = float(m.group(2)) if m.group(2) else 0.0
    value = minutes * 60.0 + secs
    if value <= 0:
        raise ValueError(f"duration must be positive, got {text!r}")
    return value


def fmt_duration(seconds: float) -> str:
    """Render seconds as a canonical duration token."""
    if seconds == int(seconds):
        total = int(seconds)
        if total >= 60 and total % 60 == 0:
            return f"{total // 60}min"
        if total > 60:
            return f"{total // 60}min{total % 60}s"
        return f"{total}s"
    return f"{seconds:g}s"


def fmt_speed(speed: float) -> str:
    """Render a playback speed with at most two decimals, keeping one (``1.0``, ``1.2``, ``1.25``)."""
    text = f"{speed:.2f}"
    if text.endswith("0") and not text.endswith(".0"):
        text = text[:-1]
    return text


def to_ms(seconds: float) -> int:
    return round(seconds * 1000)


def from_ms(ms: int) -> float:
    return ms / 1000.0
