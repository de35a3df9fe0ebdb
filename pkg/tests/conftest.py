"""Session fixtures: parsed scripts and compiled splits of the shared project."""

from __future__ import annotations

import pytest

from fixture_project import MAIN_SCRIPT, TWO_PART_SCRIPT, cues_for
from sima.annotation import AnnotatedScript, parse_script
from sima.captions import align_script_to_captions
from sima.timeline import CompileOptions, CompileResult, compile_split

SPLIT_PARTS = {"A": [1, 2], "B": [3, 4], "C": [5, 6]}


def aligned_for(script: AnnotatedScript, parts: list[int]):
    return align_script_to_captions(script, cues_for(script, parts), parts=parts)


def compile_fixture(script: AnnotatedScript, parts: list[int], label, **options) -> CompileResult:
    return compile_split(script, aligned_for(script, parts), label, CompileOptions(**options))


@pytest.fixture(scope="session")
def main_script() -> AnnotatedScript:
    return parse_script(MAIN_SCRIPT)


@pytest.fixture(scope="session")
def main_compiled(main_script) -> dict[str, CompileResult]:
    return {
        label: compile_fixture(main_script, parts, label)
        for label, parts in SPLIT_PARTS.items()
    }


@pytest.fixture(scope="session")
def two_part_compiled() -> CompileResult:
    script = parse_script(TWO_PART_SCRIPT)
    return compile_fixture(script, [1, 2], "A", split_count=1)


def assert_partition(result: CompileResult) -> None:
    """covered + mandatory + gaps must tile [0, duration) with no overlap."""
    report = result.report
    pieces = sorted(
        [(a, b) for a, b in report.covered]
        + [(a, b) for a, b in report.mandatory]
        + [(g.start_ms, g.end_ms) for g in report.gaps]
    )
    assert pieces, f"split {report.split} produced an empty partition"
    assert pieces[0][0] == 0
    assert pieces[-1][1] == report.duration_ms
    for (_, b), (a2, _) in zip(pieces, pieces[1:]):
        assert b == a2, f"partition of split {report.split} breaks at {b} != {a2}"
    total = sum(b - a for a, b in pieces)
    assert total == report.duration_ms
