"""Acceptance gate: nine end-to-end checks the toolchain must pass.

Each test states its tolerance inline and prints one ``[criterion N] PASS``
line on success, so a verbose run doubles as the acceptance report.  The
fit and overlay checks compare against brute-force oracles implemented here
with different algorithms than the library code.
"""

from __future__ import annotations

import random
import time
from bisect import bisect_left

import pytest

from conftest import SPLIT_PARTS, assert_partition, compile_fixture
from fixture_project import (
    CTA_ONLY_SCRIPT,
    EMPTY_PART2_SCRIPT,
    MAIN_SCRIPT,
    REDUNDANT_TAKE_SRT,
    write_project,
)
from sima.annotation import StructureError, collect_spans, parse_script, serialize_script
from sima.captions import (
    CaptionCue,
    CaptionFormat,
    CutReason,
    export_captions,
    parse_captions,
    polish_captions,
)
from sima.cli import main
from sima.estimator import (
    estimate_editing,
    estimate_polishing_manual,
    estimate_recording,
    estimate_sourcing,
)
from sima.manifest import (
    ThumbnailMeta,
    ThumbnailVariant,
    generate_manifest,
    transition_graphic_name,
    validate_thumbnails,
)
from sima.timeline import OverlayShape, fit_clip, place_stylized_overlays


def test_criterion_1_workload_figures():
    """Workload arithmetic is exact (tolerance 0) and instant (< 1 s)."""
    t0 = time.perf_counter()
    assert estimate_recording(1.5) == 2.7
    assert estimate_polishing_manual(1.5) == 4.05
    assert estimate_sourcing(10) == 60.0
    assert estimate_editing(10, broll_ready=True) == 25.0
    assert estimate_editing(10, broll_ready=False) == 30.0
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    print(f"[criterion 1] PASS - workload figures exact ({elapsed * 1000:.1f} ms)")


EX_SINGLE_IMAGE = """\
## Part 1: Example
This is the first sentence. [1001+]{https://example.com/image1.jpg} This is the second\
 sentence. [1001-] This is the third sentence.
"""

EX_MULTI_IMAGE = """\
## Part 1: Example
This is the first sentence. [1001, 1002+]{https://example.com/pair.jpg} This is the second\
 sentence. [1001, 1002-] This is the third sentence.
"""

EX_TYPE_B_IMAGE = """\
## Part 1: Example
[image_part0001+] This is an example sentence. [image_part0001-]
"""

EX_VIDEO_NESTED = """\
## Part 1: Example
This is the first sentence. [v1001+, 40s, 1.0x]{https://example.com/clip 11:10-11:50} This\
 is the second sentence. This is the third sentence. [1001+]{https://example.com/a.jpg} This\
 is the fourth sentence. [1001-] [1003+]{https://example.com/b.jpg} This is the fifth\
 sentence. [1003-] This is the sixth sentence. [v1001-] This is the seventh sentence.
"""

EX_TYPE_B_VIDEO = """\
## Part 1: Example
This is the first sentence. [v_part1001+, 1min, 1.0x] This is the second sentence. This is\
 the third sentence. [1001+]{https://example.com/a.jpg} This is the fourth sentence. [1001-]\
 [image_part1003+] This is the fifth sentence. [image_part1003-] This is the sixth\
 sentence. [v_part1001-] This is the seventh sentence.
"""

VIDEO_IN_VIDEO = """\
## Part 1: Example
One. [v1001+, 10s, 1.0x]{https://example.com/c 0:00-0:30} Two.\
 [v1002+, 10s, 1.0x]{https://example.com/d 0:00-0:30} Three. [v1002-] Four. [v1001-] Five.
"""

UNBALANCED_OPEN = """\
## Part 1: Example
One. [1001+]{https://example.com/a.jpg} Two.
"""

UNBALANCED_CLOSE = """\
## Part 1: Example
One. [1001-] Two.
"""


def test_criterion_2_parser_fixture_suite():
    """The five canonical tag examples parse, round-trip, and misuse fails; < 1 s."""
    t0 = time.perf_counter()

    def spans_of(text):
        script = parse_script(text)
        assert serialize_script(script) == text
        assert parse_script(serialize_script(script)) == script
        return script, collect_spans(script.parts[0])

    script, spans = spans_of(EX_SINGLE_IMAGE)
    assert len(script.parts[0].sentences) == 3
    (span,) = spans
    assert [a.render() for a in span.open.ids] == ["1001"]
    assert (span.first_sentence, span.last_sentence) == (2, 2)
    assert span.open.source.url == "https://example.com/image1.jpg"

    _, spans = spans_of(EX_MULTI_IMAGE)
    (span,) = spans
    assert [a.render() for a in span.open.ids] == ["1001", "1002"]
    assert (span.first_sentence, span.last_sentence) == (2, 2)

    _, spans = spans_of(EX_TYPE_B_IMAGE)
    (span,) = spans
    assert [a.render() for a in span.open.ids] == ["image_part0001"]
    assert (span.first_sentence, span.last_sentence) == (1, 1)
    assert span.open.source is None

    _, spans = spans_of(EX_VIDEO_NESTED)
    by_id = {span.open.ids[0].render(): span for span in spans}
    video = by_id["v1001"]
    assert (video.first_sentence, video.last_sentence) == (2, 6)
    assert video.open.baseline_duration == 40.0
    assert video.open.speed == 1.0
    assert video.open.source.time_range == (670.0, 710.0)
    assert (by_id["1001"].first_sentence, by_id["1001"].last_sentence) == (4, 4)
    assert (by_id["1003"].first_sentence, by_id["1003"].last_sentence) == (5, 5)
    assert by_id["1001"].parent_open is video.open
    assert by_id["1003"].parent_open is video.open

    _, spans = spans_of(EX_TYPE_B_VIDEO)
    by_id = {span.open.ids[0].render(): span for span in spans}
    video = by_id["v_part1001"]
    assert (video.first_sentence, video.last_sentence) == (2, 6)
    assert video.open.baseline_duration == 60.0
    assert video.open.source is None
    assert by_id["1001"].open.source.url == "https://example.com/a.jpg"
    assert by_id["image_part1003"].open.source is None
    assert by_id["image_part1003"].parent_open is video.open

    for text in (VIDEO_IN_VIDEO, UNBALANCED_OPEN, UNBALANCED_CLOSE):
        with pytest.raises(StructureError) as info:
            parse_script(text)
        assert info.value.code == "StructureError"

    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    print(f"[criterion 2] PASS - parser fixtures and round-trips ({elapsed * 1000:.1f} ms)")


def test_criterion_3_manifest_byte_exactness():
    """The generated manifest lines match the documented form byte-for-byte."""
    images, videos = generate_manifest(parse_script(MAIN_SCRIPT))
    assert images.splitlines()[0] == "1001: https://example.com/image1.jpg"
    assert videos.splitlines()[0] == "v1001: https://youtu.be/XXXXX 0:10-0:35"
    assert images == (
        "1001: https://example.com/image1.jpg\n"
        "1002: https://example.com/image2.png\n"
        "1003: https://example.com/team.jpg\n"
        "1004: https://example.com/team.jpg\n"
        "1005: https://example.com/floorplan.jpg\n"
        "1006: https://example.com/legacy.jpg\n"
    )
    assert videos == (
        "v1001: https://youtu.be/XXXXX 0:10-0:35\n"
        "v1002: https://youtu.be/YYYYY 1:20-2:05\n"
    )
    print("[criterion 3] PASS - manifest lines byte-exact")


def _grid_fit_coverages(baseline: float, dur: float) -> list[float]:
    """Coverage of the original span for each playback speed 0.50..4.00 step 0.01."""
    return [min(dur, baseline / (v / 100.0)) for v in range(50, 401)]


def test_criterion_4_fit_solver_oracle():
    """fit_clip coverage matches a speed-grid brute force within one grid step."""
    example = fit_clip(40.0, (0.0, 33.333))
    assert example.speed == 1.2
    extended = fit_clip(40.0, (0.0, 16.0), extend_after=(20.0, 24.0))
    assert extended.speed == 2.0
    assert extended.extended_after == 1

    rng = random.Random(41)
    for _ in range(1000):
        baseline = rng.uniform(2.0, 300.0)
        dur = rng.uniform(1.0, 240.0)
        s0 = rng.uniform(0.0, 600.0)
        span = (s0, s0 + dur)
        after: list[float] = []
        edge = span[1]
        for _ in range(rng.randint(0, 3)):
            edge += rng.uniform(2.0, 40.0)
            after.append(edge)
        before: list[float] = []
        edge = span[0]
        for _ in range(rng.randint(0, 3)):
            edge -= rng.uniform(2.0, 40.0)
            before.append(edge)

        fit = fit_clip(baseline, span, tuple(after), tuple(before))
        assert 0.5 <= fit.speed <= 4.0
        assert abs(fit.speed * 100 - round(fit.speed * 100)) < 1e-6
        assert fit.covered[0] <= span[0] + 1e-9

        coverage = max(
            0.0, min(fit.covered[1], span[1]) - max(fit.covered[0], span[0])
        )
        grid = _grid_fit_coverages(baseline, dur)
        best = max(grid)
        best_at = grid.index(best)
        one_step_past = grid[min(best_at + 1, len(grid) - 1)]
        assert coverage + 1e-6 >= one_step_past
        assert coverage == pytest.approx(best, abs=1e-6)
    print("[criterion 4] PASS - fit coverage matches the grid oracle on 1000 instances")


def _merge_int_intervals(intervals):
    merged: list[list[int]] = []
    for a, b in sorted(intervals):
        if b - a <= 0:
            continue
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return [(a, b) for a, b in merged]


def _grid_overlay_max(intervals, duration=20, min_gap=180, cap=4) -> int:
    """Maximum placements on a 1 s start grid, via suffix DP (not greedy)."""
    starts: list[int] = []
    for lo, hi in _merge_int_intervals(intervals):
        starts.extend(range(lo, hi - duration + 1))
    n = len(starts)
    best_from = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        j = bisect_left(starts, starts[i] + min_gap)
        best_from[i] = max(best_from[i + 1], 1 + best_from[j])
    return min(cap, best_from[0])


def test_criterion_5_overlay_placement_oracle():
    """Overlay counts equal the 1 s grid maximum on 500 instances; < 30 s."""
    t0 = time.perf_counter()
    rng = random.Random(514)
    for _ in range(500):
        intervals = []
        for _ in range(rng.randint(0, 6)):
            a = rng.randint(0, 1795)
            b = min(1800, a + rng.randint(0, 400))
            intervals.append((a, b))

        placements, diags = place_stylized_overlays(intervals)
        expected = _grid_overlay_max(intervals)
        assert len(placements) == expected

        merged = _merge_int_intervals(intervals)
        starts = [p.start for p in placements]
        assert starts == sorted(starts)
        for prev, cur in zip(starts, starts[1:]):
            assert cur - prev >= 180.0 - 1e-9
        for p in placements:
            assert any(lo - 1e-9 <= p.start and p.end <= hi + 1e-9 for lo, hi in merged)
        expected_shapes = [OverlayShape.CIRCLE, OverlayShape.RECT] * 2
        assert [p.shape for p in placements] == expected_shapes[: len(placements)]
        if len(placements) >= 2:
            assert {p.shape for p in placements} == {OverlayShape.CIRCLE, OverlayShape.RECT}
        if len(placements) < 4:
            assert [d.code for d in diags] == ["StylizedOverlayShortfall"]
        else:
            assert diags == []
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    print(f"[criterion 5] PASS - overlay counts match the grid oracle ({elapsed:.2f} s)")


def _sweep_partition(report) -> None:
    events = []
    for a, b in report.covered:
        events.append((a, b))
    for a, b in report.mandatory:
        events.append((a, b))
    for gap in report.gaps:
        events.append((gap.start_ms, gap.end_ms))
    events.sort()
    cursor = 0
    total = 0
    for a, b in events:
        assert a == cursor, f"hole or overlap at {a} (expected {cursor})"
        assert b > a
        cursor = b
        total += b - a
    assert cursor == report.duration_ms
    assert abs(total - report.duration_ms) <= 1


def test_criterion_6_coverage_partition(main_compiled, two_part_compiled):
    """covered + mandatory + gaps tile every compiled split exactly (<= 1 ms)."""
    fixtures = [main_compiled[label] for label in SPLIT_PARTS] + [two_part_compiled]
    fixtures.append(compile_fixture(parse_script(CTA_ONLY_SCRIPT), [1], "A", split_count=1))
    fixtures.append(
        compile_fixture(parse_script(EMPTY_PART2_SCRIPT), [1, 2, 3], "A", split_count=1)
    )
    for result in fixtures:
        _sweep_partition(result.report)
        assert_partition(result)
    print(f"[criterion 6] PASS - partition sweep over {len(fixtures)} compiled splits")


def test_criterion_7_caption_round_trip_and_polish():
    """Caption export/parse is the identity; polishing cuts exactly the right takes."""
    rng = random.Random(77)
    for _ in range(50):
        cues = []
        t = 0
        for k in range(rng.randint(0, 12)):
            t += rng.randint(1, 5000)
            start = t
            t += rng.randint(200, 8000)
            words = " ".join(
                rng.choice(["alpha", "beta", "gamma", "delta", "omega"])
                for _ in range(rng.randint(1, 6))
            )
            cues.append(CaptionCue(k + 1, start / 1000.0, t / 1000.0, words))
        for fmt in (CaptionFormat.SRT, CaptionFormat.VTT):
            assert parse_captions(export_captions(cues, fmt), fmt) == cues

    raw = parse_captions(REDUNDANT_TAKE_SRT, CaptionFormat.SRT)
    result = polish_captions(raw)
    assert [c.reason for c in result.cuts] == [
        CutReason.REDUNDANT_TAKE,
        CutReason.REDUNDANT_TAKE,
        CutReason.ANOMALY,
        CutReason.SILENCE,
    ]
    assert [c.text for c in result.cues] == [
        "We shipped the update on a Tuesday morning.",
        "Everyone blamed the weather.",
    ]
    assert [(c.start, c.end) for c in result.cues] == [(1.0, 3.4), (3.9, 6.4)]
    cut_ms = sum(round(c.end * 1000) - round(c.start * 1000) for c in result.cuts)
    raw_ms = round(result.raw_duration * 1000)
    polished_ms = round(result.polished_duration * 1000)
    assert raw_ms - cut_ms == polished_ms
    assert result.polished_duration == 6.4
    print("[criterion 7] PASS - caption round-trips and polish cuts exact")


def test_criterion_8_naming_and_thumbnail_validators():
    """Graphic names enumerate f0200..f1500; thumbnail set rules accept/reject."""
    assert [transition_graphic_name(p) for p in range(2, 16)] == [
        "f0200.png",
        "f0300.png",
        "f0400.png",
        "f0500.png",
        "f0600.png",
        "f0700.png",
        "f0800.png",
        "f0900.png",
        "f1000.png",
        "f1100.png",
        "f1200.png",
        "f1300.png",
        "f1400.png",
        "f1500.png",
    ]
    trio = [
        ThumbnailMeta(ThumbnailVariant.WIDE_16_9, 1920, 1080, 1_500_000, True),
        ThumbnailMeta(ThumbnailVariant.STANDARD_4_3, 1600, 1200, 900_000, True),
        ThumbnailMeta(ThumbnailVariant.SQUARE_1_1, 3000, 3000, 4_000_000, True),
    ]
    assert validate_thumbnails(trio) == []
    oversize = [ThumbnailMeta(ThumbnailVariant.WIDE_16_9, 1920, 1080, 2_000_001, True)] + trio[1:]
    assert "OversizeThumbnail" in [d.code for d in validate_thumbnails(oversize)]
    off_square = trio[:2] + [ThumbnailMeta(ThumbnailVariant.SQUARE_1_1, 2880, 2880, 900_000, True)]
    assert "WrongSquareDimensions" in [d.code for d in validate_thumbnails(off_square)]
    print("[criterion 8] PASS - naming and thumbnail validators")


def test_criterion_9_compile_determinism(tmp_path):
    """Two identical compile runs produce byte-identical outputs."""
    project = write_project(tmp_path)
    outputs = [
        "splitA.edl",
        "splitB.edl",
        "splitC.edl",
        "coverageA.tsv",
        "coverageB.tsv",
        "coverageC.tsv",
        "fitsA.tsv",
        "fitsB.tsv",
        "fitsC.tsv",
        "timelineA.png",
        "timelineB.png",
        "timelineC.png",
        "rewritten.sima.md",
    ]
    runs = []
    for name in ("run1", "run2"):
        out_dir = tmp_path / name
        code = main(
            ["compile", "--split", "all", "--config", str(project["config"]), "--out", str(out_dir)]
        )
        assert code == 0
        runs.append({f: (out_dir / f).read_bytes() for f in outputs})
    assert runs[0] == runs[1]
    print("[criterion 9] PASS - compile outputs byte-identical across runs")
