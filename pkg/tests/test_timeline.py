"""Clip fitting, transition display, overlay placement, and EDL round trips."""

import json
import random

import pytest

from sima.timeline import (
    EDL_VERSION,
    CompileError,
    InvalidSpan,
    OverlayShape,
    ResidualKind,
    Timeline,
    TimelineEvent,
    Track,
    TransitionDisplay,
    export_edl,
    fit_clip,
    import_edl,
    place_stylized_overlays,
    resolve_transition_display,
)


def test_fit_exact_span_is_unity_speed():
    fit = fit_clip(40.0, (0.0, 40.0))
    assert fit.speed == 1.0
    assert fit.covered == (0.0, 40.0)
    assert fit.extended_before == fit.extended_after == 0
    assert fit.residual is None


def test_fit_floors_to_two_decimals():
    fit = fit_clip(40.0, (0.0, 33.333))
    assert fit.speed == 1.2
    assert fit.covered[0] == 0.0
    # flooring the speed means the clip covers at least the span
    assert fit.covered[1] >= 33.333

    fit = fit_clip(45.0, (0.0, 24.0))
    assert fit.speed == 1.87
    assert fit.covered == (0.0, 45.0 / 1.87)


def test_fit_slow_clip_leaves_tail_uncovered():
    fit = fit_clip(40.0, (0.0, 200.0))
    assert fit.speed == 0.5
    assert fit.covered == (0.0, 80.0)
    assert fit.residual.kind is ResidualKind.UNCOVERED
    assert fit.residual.seconds == pytest.approx(120.0)


def test_fit_fast_clip_truncates():
    fit = fit_clip(200.0, (10.0, 50.0))
    assert fit.speed == 4.0
    assert fit.covered == (10.0, 50.0)
    assert fit.residual.kind is ResidualKind.TRUNCATED
    assert fit.residual.seconds == pytest.approx(10.0)


def test_fit_extension_alternates_after_then_before():
    fit = fit_clip(100.0, (50.0, 90.0), extend_after=(95.0, 100.0), extend_before=(45.0, 40.0))
    assert fit.extended_after == 1 and fit.extended_before == 1
    assert fit.speed == 2.0
    assert fit.covered == (45.0, 95.0)
    assert fit.residual is None


def test_fit_skips_extension_that_would_overshoot():
    # taking the 20 s candidate would need a 0.5x crawl, below the preferred band
    fit = fit_clip(10.0, (0.0, 4.0), extend_after=(20.0,))
    assert fit.extended_after == 0
    assert fit.speed == 2.5
    assert fit.covered == (0.0, 4.0)


def test_fit_continues_on_one_side_when_other_dies():
    fit = fit_clip(30.0, (10.0, 20.0), extend_before=(5.0, 2.0))
    assert fit.extended_before == 1 and fit.extended_after == 0
    assert fit.speed == 2.0
    assert fit.covered == (5.0, 20.0)


def test_fit_stops_at_preferred_band_edge():
    # exactly 2.0x required: no extension is attempted
    fit = fit_clip(20.0, (0.0, 10.0), extend_after=(30.0,))
    assert fit.speed == 2.0 and fit.extended_after == 0


@pytest.mark.parametrize(
    "kwargs",
    [
        {"baseline": 0.0, "target_span": (0.0, 10.0)},
        {"baseline": -1.0, "target_span": (0.0, 10.0)},
        {"baseline": 10.0, "target_span": (5.0, 5.0)},
        {"baseline": 10.0, "target_span": (5.0, 4.0)},
        {"baseline": 30.0, "target_span": (0.0, 10.0), "extend_after": (10.0,)},
        {"baseline": 30.0, "target_span": (5.0, 10.0), "extend_before": (5.0,)},
    ],
)
def test_fit_invalid_inputs(kwargs):
    with pytest.raises(InvalidSpan):
        fit_clip(**kwargs)


def test_fit_random_speed_and_coverage_invariants():
    rng = random.Random(2024)
    for _ in range(300):
        baseline = rng.uniform(2.0, 300.0)
        start = rng.uniform(0.0, 100.0)
        dur = rng.uniform(1.0, 240.0)
        after = []
        hi = start + dur
        for _ in range(rng.randint(0, 3)):
            hi += rng.uniform(0.5, 30.0)
            after.append(hi)
        before = []
        lo = start
        for _ in range(rng.randint(0, 3)):
            lo -= rng.uniform(0.5, 30.0)
            before.append(lo)
        fit = fit_clip(baseline, (start, start + dur), tuple(after), tuple(before))
        assert 0.5 <= fit.speed <= 4.0
        assert round(fit.speed * 100, 6) == int(round(fit.speed * 100, 6))
        assert fit.covered[0] <= start
        if fit.residual is None:
            assert abs(fit.covered_duration * fit.speed - baseline) <= 1e-6
        else:
            assert fit.residual.seconds > 0
            assert fit.speed in (0.5, 4.0)


def test_transition_display_cases():
    assert (
        resolve_transition_display(4.0, (300.0, (0.0, 100.0)))
        is TransitionDisplay.B_ROLL_STARTS_EARLY
    )
    assert (
        resolve_transition_display(4.0, (60.0, (0.0, 60.0)))
        is TransitionDisplay.A_ROLL_FULL_SCREEN
    )
    assert resolve_transition_display(4.0, None) is TransitionDisplay.A_ROLL_FULL_SCREEN
    # the threshold itself is not "more than the threshold"
    assert (
        resolve_transition_display(4.0, (20.0, (0.0, 10.0)))
        is TransitionDisplay.A_ROLL_FULL_SCREEN
    )
    assert (
        resolve_transition_display(4.0, (20.0, (0.0, 10.0)), threshold=1.9)
        is TransitionDisplay.B_ROLL_STARTS_EARLY
    )


@pytest.mark.parametrize(
    "args",
    [
        (0.0, (10.0, (0.0, 5.0))),
        (4.0, (0.0, (0.0, 5.0))),
        (4.0, (10.0, (5.0, 5.0))),
    ],
)
def test_transition_display_invalid(args):
    with pytest.raises(InvalidSpan):
        resolve_transition_display(*args)


def test_overlays_fill_a_long_region():
    placements, diags = place_stylized_overlays([(0.0, 900.0)])
    assert [(p.start, p.shape) for p in placements] == [
        (0.0, OverlayShape.CIRCLE),
        (180.0, OverlayShape.RECT),
        (360.0, OverlayShape.CIRCLE),
        (540.0, OverlayShape.RECT),
    ]
    assert all(p.duration == 20.0 for p in placements)
    assert diags == []


def test_overlays_short_region_warns():
    placements, diags = place_stylized_overlays([(0.0, 200.0)])
    assert [p.start for p in placements] == [0.0, 180.0]
    assert len(diags) == 1
    assert diags[0].code == "StylizedOverlayShortfall"
    assert "placed 2 of 4" in diags[0].message


def test_overlays_empty_eligible_set():
    placements, diags = place_stylized_overlays([])
    assert placements == []
    assert [d.code for d in diags] == ["StylizedOverlayShortfall"]


def test_overlays_hop_between_intervals():
    placements, _ = place_stylized_overlays([(0.0, 30.0), (50.0, 300.0)])
    assert [p.start for p in placements] == [0.0, 180.0]
    # the second placement keeps the 180 s start-to-start spacing and fits
    # inside the second interval
    assert placements[1].end <= 300.0


def test_overlays_respect_min_gap_within_merged_input():
    placements, _ = place_stylized_overlays(
        [(100.0, 150.0), (140.0, 600.0)], count=3, min_gap=100.0, duration=10.0
    )
    assert [p.start for p in placements] == [100.0, 200.0, 300.0]
    assert [p.shape for p in placements] == [
        OverlayShape.CIRCLE,
        OverlayShape.RECT,
        OverlayShape.CIRCLE,
    ]


def test_overlays_ignore_degenerate_intervals():
    placements, diags = place_stylized_overlays([(5.0, 5.0), (30.0, 10.0)])
    assert placements == [] and len(diags) == 1


def test_overlays_random_instances_respect_spacing():
    rng = random.Random(11)
    for _ in range(100):
        intervals = []
        t = 0.0
        for _ in range(rng.randint(0, 6)):
            t += rng.uniform(0.0, 120.0)
            length = rng.uniform(0.0, 400.0)
            intervals.append((t, t + length))
            t += length
        placements, _ = place_stylized_overlays(intervals)
        assert len(placements) <= 4
        for a, b in zip(placements, placements[1:]):
            assert b.start - a.start >= 180.0 - 1e-9
        for p in placements:
            assert any(lo - 1e-9 <= p.start and p.end <= hi + 1e-9 for lo, hi in intervals)


# --- edit decision lists ---------------------------------------------------------


EMPTY_EDL = """\
{
  "version": "sima-edl/1",
  "split": "A",
  "duration_ms": 1000,
  "tracks": [
    {
      "track": "a_roll_mode",
      "events": []
    },
    {
      "track": "b_roll_video",
      "events": []
    },
    {
      "track": "image_overlay",
      "events": []
    },
    {
      "track": "transition_graphic",
      "events": []
    }
  ]
}
"""


def test_empty_edl_golden_text():
    assert export_edl(Timeline("A", 1000)) == EMPTY_EDL


def _sample_timeline() -> Timeline:
    return Timeline(
        split="B",
        duration_ms=95_500,
        a_roll_mode=(
            TimelineEvent(Track.A_ROLL_MODE, 0, 16_000, {"mode": "FullScreen"}),
            TimelineEvent(Track.A_ROLL_MODE, 16_000, 95_500, {"mode": "Hidden"}),
        ),
        b_roll_video=(
            TimelineEvent(
                Track.B_ROLL_VIDEO, 16_000, 40_000, {"asset": "v1001", "speed": "1.25"}
            ),
        ),
        image_overlay=(
            TimelineEvent(
                Track.IMAGE_OVERLAY,
                64_000,
                72_000,
                {"assets": ["1001"], "layout": "PictureInPicture"},
            ),
        ),
        transition_graphic=(
            TimelineEvent(Track.TRANSITION_GRAPHIC, 40_000, 44_000, {"graphic": "f0200.png"}),
        ),
    )


def test_edl_round_trip_identity():
    timeline = _sample_timeline()
    assert import_edl(export_edl(timeline)) == timeline


def test_edl_key_order_and_version():
    doc = json.loads(export_edl(_sample_timeline()))
    assert list(doc) == ["version", "split", "duration_ms", "tracks"]
    assert doc["version"] == EDL_VERSION == "sima-edl/1"
    assert [t["track"] for t in doc["tracks"]] == [
        "a_roll_mode",
        "b_roll_video",
        "image_overlay",
        "transition_graphic",
    ]
    event = doc["tracks"][1]["events"][0]
    assert list(event) == ["track", "start_ms", "end_ms", "payload"]


def test_edl_metadata_only_when_truthy():
    timeline = Timeline("A", 1000)
    assert "metadata" not in json.loads(export_edl(timeline))
    assert "metadata" not in json.loads(export_edl(timeline, {}))
    doc = json.loads(export_edl(timeline, {"generated": "2026-01-01T00:00:00"}))
    assert list(doc) == ["version", "split", "duration_ms", "metadata", "tracks"]
    assert doc["metadata"] == {"generated": "2026-01-01T00:00:00"}


@pytest.mark.parametrize(
    "mangle,message",
    [
        (lambda d: d.update(version="sima-edl/2"), "unsupported EDL version"),
        (lambda d: d.pop("tracks"), "bad EDL document"),
        (lambda d: d.pop("duration_ms"), "bad EDL document"),
        (
            lambda d: d["tracks"][1]["events"].append(
                {"track": "b_roll_video", "start_ms": 5, "end_ms": 5, "payload": {}}
            ),
            "bad event interval",
        ),
        (
            lambda d: d["tracks"][0]["events"].append(
                {"track": "no_such_track", "start_ms": 0, "end_ms": 5, "payload": {}}
            ),
            "bad EDL document",
        ),
    ],
)
def test_edl_import_errors(mangle, message):
    doc = json.loads(export_edl(_sample_timeline()))
    mangle(doc)
    with pytest.raises(CompileError, match=message):
        import_edl(json.dumps(doc))


def test_edl_import_rejects_non_json():
    with pytest.raises(CompileError, match="bad EDL document"):
        import_edl("not json at all")
    with pytest.raises(CompileError, match="bad EDL document"):
        import_edl("[1, 2, 3]")
