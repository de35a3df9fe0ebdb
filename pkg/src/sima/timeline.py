"""Compile an aligned, annotated script into per-split edit timelines.

The compiler turns tag spans plus sentence timings into events on four
tracks (A-roll display mode, B-roll video, image overlay, transition
graphic), fits each B-roll clip to its narration span by time-remapping,
plans the stylized presenter overlays, reports coverage gaps, and exports
the result as a versioned edit decision list.

Every sentence owns a half-open window on the split timeline that runs
from its aligned start to the next sentence's start (the first window is
pulled back to the split start, the last one runs to the split end), so
the windows tile the timeline exactly and all interval arithmetic is done
on integer milliseconds.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from enum import Enum

from sima.annotation import (
    AnnotatedScript,
    AssetId,
    CtaKind,
    Part,
    TagSpan,
    collect_spans,
)
from sima.captions import AlignedScript
from sima.diagnostics import Diagnostic, Severity
from sima.estimator import SplitRange, plan_splits
from sima.manifest import transition_graphic_name
from sima.timefmt import fmt_speed, from_ms, to_ms

EDL_VERSION = "sima-edl/1"


class InvalidSpan(ValueError):
    """A clip span (or extension candidate) that is empty or inverted."""


class CompileError(Exception):
    pass


class Track(Enum):
    A_ROLL_MODE = "a_roll_mode"
    B_ROLL_VIDEO = "b_roll_video"
    IMAGE_OVERLAY = "image_overlay"
    TRANSITION_GRAPHIC = "transition_graphic"


class ARollMode(Enum):
    FULL_SCREEN = "FullScreen"
    HIDDEN = "Hidden"
    OVERLAY_CIRCLE = "OverlayCircle"
    OVERLAY_RECT = "OverlayRect"


class ImageLayout(Enum):
    FULL_SCREEN_IMAGE = "FullScreenImage"
    PICTURE_IN_PICTURE = "PictureInPicture"


class OverlayShape(Enum):
    CIRCLE = "Circle"
    RECT = "Rect"


class TransitionDisplay(Enum):
    A_ROLL_FULL_SCREEN = "ARollFullScreen"
    B_ROLL_STARTS_EARLY = "BRollStartsEarly"


class ResidualKind(Enum):
    UNCOVERED = "Uncovered"
    TRUNCATED = "Truncated"


@dataclass(frozen=True)
class Residual:
    """Timeline seconds a clip could not handle even at the hard speed bounds."""

    kind: ResidualKind
    seconds: float


@dataclass(frozen=True)
class FitResult:
    asset: AssetId | None
    speed: float
    covered: tuple[float, float]
    extended_before: int = 0
    extended_after: int = 0
    residual: Residual | None = None

    @property
    def covered_duration(self) -> float:
        return self.covered[1] - self.covered[0]


@dataclass(frozen=True)
class TimelineEvent:
    track: Track
    start_ms: int
    end_ms: int
    payload: dict

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms


@dataclass(frozen=True)
class Timeline:
    split: str
    duration_ms: int
    a_roll_mode: tuple[TimelineEvent, ...] = ()
    b_roll_video: tuple[TimelineEvent, ...] = ()
    image_overlay: tuple[TimelineEvent, ...] = ()
    transition_graphic: tuple[TimelineEvent, ...] = ()

    def events(self, track: Track) -> tuple[TimelineEvent, ...]:
        if track is Track.A_ROLL_MODE:
            return self.a_roll_mode
        if track is Track.B_ROLL_VIDEO:
            return self.b_roll_video
        if track is Track.IMAGE_OVERLAY:
            return self.image_overlay
        return self.transition_graphic


@dataclass(frozen=True)
class GapEntry:
    """An interval where the A-roll is visible with nothing planned for it."""

    start_ms: int
    end_ms: int
    part: int
    first_sentence: int
    last_sentence: int
    suggestion: str
    severity: Severity


@dataclass(frozen=True)
class CoverageReport:
    split: str
    duration_ms: int
    covered: tuple[tuple[int, int], ...]
    mandatory: tuple[tuple[int, int], ...]
    gaps: tuple[GapEntry, ...]

    @property
    def covered_ms(self) -> int:
        return sum(b - a for a, b in self.covered)

    @property
    def mandatory_ms(self) -> int:
        return sum(b - a for a, b in self.mandatory)

    @property
    def gap_ms(self) -> int:
        return sum(g.end_ms - g.start_ms for g in self.gaps)


@dataclass(frozen=True)
class OverlayPlacement:
    start: float
    duration: float
    shape: OverlayShape

    @property
    def end(self) -> float:
        return self.start + self.duration


@dataclass(frozen=True)
class CompileOptions:
    split_count: int = 3
    preferred_band: tuple[float, float] = (0.75, 2.0)
    hard_band: tuple[float, float] = (0.5, 4.0)
    transition_duration: float = 4.0
    early_start_threshold: float = 2.0
    extension_sentences: int = 2
    overlay_count: int = 4
    overlay_duration: float = 20.0
    overlay_min_gap: float = 180.0


@dataclass(frozen=True)
class CompileResult:
    timeline: Timeline
    fits: tuple[FitResult, ...]
    report: CoverageReport
    script: AnnotatedScript
    overlays: tuple[OverlayPlacement, ...]
    diagnostics: tuple[Diagnostic, ...]


# --- clip fitting -----------------------------------------------------------------


def fit_clip(
    baseline: float,
    target_span: tuple[float, float],
    extend_after: tuple[float, ...] = (),
    extend_before: tuple[float, ...] = (),
    *,
    asset: AssetId | None = None,
    preferred_band: tuple[float, float] = (0.75, 2.0),
    hard_band: tuple[float, float] = (0.5, 4.0),
) -> FitResult:
    """Choose a playback speed that fits a clip into a narration span.

    The required speed is baseline / span duration.  While it sits above the
    preferred band the span is widened into the extension candidates, nearest
    first, alternating after/before (``extend_after`` holds successive later
    end positions, ``extend_before`` successive earlier start positions); an
    extension that would overshoot the span below the preferred band is
    skipped.  The final speed is floored to two decimals, which never
    sacrifices coverage, and clamped to the hard band: past the high bound the
    clip is truncated to the span, past the low bound the tail of the span is
    left uncovered.  The residual reports either remainder in timeline
    seconds.
    """
    start, end = target_span
    if baseline <= 0:
        raise InvalidSpan(f"baseline duration must be positive, got {baseline}")
    if end - start <= 0:
        raise InvalidSpan(f"target span is empty: {target_span}")
    low, high = preferred_band
    hard_low, hard_high = hard_band
    after = list(extend_after)
    before = list(extend_before)
    taken_after = taken_before = 0
    dead = [not after, not before]
    prefer = 0  # 0 widens after the span, 1 widens before; alternates on success
    while baseline / (end - start) > high and not all(dead):
        moved = False
        for side in (prefer, 1 - prefer):
            if dead[side]:
                continue
            if side == 0:
                cand = after[taken_after]
                if cand <= end:
                    raise InvalidSpan(f"extension end {cand} does not extend the span")
                if baseline / (cand - start) < low:
                    dead[0] = True
                    continue
                end = cand
                taken_after += 1
                dead[0] = taken_after >= len(after)
            else:
                cand = before[taken_before]
                if cand >= start:
                    raise InvalidSpan(f"extension start {cand} does not extend the span")
                if baseline / (end - cand) < low:
                    dead[1] = True
                    continue
                start = cand
                taken_before += 1
                dead[1] = taken_before >= len(before)
            prefer = 1 - side
            moved = True
            break
        if not moved:
            break
    duration = end - start
    required = baseline / duration
    if required > hard_high:
        speed = hard_high
        covered = (start, end)
        residual = Residual(ResidualKind.TRUNCATED, baseline / hard_high - duration)
    elif required < hard_low:
        speed = hard_low
        covered = (start, start + baseline / hard_low)
        residual = Residual(ResidualKind.UNCOVERED, duration - baseline / hard_low)
    else:
        speed = max(hard_low, math.floor(required * 100 + 1e-9) / 100.0)
        covered = (start, start + baseline / speed)
        residual = None
    return FitResult(asset, speed, covered, taken_before, taken_after, residual)


def resolve_transition_display(
    transition_duration: float,
    next_clip: tuple[float, tuple[float, float]] | None = None,
    *,
    threshold: float = 2.0,
) -> TransitionDisplay:
    """Decide what shows behind a part's transition graphic.

    When the upcoming clip would need more than the threshold speed on its
    annotated span, starting its B-roll early (widening the span by the
    transition duration) relieves the remap and covers the transition; the
    A-roll stays hidden.  Otherwise the A-roll plays full screen beneath the
    graphic.
    """
    if transition_duration <= 0:
        raise InvalidSpan(f"transition duration must be positive, got {transition_duration}")
    if next_clip is None:
        return TransitionDisplay.A_ROLL_FULL_SCREEN
    baseline, (start, end) = next_clip
    if baseline <= 0 or end - start <= 0:
        raise InvalidSpan(f"next clip span is empty: {next_clip}")
    if baseline / (end - start) > threshold:
        return TransitionDisplay.B_ROLL_STARTS_EARLY
    return TransitionDisplay.A_ROLL_FULL_SCREEN


# --- stylized presenter overlays ----------------------------------------------------

_SHAPE_CYCLE = (OverlayShape.CIRCLE, OverlayShape.RECT)


def _merge_seconds(intervals) -> list[tuple[float, float]]:
    merged: list[list[float]] = []
    for a, b in sorted((float(a), float(b)) for a, b in intervals):
        if b - a <= 0:
            continue
        if merged and a <= merged[-1][1] + 1e-9:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return [(a, b) for a, b in merged]


def place_stylized_overlays(
    eligible,
    *,
    count: int = 4,
    duration: float = 20.0,
    min_gap: float = 180.0,
) -> tuple[list[OverlayPlacement], list[Diagnostic]]:
    """Place presenter overlays inside B-roll-covered time.

    ``eligible`` is an iterable of (start, end) second intervals where a
    B-roll video covers the A-roll and overlays are allowed.  Placements are
    greedy-earliest, pairwise at least ``min_gap`` apart start-to-start, each
    fully inside one eligible interval, shapes alternating Circle/Rect.  If
    fewer than ``count`` fit, a WARN reports the achieved count; the greedy
    sweep makes that count the maximum feasible.
    """
    starts: list[float] = []
    next_allowed = -math.inf
    for lo, hi in _merge_seconds(eligible):
        latest = hi - duration
        t = max(lo, next_allowed)
        while t <= latest + 1e-9 and len(starts) < count:
            starts.append(t)
            next_allowed = t + min_gap
            t = next_allowed
        if len(starts) >= count:
            break
    placements = [
        OverlayPlacement(t, duration, _SHAPE_CYCLE[i % len(_SHAPE_CYCLE)])
        for i, t in enumerate(starts)
    ]
    diagnostics: list[Diagnostic] = []
    if len(placements) < count:
        diagnostics.append(
            Diagnostic(
                Severity.WARN,
                "StylizedOverlayShortfall",
                f"placed {len(placements)} of {count} stylized overlays;"
                " not enough eligible B-roll coverage",
            )
        )
    return placements, diagnostics


# --- split compilation ---------------------------------------------------------------


def _resolve_split(ranges: list[SplitRange], split) -> SplitRange:
    if isinstance(split, SplitRange):
        split = split.id
    if isinstance(split, int):
        if 1 <= split <= len(ranges):
            return ranges[split - 1]
        raise CompileError(f"split index {split} out of range 1..{len(ranges)}")
    label = str(split).strip().upper()
    for r in ranges:
        if r.id == label:
            return r
    known = ", ".join(r.id for r in ranges)
    raise CompileError(f"unknown split {split!r}; splits are {known}")


def _subtract_ms(interval: tuple[int, int], blocked: list[tuple[int, int]]) -> list[tuple[int, int]]:
    pieces = [interval]
    for lo, hi in blocked:
        out: list[tuple[int, int]] = []
        for a, b in pieces:
            if hi <= a or lo >= b:
                out.append((a, b))
                continue
            if a < lo:
                out.append((a, lo))
            if hi < b:
                out.append((hi, b))
        pieces = out
    return [(a, b) for a, b in pieces if b > a]


def _intersect_ms(xs: list[tuple[int, int]], ys: list[tuple[int, int]]) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []
    for a, b in xs:
        for lo, hi in ys:
            s, e = max(a, lo), min(b, hi)
            if e > s:
                out.append((s, e))
    return sorted(out)


def _merge_ms(intervals) -> list[tuple[int, int]]:
    merged: list[list[int]] = []
    for a, b in sorted(intervals):
        if b <= a:
            continue
        if merged and a <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    return [(a, b) for a, b in merged]


def _disjoint_events(events: list[TimelineEvent]) -> list[TimelineEvent]:
    """Clip same-track events front-to-back so the track is pairwise disjoint."""
    out: list[TimelineEvent] = []
    prev_end = 0
    for ev in sorted(events, key=lambda e: (e.start_ms, e.end_ms)):
        start = max(ev.start_ms, prev_end)
        if start >= ev.end_ms:
            continue
        if start != ev.start_ms:
            ev = TimelineEvent(ev.track, start, ev.end_ms, ev.payload)
        out.append(ev)
        prev_end = ev.end_ms
    return out


class _SplitFrame:
    """Window and region arithmetic for one split's timed sentences."""

    def __init__(self, parts: list[Part], timing: AlignedScript):
        self.parts = parts
        seq: list[tuple[int, int, int, int]] = []  # (part, sentence, start_ms, end_ms)
        for part in parts:
            for idx in range(1, len(part.sentences) + 1):
                try:
                    s, e = timing.interval(part.index, idx)
                except KeyError:
                    raise CompileError(
                        f"no timing for part {part.index} sentence {idx}"
                    ) from None
                seq.append((part.index, idx, to_ms(s), to_ms(e)))
        if not seq:
            raise CompileError("split has no timed sentences")
        for (_, _, prev, _), (p, i, cur, _) in zip(seq, seq[1:]):
            if cur < prev:
                raise CompileError(f"sentence timings are not monotonic at part {p} sentence {i}")
        self.seq = seq
        self.duration = seq[-1][3]
        if self.duration <= 0:
            raise CompileError("split duration is not positive")
        self.w_start: dict[tuple[int, int], int] = {}
        self.w_end: dict[tuple[int, int], int] = {}
        for i, (p, idx, start, _) in enumerate(seq):
            ws = 0 if i == 0 else start
            we = seq[i + 1][2] if i + 1 < len(seq) else self.duration
            self.w_start[(p, idx)] = ws
            self.w_end[(p, idx)] = max(ws, we)
        # region of part p: from its first sentence window to the next part's
        self.region: dict[int, tuple[int, int]] = {}
        timed_parts = []
        for p, idx, _, _ in seq:
            if not timed_parts or timed_parts[-1] != p:
                timed_parts.append(p)
        for j, p in enumerate(timed_parts):
            first_idx = next(i for q, i, _, _ in seq if q == p)
            lo = self.w_start[(p, first_idx)]
            hi = self.w_start[self._first_key(timed_parts[j + 1])] if j + 1 < len(timed_parts) else self.duration
            self.region[p] = (lo, hi)

    def _first_key(self, part: int) -> tuple[int, int]:
        for p, idx, _, _ in self.seq:
            if p == part:
                return (p, idx)
        raise KeyError(part)

    def span_interval(self, part: int, first: int, last: int) -> tuple[int, int]:
        return self.w_start[(part, first)], self.w_end[(part, last)]

    def part_at(self, t: int) -> int:
        for p, (lo, hi) in self.region.items():
            if lo <= t < hi:
                return p
        return self.seq[0][0]

    def sentences_overlapping(self, part: int, lo: int, hi: int) -> list[int]:
        hits = []
        for p, idx, _, _ in self.seq:
            if p != part:
                continue
            if self.w_start[(p, idx)] < hi and self.w_end[(p, idx)] > lo:
                hits.append(idx)
        return hits


def compile_split(
    script: AnnotatedScript,
    timing: AlignedScript,
    split,
    options: CompileOptions = CompileOptions(),
) -> CompileResult:
    """Compile one split of the script into a timeline plus its reports.

    Pure function: identical inputs give identical results; the returned
    script is a deep copy with video tag speeds rewritten to the fitted
    values.
    """
    total_parts = script.part_count
    if total_parts == 0:
        raise CompileError("script has no parts")
    ranges = plan_splits(total_parts, min(options.split_count, total_parts))
    srange = _resolve_split(ranges, split)
    parts = [script.parts[i - 1] for i in srange.parts()]
    part_ids = [p.index for p in parts]
    frame = _SplitFrame(parts, timing)
    duration = frame.duration
    diagnostics: list[Diagnostic] = []

    # 1. mandatory CTA intervals
    cta_intervals: list[tuple[int, int]] = []
    cta_sentences: dict[int, set[int]] = {p.index: p.cta_sentences() for p in parts}
    if 1 in part_ids:
        region = script.parts[0].cta_region(CtaKind.INTRO)
        if region is None:
            raise CompileError("part 1 must contain an intro CTA region")
        cta_intervals += _cta_interval(frame, 1, region)
    if total_parts in part_ids and total_parts >= 2:
        region = script.parts[-1].cta_region(CtaKind.CONCL)
        if region is None:
            raise CompileError("the final part must contain a concluding CTA region")
        cta_intervals += _cta_interval(frame, total_parts, region)
    cta_intervals = _merge_ms(cta_intervals)

    # 2. spans
    video_spans: list[tuple[Part, TagSpan]] = []
    image_spans: list[tuple[Part, TagSpan]] = []
    for part in parts:
        for span in collect_spans(part):
            (video_spans if span.is_video else image_spans).append((part, span))
    video_spans.sort(key=lambda ps: (ps[0].index, ps[1].first_sentence, ps[1].last_sentence))
    image_spans.sort(key=lambda ps: (ps[0].index, ps[1].first_sentence, ps[1].last_sentence))

    # 3. transition graphics and early-start resolution
    transition_events: list[TimelineEvent] = []
    transition_ms = to_ms(options.transition_duration)
    early_start: dict[int, int] = {}  # id(span.open) -> pulled-back start_ms
    for part in parts:
        if part.index < 2 or part.index not in frame.region:
            continue
        lo, hi = frame.region[part.index]
        t_end = min(lo + transition_ms, hi)
        if t_end <= lo:
            continue
        transition_events.append(
            TimelineEvent(
                Track.TRANSITION_GRAPHIC,
                lo,
                t_end,
                {"graphic": transition_graphic_name(part.index, total_parts)},
            )
        )
        lead = next(
            (
                (p, s)
                for p, s in video_spans
                if p.index == part.index and s.first_sentence <= 2 and s.sentence_count > 0
            ),
            None,
        )
        if lead is None:
            continue
        _, span = lead
        s_ms, e_ms = frame.span_interval(part.index, span.first_sentence, span.last_sentence)
        if e_ms <= s_ms:
            continue
        display = resolve_transition_display(
            options.transition_duration,
            (span.open.baseline_duration or 0.0, (from_ms(s_ms), from_ms(e_ms))),
            threshold=options.early_start_threshold,
        )
        if display is TransitionDisplay.B_ROLL_STARTS_EARLY:
            early_start[id(span.open)] = lo

    # 4. fit and place B-roll video
    fits: list[FitResult] = []
    fitted_spans: list[TagSpan] = []
    broll_events: list[TimelineEvent] = []
    span_pieces: dict[int, list[tuple[int, int]]] = {}  # id(open tag) -> event pieces
    video_sentences: dict[int, dict[int, set[int]]] = {p.index: {} for p in parts}
    for part, span in video_spans:
        video_sentences[part.index][id(span.open)] = set(span.sentences())
    for part, span in video_spans:
        if span.sentence_count == 0:
            continue
        p = part.index
        region_lo, region_hi = frame.region[p]
        s_ms, e_ms = frame.span_interval(p, span.first_sentence, span.last_sentence)
        pulled = id(span.open) in early_start
        if pulled:
            s_ms = min(s_ms, early_start[id(span.open)])
        if e_ms <= s_ms:
            continue
        foreign = set()
        for key, sents in video_sentences[p].items():
            if key != id(span.open):
                foreign |= sents
        blocked = foreign | cta_sentences[p]
        after: list[float] = []
        j = span.last_sentence + 1
        while j <= len(part.sentences) and len(after) < options.extension_sentences:
            if j in blocked:
                break
            after.append(from_ms(frame.w_end[(p, j)]))
            j += 1
        before: list[float] = []
        j = span.first_sentence - 1
        while not pulled and j >= 1 and len(before) < options.extension_sentences:
            if j in blocked:
                break
            before.append(from_ms(frame.w_start[(p, j)]))
            j -= 1
        fit = fit_clip(
            span.open.baseline_duration or 0.0,
            (from_ms(s_ms), from_ms(e_ms)),
            tuple(after),
            tuple(before),
            asset=span.open.ids[0],
            preferred_band=options.preferred_band,
            hard_band=options.hard_band,
        )
        fits.append(fit)
        fitted_spans.append(span)
        ev_lo = max(0, to_ms(fit.covered[0]))
        ev_hi = min(to_ms(fit.covered[1]), region_hi, duration)
        pieces = _subtract_ms((ev_lo, ev_hi), cta_intervals) if ev_hi > ev_lo else []
        span_pieces[id(span.open)] = pieces
        for lo, hi in pieces:
            broll_events.append(
                TimelineEvent(
                    Track.B_ROLL_VIDEO,
                    lo,
                    hi,
                    {"asset": span.open.ids[0].render(), "speed": fmt_speed(fit.speed)},
                )
            )
    broll_events = _disjoint_events(broll_events)

    # 5. image overlays
    image_events: list[TimelineEvent] = []
    for part, span in image_spans:
        if span.sentence_count == 0:
            continue
        p = part.index
        s_ms, e_ms = frame.span_interval(p, span.first_sentence, span.last_sentence)
        if e_ms <= s_ms:
            continue
        assets = [a.render() for a in span.open.ids]
        if span.parent_open is not None:
            parent = span_pieces.get(id(span.parent_open), [])
            pieces = _intersect_ms([(s_ms, e_ms)], parent)
            layout = ImageLayout.PICTURE_IN_PICTURE
        else:
            pieces = _subtract_ms((s_ms, e_ms), cta_intervals)
            layout = ImageLayout.FULL_SCREEN_IMAGE
        for lo, hi in pieces:
            image_events.append(
                TimelineEvent(
                    Track.IMAGE_OVERLAY,
                    lo,
                    hi,
                    {"assets": assets, "layout": layout.value},
                )
            )
    image_events = _disjoint_events(image_events)

    # 6. partition the timeline: cta > covered > transition > gap
    covering = _merge_ms(
        [(e.start_ms, e.end_ms) for e in broll_events]
        + [
            (e.start_ms, e.end_ms)
            for e in image_events
            if e.payload["layout"] == ImageLayout.FULL_SCREEN_IMAGE.value
        ]
    )
    transition_iv = [(e.start_ms, e.end_ms) for e in transition_events]
    points = {0, duration}
    for lo, hi in cta_intervals + covering + transition_iv:
        points.update((lo, hi))
    for lo, hi in frame.region.values():
        points.update((lo, hi))
    cuts = sorted(pt for pt in points if 0 <= pt <= duration)

    def _inside(t: int, intervals) -> bool:
        return any(lo <= t < hi for lo, hi in intervals)

    pieces: list[tuple[int, int, str, int]] = []
    for a, b in zip(cuts, cuts[1:]):
        if b <= a:
            continue
        if _inside(a, cta_intervals):
            label = "cta"
        elif _inside(a, covering):
            label = "covered"
        elif _inside(a, transition_iv):
            label = "transition"
        else:
            label = "gap"
        pieces.append((a, b, label, frame.part_at(a)))

    covered_iv = _merge_ms([(a, b) for a, b, label, _ in pieces if label == "covered"])
    mandatory_iv = _merge_ms([(a, b) for a, b, label, _ in pieces if label in ("cta", "transition")])
    gaps: list[GapEntry] = []
    for a, b, label, p in pieces:
        if label != "gap":
            continue
        if gaps and gaps[-1].end_ms == a and gaps[-1].part == p:
            prev = gaps.pop()
            a = prev.start_ms
        sentences = frame.sentences_overlapping(p, a, b)
        first = sentences[0] if sentences else 0
        last = sentences[-1] if sentences else 0
        part = script.parts[p - 1]
        text = part.sentences[first - 1].text if sentences else ""
        severity = Severity.ERROR if p == 1 else Severity.WARN
        gaps.append(
            GapEntry(a, b, p, first, last, f'source a supplementary image for: "{text}"', severity)
        )
    for gap in gaps:
        if gap.part == 1:
            diagnostics.append(
                Diagnostic(
                    Severity.ERROR,
                    "Part1UncoveredNarration",
                    f"part 1 sentences {gap.first_sentence}-{gap.last_sentence} are uncovered"
                    " but must be hidden behind B-roll",
                )
            )

    # 7. stylized overlays within parts 2..P-1
    overlay_regions = [
        frame.region[p.index]
        for p in parts
        if 2 <= p.index <= total_parts - 1 and p.index in frame.region
    ]
    eligible_ms = _intersect_ms(
        _merge_ms([(e.start_ms, e.end_ms) for e in broll_events]), _merge_ms(overlay_regions)
    )
    placements, overlay_diags = place_stylized_overlays(
        [(from_ms(a), from_ms(b)) for a, b in eligible_ms],
        count=options.overlay_count,
        duration=options.overlay_duration,
        min_gap=options.overlay_min_gap,
    )
    diagnostics.extend(overlay_diags)

    # 8. A-roll display mode track
    overlay_iv = [
        (to_ms(pl.start), to_ms(pl.end), pl.shape) for pl in placements
    ]
    mode_points = set(cuts)
    for lo, hi, _ in overlay_iv:
        mode_points.update((lo, hi))
    mode_cuts = sorted(pt for pt in mode_points if 0 <= pt <= duration)
    mode_pieces: list[tuple[int, int, ARollMode]] = []
    for a, b in zip(mode_cuts, mode_cuts[1:]):
        if b <= a:
            continue
        shape = next((sh for lo, hi, sh in overlay_iv if lo <= a < hi), None)
        if shape is not None:
            mode = (
                ARollMode.OVERLAY_CIRCLE if shape is OverlayShape.CIRCLE else ARollMode.OVERLAY_RECT
            )
        elif _inside(a, cta_intervals):
            mode = ARollMode.FULL_SCREEN
        elif _inside(a, covering):
            mode = ARollMode.HIDDEN
        elif _inside(a, transition_iv):
            mode = ARollMode.FULL_SCREEN
        elif frame.part_at(a) == 1:
            mode = ARollMode.HIDDEN
        else:
            mode = ARollMode.FULL_SCREEN
        if mode_pieces and mode_pieces[-1][1] == a and mode_pieces[-1][2] is mode:
            mode_pieces[-1] = (mode_pieces[-1][0], b, mode)
        else:
            mode_pieces.append((a, b, mode))
    mode_events = [
        TimelineEvent(Track.A_ROLL_MODE, a, b, {"mode": mode.value}) for a, b, mode in mode_pieces
    ]

    # 9. rewrite fitted speeds into a copy of the script
    new_script = copy.deepcopy(script)
    for span, fit in zip(fitted_spans, fits):
        part = next(p for p in parts if p.index == span.part)
        pos = next(i for i, tok in enumerate(part.tokens) if tok is span.open)
        new_script.parts[span.part - 1].tokens[pos].speed = fit.speed

    timeline = Timeline(
        split=srange.id,
        duration_ms=duration,
        a_roll_mode=tuple(mode_events),
        b_roll_video=tuple(broll_events),
        image_overlay=tuple(image_events),
        transition_graphic=tuple(sorted(transition_events, key=lambda e: e.start_ms)),
    )
    report = CoverageReport(
        split=srange.id,
        duration_ms=duration,
        covered=tuple(covered_iv),
        mandatory=tuple(mandatory_iv),
        gaps=tuple(gaps),
    )
    return CompileResult(
        timeline=timeline,
        fits=tuple(fits),
        report=report,
        script=new_script,
        overlays=tuple(placements),
        diagnostics=tuple(diagnostics),
    )


def _cta_interval(frame: _SplitFrame, part: int, region) -> list[tuple[int, int]]:
    sentences = list(region.sentences())
    if not sentences:
        return []
    lo, hi = frame.span_interval(part, sentences[0], sentences[-1])
    return [(lo, hi)] if hi > lo else []


# --- edit decision list ---------------------------------------------------------------

_TRACK_ORDER = (
    Track.A_ROLL_MODE,
    Track.B_ROLL_VIDEO,
    Track.IMAGE_OVERLAY,
    Track.TRANSITION_GRAPHIC,
)


def export_edl(timeline: Timeline, metadata: dict | None = None) -> str:
    """Serialize a timeline as the versioned JSON edit decision list."""
    doc: dict = {
        "version": EDL_VERSION,
        "split": timeline.split,
        "duration_ms": timeline.duration_ms,
    }
    if metadata:
        doc["metadata"] = metadata
    doc["tracks"] = [
        {
            "track": track.value,
            "events": [
                {
                    "track": ev.track.value,
                    "start_ms": ev.start_ms,
                    "end_ms": ev.end_ms,
                    "payload": ev.payload,
                }
                for ev in timeline.events(track)
            ],
        }
        for track in _TRACK_ORDER
    ]
    return json.dumps(doc, indent=2) + "\n"


def import_edl(text: str) -> Timeline:
    """Parse an EDL document back into a Timeline (inverse of export_edl)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CompileError(f"bad EDL document: {exc}") from None
    if not isinstance(doc, dict) or doc.get("version") != EDL_VERSION:
        raise CompileError(f"unsupported EDL version {doc.get('version')!r}"
                           if isinstance(doc, dict) else "bad EDL document")
    tracks: dict[Track, list[TimelineEvent]] = {track: [] for track in _TRACK_ORDER}
    try:
        split = doc["split"]
        duration = int(doc["duration_ms"])
        for track_doc in doc["tracks"]:
            track = Track(track_doc["track"])
            for ev in track_doc["events"]:
                event = TimelineEvent(
                    Track(ev["track"]), int(ev["start_ms"]), int(ev["end_ms"]), ev["payload"]
                )
                if event.start_ms >= event.end_ms:
                    raise CompileError(f"bad event interval in EDL: {ev}")
                tracks[track].append(event)
    except (KeyError, TypeError, ValueError) as exc:
        raise CompileError(f"bad EDL document: {exc}") from None
    return Timeline(
        split=split,
        duration_ms=duration,
        a_roll_mode=tuple(tracks[Track.A_ROLL_MODE]),
        b_roll_video=tuple(tracks[Track.B_ROLL_VIDEO]),
        image_overlay=tuple(tracks[Track.IMAGE_OVERLAY]),
        transition_graphic=tuple(tracks[Track.TRANSITION_GRAPHIC]),
    )
