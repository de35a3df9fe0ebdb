"""Caption parsing, recording-polish cuts, and script-to-caption alignment.

Raw transcripts arrive as SRT or WebVTT. Polishing derives the cut list an
editor would apply to the recording: long inter-cue silences, all but the
last take of repeated sentences, and filler/garbage cues, then retimes the
surviving cues onto the shortened timeline. Alignment then assigns each
script sentence an interval on that polished timeline.

All arithmetic runs on integer milliseconds; cue times are exact multiples
of 0.001 s.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from difflib import SequenceMatcher
from enum import Enum

from sima.timefmt import from_ms, to_ms

DEFAULT_ANOMALY_LEXICON: tuple[str, ...] = (
    "um", "uh", "umm", "uhh", "erm", "er", "hmm", "mm", "mhm", "ah", "eh",
)


class CaptionFormat(Enum):
    SRT = "srt"
    VTT = "vtt"


class FormatError(Exception):
    """Malformed caption input; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line

    def __str__(self) -> str:
        return f"line {self.line or 0}: {self.message}"


@dataclass(frozen=True)
class CaptionCue:
    index: int
    start: float
    end: float
    text: str

    @property
    def duration(self) -> float:
        return from_ms(to_ms(self.end) - to_ms(self.start))


class CutReason(Enum):
    SILENCE = "silence"
    REDUNDANT_TAKE = "redundant_take"
    ANOMALY = "anomaly"


@dataclass(frozen=True)
class CutInterval:
    start: float
    end: float
    reason: CutReason

    @property
    def duration(self) -> float:
        return from_ms(to_ms(self.end) - to_ms(self.start))


@dataclass
class PolishConfig:
    silence_threshold: float = 1.5
    similarity_threshold: float = 0.8
    anomaly_lexicon: tuple[str, ...] = DEFAULT_ANOMALY_LEXICON


@dataclass
class PolishResult:
    cuts: list[CutInterval]
    cues: list[CaptionCue]
    raw_duration: float
    polished_duration: float


class AlignmentError(Exception):
    pass


@dataclass
class AlignedScript:
    """Per-sentence (part, index) -> (start, end) timing on the polished timeline."""

    timings: dict[tuple[int, int], tuple[float, float]] = field(default_factory=dict)
    matched: int = 0
    total: int = 0

    def interval(self, part: int, sentence: int) -> tuple[float, float]:
        return self.timings[(part, sentence)]

    @property
    def end(self) -> float:
        return max((iv[1] for iv in self.timings.values()), default=0.0)


# --- caption file formats -------------------------------------------------------

_TS_RE = re.compile(r"^(?:(\d{1,3}):)?(\d{1,2}):(\d{1,2})[.,](\d{3})$")
_ARROW = "-->"


def _parse_ts(token: str, line: int) -> int:
    m = _TS_RE.match(token.strip())
    if not m:
        raise FormatError(f"bad timestamp {token.strip()!r}", line)
    h = int(m.group(1)) if m.group(1) else 0
    minute, sec, ms = int(m.group(2)), int(m.group(3)), int(m.group(4))
    if minute >= 60 or sec >= 60:
        raise FormatError(f"bad timestamp {token.strip()!r}", line)
    return ((h * 60 + minute) * 60 + sec) * 1000 + ms


def _fmt_ts(seconds: float, sep: str) -> str:
    ms = to_ms(seconds)
    return (
        f"{ms // 3_600_000:02d}:{ms // 60_000 % 60:02d}:{ms // 1000 % 60:02d}{sep}{ms % 1000:03d}"
    )


def parse_captions(text: str, fmt: CaptionFormat) -> list[CaptionCue]:
    """Parse SRT or WebVTT text into cues, enforcing timing and ordering sanity."""
    lines = text.lstrip("﻿").splitlines()
    pos = 0
    if fmt is CaptionFormat.VTT:
        while pos < len(lines) and not lines[pos].strip():
            pos += 1
        if pos >= len(lines) or not lines[pos].strip().startswith("WEBVTT"):
            raise FormatError("missing WEBVTT header", pos + 1)
        pos += 1

    cues: list[CaptionCue] = []
    counter = 0
    prev_start_ms: int | None = None
    prev_index: int | None = None
    while pos < len(lines):
        while pos < len(lines) and not lines[pos].strip():
            pos += 1
        if pos >= len(lines):
            break
        block_start = pos
        block: list[str] = []
        while pos < len(lines) and lines[pos].strip():
            block.append(lines[pos])
            pos += 1
        if fmt is CaptionFormat.VTT and block[0].split(" ")[0] in ("NOTE", "STYLE", "REGION"):
            continue

        ident: str | None
        if _ARROW in block[0]:
            ident, timing, text_lines = None, block[0], block[1:]
            timing_line = block_start + 1
        elif len(block) >= 2 and _ARROW in block[1]:
            ident, timing, text_lines = block[0].strip(), block[1], block[2:]
            timing_line = block_start + 2
        else:
            raise FormatError("cue block is missing its timing line", block_start + 1)

        if fmt is CaptionFormat.SRT:
            if ident is None or not ident.isdigit():
                raise FormatError("cue block is missing its integer index", block_start + 1)
            index = int(ident)
        else:
            index = int(ident) if ident is not None and ident.isdigit() else counter + 1

        left, _, right = timing.partition(_ARROW)
        start_ms = _parse_ts(left, timing_line)
        end_ms = _parse_ts(right.split(" ")[-1] if right.strip() else right, timing_line)
        if end_ms <= start_ms:
            raise FormatError("cue end must come after its start", timing_line)
        if prev_start_ms is not None and start_ms < prev_start_ms:
            raise FormatError("cues are not sorted by start time", timing_line)
        if prev_index is not None and index <= prev_index:
            raise FormatError("cue indices must be strictly increasing", block_start + 1)
        cues.append(CaptionCue(index, from_ms(start_ms), from_ms(end_ms), "\n".join(text_lines)))
        counter = index
        prev_start_ms = start_ms
        prev_index = index
    return cues


def export_captions(cues: list[CaptionCue], fmt: CaptionFormat) -> str:
    """Render cues as an SRT or WebVTT document; exports re-parse to identical cues."""
    sep = "," if fmt is CaptionFormat.SRT else "."
    blocks = [
        f"{cue.index}\n{_fmt_ts(cue.start, sep)} {_ARROW} {_fmt_ts(cue.end, sep)}\n{cue.text}"
        for cue in cues
    ]
    body = "\n\n".join(blocks) + ("\n" if blocks else "")
    if fmt is CaptionFormat.VTT:
        return "WEBVTT\n\n" + body
    return body


# --- polishing ------------------------------------------------------------------

_WORD_RE = re.compile(r"[0-9a-z']+")


def _tokens(text: str) -> list[str]:
    return _WORD_RE.findall(text.lower())


def _similar(a: str, b: str, threshold: float) -> bool:
    return SequenceMatcher(None, a, b).ratio() >= threshold


def polish_captions(raw: list[CaptionCue], config: PolishConfig | None = None) -> PolishResult:
    """Derive the polish cut list and retime the surviving cues gaplessly.

    Cuts: inter-cue silences above the silence threshold, every cue of a
    redundant-take run except the last, and cues made solely of anomaly-lexicon
    tokens. The polished duration is the raw duration (last raw cue end) minus
    the cut total, exact at millisecond resolution. Raw cues that overlap are
    tolerated and re-sequenced; a retained cue swallowed whole by a cut is
    dropped.
    """
    cfg = config or PolishConfig()
    if not raw:
        return PolishResult([], [], 0.0, 0.0)

    lexicon = {" ".join(_tokens(entry)) for entry in cfg.anomaly_lexicon}
    norms = [" ".join(_tokens(c.text)) for c in raw]
    reasons: dict[int, CutReason] = {}
    for i, norm in enumerate(norms):
        words = norm.split()
        if words and all(w in lexicon for w in words):
            reasons[i] = CutReason.ANOMALY
    for i in range(len(raw) - 1):
        if i not in reasons and _similar(norms[i], norms[i + 1], cfg.similarity_threshold):
            reasons[i] = CutReason.REDUNDANT_TAKE

    silence_ms = to_ms(cfg.silence_threshold)
    events: list[tuple[int, int, CutReason]] = []
    for i, cue in enumerate(raw):
        if i in reasons:
            events.append((to_ms(cue.start), to_ms(cue.end), reasons[i]))
        if i + 1 < len(raw):
            gap_start, gap_end = to_ms(cue.end), to_ms(raw[i + 1].start)
            if gap_end - gap_start > silence_ms:
                events.append((gap_start, gap_end, CutReason.SILENCE))
    events.sort(key=lambda e: (e[0], e[1]))

    merged: list[list] = []
    for start, end, reason in events:
        if merged and start < merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], end)
        else:
            merged.append([start, end, reason])
    cuts = [CutInterval(from_ms(s), from_ms(e), r) for s, e, r in merged]
    total_cut = sum(e - s for s, e, _ in merged)

    def removed_before(t: int) -> int:
        removed = 0
        for s, e, _ in merged:
            if t <= s:
                break
            removed += min(t, e) - s
        return removed

    polished: list[CaptionCue] = []
    prev_end = 0
    for i, cue in enumerate(raw):
        if i in reasons:
            continue
        start = to_ms(cue.start) - removed_before(to_ms(cue.start))
        end = to_ms(cue.end) - removed_before(to_ms(cue.end))
        start = max(start, prev_end)
        end = max(end, start)
        if end == start:
            continue
        polished.append(CaptionCue(len(polished) + 1, from_ms(start), from_ms(end), cue.text))
        prev_end = end

    raw_ms = to_ms(raw[-1].end)
    return PolishResult(cuts, polished, from_ms(raw_ms), from_ms(raw_ms - total_cut))


# --- alignment ------------------------------------------------------------------


def _overlap(a: Counter, b: Counter) -> int:
    return sum((a & b).values())


def align_script_to_captions(
    script,
    cues: list[CaptionCue],
    parts: list[int] | None = None,
    match_threshold: float = 0.5,
) -> AlignedScript:
    """Assign each sentence an interval on the polished caption timeline.

    Greedy in-order matching: each sentence consumes the earliest cue run
    whose token overlap reaches the match threshold (a sentence may span
    several cues). Sentences left unmatched are allotted time within their
    matched neighbors' gap in proportion to word count. Raises AlignmentError
    when fewer than half the sentences find a match.
    """
    selected = [p for p in script.parts if parts is None or p.index in set(parts)]
    keys: list[tuple[int, int]] = []
    sent_counters: list[Counter] = []
    for part in selected:
        for idx, sentence in enumerate(part.sentences, start=1):
            keys.append((part.index, idx))
            sent_counters.append(Counter(_tokens(sentence.text)))
    if not keys:
        return AlignedScript({}, 0, 0)

    cue_counters = [Counter(_tokens(c.text)) for c in cues]
    n = len(cues)
    intervals: list[tuple[float, float] | None] = []
    cursor = 0
    matched = 0
    for want in sent_counters:
        need = sum(want.values())
        placed: tuple[int, int] | None = None
        if need:
            for start_j in range(cursor, n):
                acc: Counter = Counter()
                jj = start_j
                while jj < n:
                    if jj > start_j:
                        if sum(acc.values()) >= need:
                            break
                        if _overlap(want, acc + cue_counters[jj]) <= _overlap(want, acc):
                            break
                    acc = acc + cue_counters[jj]
                    jj += 1
                if _overlap(want, acc) / need >= match_threshold:
                    placed = (start_j, jj)
                    break
        if placed is None:
            intervals.append(None)
        else:
            lo, hi = placed
            intervals.append((cues[lo].start, cues[hi - 1].end))
            cursor = hi
            matched += 1

    if matched < 0.5 * len(keys):
        raise AlignmentError(
            f"only {matched} of {len(keys)} sentences matched the captions;"
            " are these the right caption files?"
        )

    # word-count-proportional time for unmatched runs, in exact milliseconds
    i = 0
    while i < len(intervals):
        if intervals[i] is not None:
            i += 1
            continue
        run_start = i
        while i < len(intervals) and intervals[i] is None:
            i += 1
        lower = intervals[run_start - 1][1] if run_start > 0 else 0.0
        if i < len(intervals):
            upper = intervals[i][0]
        else:
            upper = max(lower, cues[-1].end if cues else lower)
        lower_ms, span_ms = to_ms(lower), to_ms(upper) - to_ms(lower)
        weights = [max(1, sum(sent_counters[k].values())) for k in range(run_start, i)]
        total_w = sum(weights)
        cum = 0
        for offset, k in enumerate(range(run_start, i)):
            s_ms = lower_ms + span_ms * cum // total_w
            cum += weights[offset]
            e_ms = lower_ms + span_ms * cum // total_w
            intervals[k] = (from_ms(s_ms), from_ms(e_ms))

    timings = {key: iv for key, iv in zip(keys, intervals)}
    return AlignedScript(timings, matched, len(keys))
