"""Parser, validator, and serializer for the bracket-tag script annotation language.

A script is plain narration divided into parts (``## Part 3: History``), with
bracket tags sitting between sentences to open and close supplementary-asset
spans:

    This is the first sentence. [1001+]{https://example.com/a.jpg} This is
    the second sentence. [1001-] This is the third sentence.

Tag shapes: ``[1001+]`` image open, ``[1001-]`` image close, ``[1001, 1002+]``
multi-image, ``[v1001+, 40s, 1.0x]`` video open with baseline duration and
playback speed, ``[image_part0001+]`` / ``[v_part1001+, 1min, 1.0x]`` for
original (locally produced) assets.  An open tag for a public asset must be
followed by a source annotation in braces, ``{url}`` for images and
``{url m:ss-m:ss}`` for videos.  ``[cta:intro+]`` / ``[cta:concl+]`` and their
closing twins mark the call-to-action regions.  A ``!`` after the polarity of
an image open tag (``[1001+!]``) marks a deliberately long display span.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from sima.diagnostics import Diagnostic, Severity
from sima.timefmt import fmt_clock, fmt_duration, fmt_speed, parse_clock, parse_duration


class ScriptError(Exception):
    """Base class for script parsing failures; carries a line/column position."""

    code = "ScriptError"

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col

    def __str__(self) -> str:
        return f"{self.line or 0}:{self.col or 0}: [{self.code}] {self.message}"

    def to_diagnostic(self) -> Diagnostic:
        return Diagnostic(Severity.ERROR, self.code, self.message, self.line, self.col)


class ScriptSyntaxError(ScriptError):
    """A malformed token: bad tag body, mid-sentence tag, bad duration or source."""

    code = "SyntaxError"


class StructureError(ScriptError):
    """A well-formed token stream with broken span structure (unbalanced, nested videos, ...)."""

    code = "StructureError"


class MissingSourceError(ScriptError):
    """A public-asset open tag without its required source annotation."""

    code = "MissingSource"


class AssetKind(Enum):
    IMAGE_A = "image"
    VIDEO_A = "video"
    IMAGE_B = "original_image"
    VIDEO_B = "original_video"


_KIND_PREFIX = {
    AssetKind.IMAGE_A: "",
    AssetKind.VIDEO_A: "v",
    AssetKind.IMAGE_B: "image_part",
    AssetKind.VIDEO_B: "v_part",
}
_PREFIX_KIND = {
    None: AssetKind.IMAGE_A,
    "v": AssetKind.VIDEO_A,
    "image_part": AssetKind.IMAGE_B,
    "v_part": AssetKind.VIDEO_B,
}


@dataclass(frozen=True)
class AssetId:
    """A typed asset reference; ``pad`` keeps the written digit width so text round-trips."""

    kind: AssetKind
    number: int
    pad: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        if self.number <= 0:
            raise ValueError("asset number must be a positive integer")

    @property
    def is_video(self) -> bool:
        return self.kind in (AssetKind.VIDEO_A, AssetKind.VIDEO_B)

    @property
    def is_image(self) -> bool:
        return not self.is_video

    @property
    def is_public(self) -> bool:
        return self.kind in (AssetKind.IMAGE_A, AssetKind.VIDEO_A)

    def render(self) -> str:
        return _KIND_PREFIX[self.kind] + str(self.number).zfill(self.pad)

    @classmethod
    def parse(cls, text: str) -> AssetId:
        m = _ID_RE.match(text)
        if not m or m.group("pol") or m.group("bang"):
            raise ValueError(f"bad asset id {text!r}")
        digits = m.group("digits")
        return cls(_PREFIX_KIND[m.group("prefix")], int(digits), pad=len(digits))


class Polarity(Enum):
    OPEN = "+"
    CLOSE = "-"


class CtaKind(Enum):
    INTRO = "intro"
    CONCL = "concl"


@dataclass(frozen=True)
class Loc:
    line: int
    col: int


@dataclass(frozen=True)
class SourceRef:
    """Where a public asset comes from: a URL, plus an extraction range for videos."""

    url: str
    time_range: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.time_range is not None and self.time_range[0] >= self.time_range[1]:
            raise ValueError("source time range start must precede its end")

    def render(self) -> str:
        if self.time_range is None:
            return "{" + self.url + "}"
        lo, hi = self.time_range
        return "{" + f"{self.url} {fmt_clock(lo)}-{fmt_clock(hi)}" + "}"


@dataclass
class Tag:
    """One bracket tag.  ``gap`` is the sentence boundary it sits on: after sentence ``gap``."""

    ids: tuple[AssetId, ...]
    polarity: Polarity
    part: int = 0
    gap: int = 0
    baseline_duration: float | None = None
    speed: float | None = None
    source: SourceRef | None = None
    allow_long: bool = False
    duration_text: str | None = field(default=None, compare=False)
    loc: Loc | None = field(default=None, compare=False)

    @property
    def is_video(self) -> bool:
        return self.ids[0].is_video

    @property
    def is_public(self) -> bool:
        return any(i.is_public for i in self.ids)

    def render(self) -> str:
        body = ", ".join(i.render() for i in self.ids) + self.polarity.value
        if self.allow_long:
            body += "!"
        if self.polarity is Polarity.OPEN and self.is_video:
            dur = self.duration_text or fmt_duration(self.baseline_duration or 0.0)
            body += f", {dur}, {fmt_speed(self.speed or 1.0)}x"
        text = f"[{body}]"
        if self.source is not None:
            text += self.source.render()
        return text


@dataclass
class CtaMarker:
    """A call-to-action region boundary (``[cta:intro+]`` and friends)."""

    kind: CtaKind
    polarity: Polarity
    part: int = 0
    gap: int = 0
    loc: Loc | None = field(default=None, compare=False)

    def render(self) -> str:
        return f"[cta:{self.kind.value}{self.polarity.value}]"


@dataclass(frozen=True)
class CtaRegion:
    kind: CtaKind
    open_gap: int
    close_gap: int

    @property
    def first_sentence(self) -> int:
        return self.open_gap + 1

    @property
    def last_sentence(self) -> int:
        return self.close_gap

    def sentences(self) -> range:
        return range(self.first_sentence, self.last_sentence + 1)


@dataclass
class Sentence:
    text: str
    loc: Loc | None = field(default=None, compare=False)


@dataclass
class Part:
    """One script part: its sentences plus the boundary tokens in document order."""

    index: int
    title: str
    sentences: list[Sentence] = field(default_factory=list)
    tokens: list[Tag | CtaMarker] = field(default_factory=list)

    @property
    def tags(self) -> list[Tag]:
        return [t for t in self.tokens if isinstance(t, Tag)]

    def cta_region(self, kind: CtaKind) -> CtaRegion | None:
        open_gap = close_gap = None
        for token in self.tokens:
            if isinstance(token, CtaMarker) and token.kind is kind:
                if token.polarity is Polarity.OPEN:
                    open_gap = token.gap
                else:
                    close_gap = token.gap
        if open_gap is None or close_gap is None:
            return None
        return CtaRegion(kind, open_gap, close_gap)

    def cta_sentences(self) -> set[int]:
        covered: set[int] = set()
        for kind in CtaKind:
            region = self.cta_region(kind)
            if region is not None:
                covered.update(region.sentences())
        return covered


@dataclass
class AnnotatedScript:
    parts: list[Part] = field(default_factory=list)

    @property
    def part_count(self) -> int:
        return len(self.parts)


def tag_position(part: Part, tag: Tag | CtaMarker) -> tuple[int, int, str]:
    """Express a token's boundary as (part, sentence index, 'before'|'after')."""
    n = len(part.sentences)
    if tag.polarity is Polarity.CLOSE and tag.gap > 0:
        return (part.index, tag.gap, "after")
    if tag.gap < n:
        return (part.index, tag.gap + 1, "before")
    return (part.index, n, "after")


@dataclass(frozen=True)
class TagSpan:
    """A matched open/close pair and the sentence range it covers."""

    open: Tag
    close: Tag
    part: int
    parent_open: Tag | None = None

    @property
    def first_sentence(self) -> int:
        return self.open.gap + 1

    @property
    def last_sentence(self) -> int:
        return self.close.gap

    @property
    def sentence_count(self) -> int:
        return max(0, self.last_sentence - self.first_sentence + 1)

    @property
    def is_video(self) -> bool:
        return self.open.is_video

    def sentences(self) -> range:
        return range(self.first_sentence, self.last_sentence + 1)


# --- tokenizing ---------------------------------------------------------------

_HEADER_RE = re.compile(r"^##\s+Part\s+(\d+)\s*:\s*(.*?)\s*$")
_CTA_RE = re.compile(r"^cta:(intro|concl)\s*([+-])$")
_ID_RE = re.compile(r"^(?P<prefix>v_part|image_part|v)?(?P<digits>\d+)(?P<pol>[+-])?(?P<bang>!)?$")
_SPEED_RE = re.compile(r"^(\d+(?:\.\d+)?)x$")
_SOURCE_RANGE_RE = re.compile(r"^(.*?)\s+(\d+:\d{2}(?::\d{2})?)\s*-\s*(\d+:\d{2}(?::\d{2})?)$")
_TERMINATORS = ".?!"


def _parse_tag_body(body: str, loc: Loc) -> Tag | CtaMarker:
    stripped = body.strip()
    cta = _CTA_RE.match(stripped)
    if cta:
        kind = CtaKind.INTRO if cta.group(1) == "intro" else CtaKind.CONCL
        polarity = Polarity.OPEN if cta.group(2) == "+" else Polarity.CLOSE
        return CtaMarker(kind, polarity, loc=loc)
    if stripped.startswith("cta"):
        raise ScriptSyntaxError(f"bad CTA marker [{stripped}]", loc.line, loc.col)

    ids: list[AssetId] = []
    polarity: Polarity | None = None
    allow_long = False
    rest: list[str] = []
    for token in (t.strip() for t in stripped.split(",")):
        if polarity is not None:
            rest.append(token)
            continue
        m = _ID_RE.match(token)
        if not m:
            raise ScriptSyntaxError(f"bad tag token {token!r}", loc.line, loc.col)
        digits = m.group("digits")
        number = int(digits)
        if number == 0:
            raise ScriptSyntaxError("asset number must be a positive integer", loc.line, loc.col)
        ids.append(AssetId(_PREFIX_KIND[m.group("prefix")], number, pad=len(digits)))
        if m.group("pol"):
            polarity = Polarity.OPEN if m.group("pol") == "+" else Polarity.CLOSE
            allow_long = bool(m.group("bang"))
        elif m.group("bang"):
            raise ScriptSyntaxError("'!' must follow the +/- polarity sign", loc.line, loc.col)
    if polarity is None:
        raise ScriptSyntaxError("tag is missing its +/- polarity", loc.line, loc.col)

    has_video = any(i.is_video for i in ids)
    if len(ids) > 1 and has_video:
        raise ScriptSyntaxError("only image ids may share one tag", loc.line, loc.col)

    baseline = None
    speed = None
    duration_text = None
    if has_video and polarity is Polarity.OPEN:
        if len(rest) != 2:
            raise ScriptSyntaxError(
                "video open tags take a duration and a speed, e.g. [v1001+, 40s, 1.0x]",
                loc.line,
                loc.col,
            )
        try:
            baseline = parse_duration(rest[0])
        except ValueError as exc:
            raise ScriptSyntaxError(str(exc), loc.line, loc.col) from None
        duration_text = rest[0]
        sp = _SPEED_RE.match(rest[1])
        if not sp:
            raise ScriptSyntaxError(f"bad speed token {rest[1]!r}, expected e.g. 1.0x", loc.line, loc.col)
        speed = float(sp.group(1))
        if speed <= 0:
            raise ScriptSyntaxError("speed must be positive", loc.line, loc.col)
    elif rest:
        raise ScriptSyntaxError(
            "only video open tags carry duration and speed fields", loc.line, loc.col
        )
    if allow_long and (has_video or polarity is Polarity.CLOSE):
        raise ScriptSyntaxError(
            "the '!' long-display marker is only valid on image open tags", loc.line, loc.col
        )
    return Tag(
        ids=tuple(ids),
        polarity=polarity,
        baseline_duration=baseline,
        speed=speed,
        allow_long=allow_long,
        duration_text=duration_text,
        loc=loc,
    )


def _parse_source_body(content: str, loc: Loc) -> SourceRef:
    content = content.strip()
    m = _SOURCE_RANGE_RE.match(content)
    if m:
        url = m.group(1).strip()
        try:
            lo, hi = parse_clock(m.group(2)), parse_clock(m.group(3))
        except ValueError as exc:
            raise ScriptSyntaxError(str(exc), loc.line, loc.col) from None
        if lo >= hi:
            raise ScriptSyntaxError("source time range start must precede its end", loc.line, loc.col)
        if not url:
            raise ScriptSyntaxError("source annotation is missing its URL", loc.line, loc.col)
        return SourceRef(url, (float(lo), float(hi)))
    if not content or " " in content:
        raise ScriptSyntaxError(
            "bad source annotation, expected {url} or {url m:ss-m:ss}", loc.line, loc.col
        )
    return SourceRef(content)


class _PartAssembler:
    """Builds a part's sentence list and boundary tokens from a character stream."""

    def __init__(self, index: int, title: str):
        self.part = Part(index=index, title=title)
        self._pending: list[str] = []
        self._pending_loc: Loc | None = None
        self._armed = False  # last non-space char was a sentence terminator
        self.open_tag_awaiting_source: Tag | None = None

    def _flush(self) -> None:
        text = "".join(self._pending).strip()
        if text:
            self.part.sentences.append(Sentence(text, self._pending_loc))
        self._pending = []
        self._pending_loc = None
        self._armed = False

    def feed_char(self, ch: str, line: int, col: int) -> None:
        if ch.isspace():
            if self._armed:
                self._flush()
            elif self._pending and self._pending[-1] != " ":
                self._pending.append(" ")
            return
        if self._pending_loc is None:
            self._pending_loc = Loc(line, col)
        self._pending.append(ch)
        self._armed = ch in _TERMINATORS
        self.open_tag_awaiting_source = None

    def add_token(self, token: Tag | CtaMarker, loc: Loc) -> None:
        if self._armed:
            self._flush()
        if "".join(self._pending).strip():
            raise ScriptSyntaxError(
                "tags may only appear at sentence boundaries", loc.line, loc.col
            )
        self._pending = []
        self._pending_loc = None
        token.part = self.part.index
        token.gap = len(self.part.sentences)
        self.part.tokens.append(token)
        if isinstance(token, Tag) and token.polarity is Polarity.OPEN:
            self.open_tag_awaiting_source = token
        else:
            self.open_tag_awaiting_source = None

    def attach_source(self, source: SourceRef, loc: Loc) -> None:
        tag = self.open_tag_awaiting_source
        if tag is None:
            raise ScriptSyntaxError(
                "source annotation must immediately follow an open tag", loc.line, loc.col
            )
        if tag.source is not None:
            raise ScriptSyntaxError("open tag already has a source annotation", loc.line, loc.col)
        if not tag.is_public:
            raise ScriptSyntaxError(
                "original-footage tags take no source annotation", loc.line, loc.col
            )
        if tag.is_video and source.time_range is None:
            raise ScriptSyntaxError(
                "video source annotations require an extraction range, e.g. {url 11:10-11:50}",
                loc.line,
                loc.col,
            )
        if not tag.is_video and source.time_range is not None:
            raise ScriptSyntaxError(
                "image source annotations take no time range", loc.line, loc.col
            )
        tag.source = source

    def finish(self) -> Part:
        self._flush()
        return self.part


def _scan_part(assembler: _PartAssembler, lines: list[tuple[int, str]]) -> None:
    for line_no, raw in lines:
        i = 0
        while i < len(raw):
            ch = raw[i]
            if ch == "[":
                end = raw.find("]", i + 1)
                if end < 0:
                    raise ScriptSyntaxError("unterminated tag", line_no, i + 1)
                loc = Loc(line_no, i + 1)
                assembler.add_token(_parse_tag_body(raw[i + 1 : end], loc), loc)
                i = end + 1
            elif ch == "{" and assembler.open_tag_awaiting_source is not None:
                end = raw.find("}", i + 1)
                if end < 0:
                    raise ScriptSyntaxError("unterminated source annotation", line_no, i + 1)
                loc = Loc(line_no, i + 1)
                assembler.attach_source(_parse_source_body(raw[i + 1 : end], loc), loc)
                i = end + 1
            else:
                assembler.feed_char(ch, line_no, i + 1)
                i += 1
        assembler.feed_char(" ", line_no, len(raw) + 1)


# --- structure ----------------------------------------------------------------


def collect_spans(part: Part) -> list[TagSpan]:
    """Match open/close tags within a part; raises StructureError on broken nesting."""

    @dataclass
    class _Open:
        tag: Tag
        parent: Tag | None

    spans: list[TagSpan] = []
    active_video: _Open | None = None
    open_images: list[_Open] = []
    active_ids: set[AssetId] = set()

    def fail(message: str, loc: Loc | None) -> StructureError:
        return StructureError(message, loc.line if loc else None, loc.col if loc else None)

    for token in part.tokens:
        if not isinstance(token, Tag):
            continue
        if token.polarity is Polarity.OPEN:
            for asset in token.ids:
                if asset in active_ids:
                    raise fail(f"duplicate open of active id {asset.render()}", token.loc)
            if token.is_video:
                if active_video is not None:
                    raise fail("video spans may not nest inside video spans", token.loc)
                active_video = _Open(token, None)
            else:
                open_images.append(_Open(token, active_video.tag if active_video else None))
            active_ids.update(token.ids)
        else:
            if token.is_video:
                if active_video is None or active_video.tag.ids != token.ids:
                    raise fail(
                        f"close tag [{', '.join(i.render() for i in token.ids)}-] has no matching open",
                        token.loc,
                    )
                still_open = [o for o in open_images if o.parent is active_video.tag]
                if still_open:
                    raise fail(
                        f"image span {still_open[0].tag.ids[0].render()} is still open at its"
                        " video close",
                        token.loc,
                    )
                spans.append(TagSpan(active_video.tag, token, part.index))
                active_ids.difference_update(token.ids)
                active_video = None
            else:
                match = next(
                    (o for o in reversed(open_images) if o.tag.ids == token.ids), None
                )
                if match is None:
                    raise fail(
                        f"close tag [{', '.join(i.render() for i in token.ids)}-] has no matching open",
                        token.loc,
                    )
                current = active_video.tag if active_video else None
                if match.parent is not current:
                    raise fail(
                        "image spans must stay on one side of a video span boundary", token.loc
                    )
                open_images.remove(match)
                spans.append(TagSpan(match.tag, token, part.index, parent_open=match.parent))
                active_ids.difference_update(token.ids)

    if active_video is not None:
        raise fail(
            f"video span {active_video.tag.ids[0].render()} crosses a part boundary",
            active_video.tag.loc,
        )
    if open_images:
        raise fail(
            f"image span {open_images[0].tag.ids[0].render()} crosses a part boundary",
            open_images[0].tag.loc,
        )
    return spans


def _check_cta_markers(part: Part, is_final: bool) -> None:
    open_gaps: dict[CtaKind, int | None] = {CtaKind.INTRO: None, CtaKind.CONCL: None}
    seen: set[CtaKind] = set()
    for token in part.tokens:
        if not isinstance(token, CtaMarker):
            continue
        loc = token.loc
        if token.kind is CtaKind.INTRO and part.index != 1:
            raise StructureError(
                "intro CTA markers belong in part 1 only", loc.line if loc else None, loc.col if loc else None
            )
        if token.kind is CtaKind.CONCL and not is_final:
            raise StructureError(
                "concl CTA markers belong in the final part only",
                loc.line if loc else None,
                loc.col if loc else None,
            )
        if token.polarity is Polarity.OPEN:
            if token.kind in seen or open_gaps[token.kind] is not None:
                raise StructureError(
                    f"duplicate cta:{token.kind.value} region",
                    loc.line if loc else None,
                    loc.col if loc else None,
                )
            open_gaps[token.kind] = token.gap
        else:
            if open_gaps[token.kind] is None:
                raise StructureError(
                    f"cta:{token.kind.value} close marker has no matching open",
                    loc.line if loc else None,
                    loc.col if loc else None,
                )
            open_gaps[token.kind] = None
            seen.add(token.kind)
    for kind, gap in open_gaps.items():
        if gap is not None:
            raise StructureError(f"cta:{kind.value} region is not closed before the end of the part")


# --- public API ---------------------------------------------------------------


def parse_script(text: str) -> AnnotatedScript:
    """Parse annotated script text into its structured form.

    Raises ScriptSyntaxError for malformed tokens, StructureError for broken
    span structure, and MissingSourceError when a public-asset open tag lacks
    its source annotation.
    """
    lines = text.lstrip("﻿").splitlines()
    headers: list[tuple[int, int, str]] = []  # (line index, part number, title)
    for idx, raw in enumerate(lines):
        m = _HEADER_RE.match(raw)
        if m:
            headers.append((idx, int(m.group(1)), m.group(2)))
        elif raw.lstrip().startswith("##"):
            raise ScriptSyntaxError("malformed part header", idx + 1, 1)

    groups: list[tuple[int, str, list[tuple[int, str]]]] = []
    if not headers:
        body = [(i + 1, raw) for i, raw in enumerate(lines)]
        groups.append((1, "", body))
    else:
        for i, raw in enumerate(lines[: headers[0][0]]):
            if raw.strip():
                raise ScriptSyntaxError("narration before the first part header", i + 1, 1)
        for pos, (line_idx, number, title) in enumerate(headers):
            if number != pos + 1:
                raise StructureError(
                    f"part numbers must ascend from 1, got Part {number}", line_idx + 1, 1
                )
            stop = headers[pos + 1][0] if pos + 1 < len(headers) else len(lines)
            body = [(i + 1, lines[i]) for i in range(line_idx + 1, stop)]
            groups.append((number, title, body))

    script = AnnotatedScript()
    for number, title, body in groups:
        assembler = _PartAssembler(number, title)
        _scan_part(assembler, body)
        script.parts.append(assembler.finish())

    for part in script.parts:
        collect_spans(part)
        _check_cta_markers(part, is_final=part.index == len(script.parts))
        for tag in part.tags:
            if tag.polarity is Polarity.OPEN and tag.is_public and tag.source is None:
                raise MissingSourceError(
                    f"open tag for {tag.ids[0].render()} requires a source annotation",
                    tag.loc.line if tag.loc else None,
                    tag.loc.col if tag.loc else None,
                )
    return script


def serialize_script(script: AnnotatedScript) -> str:
    """Render a script in canonical form: one header plus one body line per part."""
    blocks: list[str] = []
    for part in script.parts:
        header = f"## Part {part.index}: {part.title}".rstrip()
        pieces: list[str] = []
        by_gap: dict[int, list[Tag | CtaMarker]] = {}
        for token in part.tokens:
            by_gap.setdefault(token.gap, []).append(token)
        for gap in range(len(part.sentences) + 1):
            for token in by_gap.get(gap, []):
                pieces.append(token.render())
            if gap < len(part.sentences):
                pieces.append(part.sentences[gap].text)
        body = " ".join(pieces)
        blocks.append(header + ("\n" + body if body else ""))
    return "\n\n".join(blocks) + "\n"


@dataclass
class ValidatorConfig:
    max_image_span_sentences: int = 3
    allow_overlapping_images: bool = False


def validate_script(
    script: AnnotatedScript, config: ValidatorConfig | None = None
) -> list[Diagnostic]:
    """Check a parsed script for editorial problems the parser tolerates.

    WARNs flag overlong image spans, part-1 narration with no B-roll cover,
    and spans that stray into CTA regions; overlapping image spans are an
    ERROR unless the config allows them.
    """
    cfg = config or ValidatorConfig()
    diags: list[Diagnostic] = []

    def loc_of(tag: Tag) -> tuple[int | None, int | None]:
        return (tag.loc.line, tag.loc.col) if tag.loc else (None, None)

    for part in script.parts:
        spans = collect_spans(part)
        cta_sents = part.cta_sentences()
        image_spans = [s for s in spans if not s.is_video]

        for span in spans:
            line, col = loc_of(span.open)
            if span.sentence_count == 0:
                severity = Severity.ERROR if span.is_video else Severity.WARN
                diags.append(
                    Diagnostic(
                        severity,
                        "EmptySpan",
                        f"span {span.open.ids[0].render()} covers no sentences",
                        line,
                        col,
                    )
                )
            if cta_sents.intersection(span.sentences()):
                diags.append(
                    Diagnostic(
                        Severity.WARN,
                        "TagOverlapsCta",
                        f"span {span.open.ids[0].render()} overlaps a CTA region",
                        line,
                        col,
                    )
                )

        for span in image_spans:
            if (
                span.parent_open is None
                and not span.open.allow_long
                and span.sentence_count > cfg.max_image_span_sentences
            ):
                line, col = loc_of(span.open)
                diags.append(
                    Diagnostic(
                        Severity.WARN,
                        "ImageSpanTooLong",
                        f"image span {span.open.ids[0].render()} covers {span.sentence_count}"
                        f" sentences (limit {cfg.max_image_span_sentences});"
                        " mark the open tag with '!' if the asset warrants it",
                        line,
                        col,
                    )
                )

        if not cfg.allow_overlapping_images:
            for i, a in enumerate(image_spans):
                for b in image_spans[i + 1 :]:
                    if set(a.sentences()).intersection(b.sentences()):
                        line, col = loc_of(b.open)
                        diags.append(
                            Diagnostic(
                                Severity.ERROR,
                                "OverlappingImageSpans",
                                f"image spans {a.open.ids[0].render()} and"
                                f" {b.open.ids[0].render()} overlap",
                                line,
                                col,
                            )
                        )

        if part.index == 1:
            covered: set[int] = set()
            for span in spans:
                covered.update(span.sentences())
            for idx, sentence in enumerate(part.sentences, start=1):
                if idx in cta_sents or idx in covered:
                    continue
                line = sentence.loc.line if sentence.loc else None
                col = sentence.loc.col if sentence.loc else None
                diags.append(
                    Diagnostic(
                        Severity.WARN,
                        "Part1UncoveredNarration",
                        f"part 1 sentence {idx} has no covering asset span",
                        line,
                        col,
                    )
                )
    return diags
