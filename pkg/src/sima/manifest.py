"""Asset download manifests, integrity checks, and deliverable validators.

The manifest formats are one line per asset:

    1001: https://example.com/image1.jpg
    v1001: https://youtu.be/XXXXX 0:10-0:35

Only public (sourced) assets appear; original footage is already on disk.
This module also validates downloaded-asset metadata against the manifest,
and checks transition-graphic and thumbnail deliverables against the channel
layout rules.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum

from sima.annotation import AnnotatedScript, AssetId, MissingSourceError, Polarity, Tag
from sima.diagnostics import Diagnostic, Severity
from sima.timefmt import fmt_clock, parse_clock


class ManifestSyntaxError(Exception):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line

    def __str__(self) -> str:
        return f"line {self.line or 0}: {self.message}"


class RangeError(ValueError):
    """A part index outside the range that gets a transition graphic."""


@dataclass(frozen=True)
class ManifestEntry:
    asset: AssetId
    url: str
    time_range: tuple[float, float] | None = None

    def render(self) -> str:
        if self.time_range is None:
            return f"{self.asset.render()}: {self.url}"
        lo, hi = self.time_range
        return f"{self.asset.render()}: {self.url} {fmt_clock(lo)}-{fmt_clock(hi)}"


def generate_manifest(script: AnnotatedScript) -> tuple[str, str]:
    """Produce the (image, video) manifest documents in first-appearance order."""
    images: list[ManifestEntry] = []
    videos: list[ManifestEntry] = []
    seen: set[AssetId] = set()
    for part in script.parts:
        for token in part.tokens:
            if not isinstance(token, Tag) or token.polarity is not Polarity.OPEN:
                continue
            public = [a for a in token.ids if a.is_public]
            if not public:
                continue
            if token.source is None:
                raise MissingSourceError(
                    f"open tag for {public[0].render()} requires a source annotation",
                    token.loc.line if token.loc else None,
                    token.loc.col if token.loc else None,
                )
            for asset in public:
                if asset in seen:
                    continue
                seen.add(asset)
                if asset.is_video:
                    videos.append(ManifestEntry(asset, token.source.url, token.source.time_range))
                else:
                    images.append(ManifestEntry(asset, token.source.url))
    image_doc = "".join(entry.render() + "\n" for entry in images)
    video_doc = "".join(entry.render() + "\n" for entry in videos)
    return image_doc, video_doc


_LINE_RE = re.compile(
    r"^(\S+):\s+(\S+)(?:\s+(\d+:\d{2}(?::\d{2})?)\s*-\s*(\d+:\d{2}(?::\d{2})?))?\s*$"
)


def parse_manifest(text: str) -> list[ManifestEntry]:
    """Parse a manifest document (either kind; blank lines are ignored)."""
    entries: list[ManifestEntry] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        m = _LINE_RE.match(raw)
        if not m:
            raise ManifestSyntaxError(f"bad manifest line {raw!r}", line_no)
        try:
            asset = AssetId.parse(m.group(1))
        except ValueError as exc:
            raise ManifestSyntaxError(str(exc), line_no) from None
        if not asset.is_public:
            raise ManifestSyntaxError(
                f"{asset.render()} is original footage and does not belong in a manifest", line_no
            )
        if asset.is_video:
            if m.group(3) is None:
                raise ManifestSyntaxError("video entries need an extraction range", line_no)
            lo, hi = parse_clock(m.group(3)), parse_clock(m.group(4))
            if lo >= hi:
                raise ManifestSyntaxError("extraction range start must precede its end", line_no)
            entries.append(ManifestEntry(asset, m.group(2), (float(lo), float(hi))))
        else:
            if m.group(3) is not None:
                raise ManifestSyntaxError("image entries take no extraction range", line_no)
            entries.append(ManifestEntry(asset, m.group(2)))
    return entries


# --- downloaded-asset verification ------------------------------------------------


@dataclass(frozen=True)
class AssetMetadata:
    asset: AssetId
    bytes: int
    duration: float | None = None
    width: int | None = None
    height: int | None = None
    logo_embedded: bool | None = None


def parse_metadata_sidecar(text: str) -> dict[AssetId, AssetMetadata]:
    """Read the downloaded-asset sidecar: a JSON list of per-asset records."""
    try:
        records = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ManifestSyntaxError(f"bad metadata sidecar: {exc}") from None
    if not isinstance(records, list):
        raise ManifestSyntaxError("metadata sidecar must be a JSON list")
    out: dict[AssetId, AssetMetadata] = {}
    for record in records:
        try:
            asset = AssetId.parse(record["id"])
            meta = AssetMetadata(
                asset,
                bytes=int(record["bytes"]),
                duration=record["duration_ms"] / 1000.0 if "duration_ms" in record else None,
                width=record.get("width"),
                height=record.get("height"),
                logo_embedded=record.get("logo_embedded"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ManifestSyntaxError(f"bad metadata record {record!r}: {exc}") from None
        out[asset] = meta
    return out


@dataclass(frozen=True)
class VerifyResult:
    asset: AssetId
    ok: bool
    code: str
    message: str
    delta: float | None = None

    @property
    def status(self) -> str:
        return "PASS" if self.ok else "FAIL"

    def render(self) -> str:
        return f"{self.status} {self.asset.render()}: {self.message}"


def verify_assets(
    entries: list[ManifestEntry],
    metadata: dict[AssetId, AssetMetadata],
    tolerance: float = 0.5,
) -> list[VerifyResult]:
    """Check downloaded assets against the manifest they were fetched from.

    Flags missing downloads, zero-byte files, and video durations that differ
    from the requested extraction range by more than the tolerance (seconds).
    """
    results: list[VerifyResult] = []
    for entry in entries:
        meta = metadata.get(entry.asset)
        if meta is None:
            results.append(
                VerifyResult(entry.asset, False, "MissingAsset", "no downloaded file recorded")
            )
            continue
        if meta.bytes <= 0:
            results.append(VerifyResult(entry.asset, False, "ZeroByteFile", "file is empty"))
            continue
        if entry.asset.is_video:
            if entry.time_range is None or meta.duration is None:
                results.append(
                    VerifyResult(
                        entry.asset, False, "MissingDuration", "no duration recorded for video"
                    )
                )
                continue
            expected = entry.time_range[1] - entry.time_range[0]
            delta = meta.duration - expected
            if abs(delta) <= tolerance:
                results.append(
                    VerifyResult(
                        entry.asset,
                        True,
                        "DurationOk",
                        f"duration {meta.duration:.3f}s within {tolerance}s of {expected:.3f}s",
                        delta,
                    )
                )
            else:
                results.append(
                    VerifyResult(
                        entry.asset,
                        False,
                        "DurationMismatch",
                        f"duration {meta.duration:.3f}s differs from {expected:.3f}s"
                        f" by {delta:+.3f}s",
                        delta,
                    )
                )
        else:
            results.append(VerifyResult(entry.asset, True, "FileOk", f"{meta.bytes} bytes"))
    return results


# --- deliverable validators --------------------------------------------------------


def transition_graphic_name(part: int, part_count: int = 15) -> str:
    """File name for a part's transition graphic: part 2 -> f0200.png, 15 -> f1500.png."""
    if part < 2 or part > part_count:
        raise RangeError(
            f"transition graphics exist for parts 2..{part_count}, got part {part}"
        )
    return f"f{part * 100:04d}.png"


@dataclass(frozen=True)
class LayoutBox:
    x: float
    y: float
    width: float
    height: float

    @property
    def right(self) -> float:
        return self.x + self.width

    @property
    def bottom(self) -> float:
        return self.y + self.height

    def within(self, x0: float, y0: float, x1: float, y1: float) -> bool:
        return self.x >= x0 and self.y >= y0 and self.right <= x1 and self.bottom <= y1


@dataclass(frozen=True)
class GraphicSpec:
    """A transition graphic's pixel size plus its declared text and image boxes."""

    width: int
    height: int
    text_box: LayoutBox
    image_box: LayoutBox


STANDARD_RESOLUTION = (1920, 1080)


def validate_transition_graphic(spec: GraphicSpec) -> list[Diagnostic]:
    """Check a transition graphic against the channel layout rules.

    Content must stay inside the central 80% of the frame (ERROR otherwise);
    the text belongs in the upper 40% of that content area and the image in
    the lower 60% (WARNs). Non-1920x1080 frames get a WARN.
    """
    diags: list[Diagnostic] = []
    w, h = float(spec.width), float(spec.height)
    if (spec.width, spec.height) != STANDARD_RESOLUTION:
        diags.append(
            Diagnostic(
                Severity.WARN,
                "NonStandardResolution",
                f"{spec.width}x{spec.height} frame; graphics are usually 1920x1080",
            )
        )
    margin_x, margin_y = 0.1 * w, 0.1 * h
    content_top, content_bottom = margin_y, h - margin_y
    band_split = content_top + 0.4 * (content_bottom - content_top)
    for name, box in (("text", spec.text_box), ("image", spec.image_box)):
        if not box.within(margin_x, content_top, w - margin_x, content_bottom):
            diags.append(
                Diagnostic(
                    Severity.ERROR,
                    "MarginViolation",
                    f"{name} box leaves the central 80% of the frame",
                )
            )
    if spec.text_box.bottom > band_split:
        diags.append(
            Diagnostic(
                Severity.WARN,
                "TextBoxOutsideUpperRegion",
                "text box extends below the upper 40% of the content area",
            )
        )
    if spec.image_box.y < band_split:
        diags.append(
            Diagnostic(
                Severity.WARN,
                "ImageBoxOutsideLowerRegion",
                "image box extends above the lower 60% of the content area",
            )
        )
    return diags


class ThumbnailVariant(Enum):
    WIDE_16_9 = "16:9"
    STANDARD_4_3 = "4:3"
    SQUARE_1_1 = "1:1"


@dataclass(frozen=True)
class ThumbnailSpec:
    variant: ThumbnailVariant
    aspect: float
    max_bytes: int | None = None
    required_pixels: tuple[int, int] | None = None
    logo_required: bool = True


THUMBNAIL_SPECS: dict[ThumbnailVariant, ThumbnailSpec] = {
    ThumbnailVariant.WIDE_16_9: ThumbnailSpec(ThumbnailVariant.WIDE_16_9, 16 / 9, max_bytes=2_000_000),
    ThumbnailVariant.STANDARD_4_3: ThumbnailSpec(ThumbnailVariant.STANDARD_4_3, 4 / 3),
    ThumbnailVariant.SQUARE_1_1: ThumbnailSpec(
        ThumbnailVariant.SQUARE_1_1, 1.0, required_pixels=(3000, 3000)
    ),
}

ASPECT_TOLERANCE = 0.01


@dataclass(frozen=True)
class ThumbnailMeta:
    variant: ThumbnailVariant
    width: int
    height: int
    bytes: int
    logo_embedded: bool


def validate_thumbnails(metas: list[ThumbnailMeta]) -> list[Diagnostic]:
    """Check the thumbnail set: all three variants, size caps, and the embedded logo."""
    diags: list[Diagnostic] = []
    by_variant = {meta.variant: meta for meta in metas}
    for variant, spec in THUMBNAIL_SPECS.items():
        meta = by_variant.get(variant)
        if meta is None:
            diags.append(
                Diagnostic(
                    Severity.ERROR, "MissingVariant", f"no {variant.value} thumbnail provided"
                )
            )
            continue
        if spec.max_bytes is not None and meta.bytes > spec.max_bytes:
            diags.append(
                Diagnostic(
                    Severity.ERROR,
                    "OversizeThumbnail",
                    f"{variant.value} thumbnail is {meta.bytes} bytes"
                    f" (limit {spec.max_bytes})",
                )
            )
        if spec.required_pixels is not None and (meta.width, meta.height) != spec.required_pixels:
            diags.append(
                Diagnostic(
                    Severity.ERROR,
                    "WrongSquareDimensions",
                    f"{variant.value} thumbnail is {meta.width}x{meta.height},"
                    f" expected {spec.required_pixels[0]}x{spec.required_pixels[1]}",
                )
            )
        if meta.height > 0:
            drift = abs(meta.width / meta.height - spec.aspect) / spec.aspect
            if drift > ASPECT_TOLERANCE:
                diags.append(
                    Diagnostic(
                        Severity.WARN,
                        "AspectRatioDrift",
                        f"{variant.value} thumbnail aspect is off by {drift * 100:.1f}%",
                    )
                )
        if spec.logo_required and not meta.logo_embedded:
            diags.append(
                Diagnostic(
                    Severity.ERROR,
                    "MissingLogo",
                    f"{variant.value} thumbnail is missing the channel logo",
                )
            )
    return diags
