"""Shared fixture material: scripts, caption builders, and an on-disk project.

The main script is written in canonical form (one header plus one body line
per part) so serialization round-trips are byte-exact.  Caption builders
give every sentence an 8 second window with a 7.5 second cue, which keeps
all window arithmetic on easy integers.
"""

from __future__ import annotations

import json
from pathlib import Path

from sima.annotation import AnnotatedScript, parse_script
from sima.captions import CaptionCue, CaptionFormat, export_captions

MAIN_SCRIPT = """\
## Part 1: Introduction
[cta:intro+] Welcome back to the channel. If these deep dives help you, subscribing tells us to keep making them. [cta:intro-] [v_part1001+, 30s, 1.0x] Today we trace how a garage startup rewired an entire industry. The story runs four decades and survives three near collapses. Our tour begins with the founders and their first machine. [v_part1001-]

## Part 2: The Garage Years
The company began in a rented garage with two friends and one soldering iron. [v1001+, 25s, 1.0x]{https://youtu.be/XXXXX 0:10-0:35} Their first order came from a hobbyist catalog. Fifty kits sold out in a single week. [1001+]{https://example.com/image1.jpg} The photo of that first workbench still hangs in the lobby. [1001-] A second batch shipped before the paint on the sign had dried. [v1001-] Retail stores would not return their calls. [1002+]{https://example.com/image2.png} The first trade show changed that overnight. [1002-]

## Part 3: Building the Team
Growth forced the founders to hire beyond their circle of friends. [1003, 1004+]{https://example.com/team.jpg} The first ten employees shared one long bench and a temperamental coffee machine. Every Friday closed with a demo of whatever had been built that week. [1003, 1004-] [1005+!]{https://example.com/floorplan.jpg} The floor plan from those years reads like a diary. Desks crowd the loading dock. A test rig blocks the fire lane, at least on paper. Nobody who worked there remembers it any other way. [1005-]

## Part 4: Breakthrough
The breakthrough product shipped in the spring, two years late. [v1002+, 45s, 1.0x]{https://youtu.be/YYYYY 1:20-2:05} Reviewers called it unpolished and bought it anyway. [image_part0001+] A retail chain placed the order that kept the lights on. [image_part0001-] Production tripled within a quarter. [v1002-] Competitors noticed the numbers before the press did. The rest of the industry spent a decade catching up.

## Part 5: Going Public
[v_part1002+, 1min, 1.0x] The stock debut made the founders rich on paper and nervous in every other way. The ticker opened at twelve dollars and closed near thirty. Analysts who had dismissed the product line wrote glowing notes by Friday. Employees watched the board in the cafeteria and then went back to work. The celebration lasted exactly one afternoon. [v_part1002-] A reporter asked what would change, and nobody had a good answer.

## Part 6: Legacy
What survives is not the hardware but the habit of shipping. [1006+]{https://example.com/legacy.jpg} Museums now display the first kit behind glass. Collectors trade the early manuals like rare vinyl. [1006-] The founders still argue about which decision mattered most. [cta:concl+] If this story earned your time, a like tells us to make more of them. Subscribe so next week's deep dive finds you. [cta:concl-]
"""

# Part 2 narration shaped like the worked example: a 40 s clip over sentences
# two through six with two nested images at sentences four and five.
TWO_PART_SCRIPT = """\
## Part 1: Opening
[cta:intro+] Hit subscribe if you enjoy deep dives. One new story lands every week. [cta:intro-] [v_part1001+, 30s, 1.0x] Today's subject earned its place in history. Its rise took one decade. Its fall took one afternoon. [v_part1001-]

## Part 2: The Story
This is the first sentence. [v1001+, 40s, 1.0x]{https://example.com/clip 11:10-11:50} This is the second sentence. This is the third sentence. [1001+]{https://example.com/a.jpg} This is the fourth sentence. [1001-] [1003+]{https://example.com/b.jpg} This is the fifth sentence. [1003-] This is the sixth sentence. [v1001-] [cta:concl+] This is the seventh sentence. [cta:concl-]
"""

CTA_ONLY_SCRIPT = """\
## Part 1: Introduction
[cta:intro+] Subscribe for weekly deep dives. [cta:intro-]
"""

EMPTY_PART2_SCRIPT = """\
## Part 1: Opening
[cta:intro+] Stay to the end for the full story. [cta:intro-] [image_part0001+] The origin begins in a dorm room. [image_part0001-]

## Part 2: The Quiet Year
Nothing about that winter made the papers. The team kept shipping anyway. Their ledger shows eleven releases.

## Part 3: Endings
[image_part0002+] The leases ran out in October. [image_part0002-] [cta:concl+] Like the video if the archive helped you. [cta:concl-]
"""

REDUNDANT_TAKE_SRT = """\
1
00:00:00,000 --> 00:00:02,400
We shipped the update on a Tuesday.

2
00:00:02,900 --> 00:00:05,200
We shipped the update on a Tuesday morning.

3
00:00:05,700 --> 00:00:08,100
We shipped the update on a Tuesday morning.

4
00:00:08,600 --> 00:00:09,000
Um.

5
00:00:12,000 --> 00:00:14,500
Everyone blamed the weather.
"""

SIDECAR_RECORDS = [
    {"id": "1001", "bytes": 204800},
    {"id": "1002", "bytes": 156672},
    {"id": "1003", "bytes": 180224},
    {"id": "1004", "bytes": 98304},
    {"id": "1005", "bytes": 245760},
    {"id": "1006", "bytes": 131072},
    {"id": "v1001", "bytes": 10485760, "duration_ms": 25200},
    {"id": "v1002", "bytes": 22020096, "duration_ms": 45000},
]

SENTENCE_STEP = 8.0
CUE_LENGTH = 7.5


def cues_for(script: AnnotatedScript, parts: list[int]) -> list[CaptionCue]:
    """One caption cue per sentence of the given parts, on an 8 s grid."""
    cues = []
    k = 0
    for p in parts:
        for sentence in script.parts[p - 1].sentences:
            start = k * SENTENCE_STEP
            cues.append(CaptionCue(k + 1, start, start + CUE_LENGTH, sentence.text))
            k += 1
    return cues


def srt_for(script: AnnotatedScript, parts: list[int]) -> str:
    return export_captions(cues_for(script, parts), CaptionFormat.SRT)


def write_project(root: Path) -> dict[str, Path]:
    """Materialize the main fixture as a project directory with a config."""
    script = parse_script(MAIN_SCRIPT)
    paths = {
        "root": root,
        "script": root / "script.sima.md",
        "config": root / "config.json",
        "sidecar": root / "assets.json",
        "out": root / "out",
    }
    paths["script"].write_text(MAIN_SCRIPT, encoding="utf-8")
    paths["sidecar"].write_text(json.dumps(SIDECAR_RECORDS, indent=2), encoding="utf-8")
    captions = {}
    for label, parts in (("A", [1, 2]), ("B", [3, 4]), ("C", [5, 6])):
        path = root / f"raw{label}.srt"
        path.write_text(srt_for(script, parts), encoding="utf-8")
        captions[label] = str(path)
        paths[f"captions_{label}"] = path
    config = {
        "script": str(paths["script"]),
        "captions": captions,
        "metadata_sidecar": str(paths["sidecar"]),
        "output_dir": str(paths["out"]),
        "part_count": 6,
        "split_count": 3,
    }
    paths["config"].write_text(json.dumps(config, indent=2), encoding="utf-8")
    return paths
