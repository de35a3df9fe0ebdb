"""Command-line entry point wiring the modules into one pipeline.

Subcommands: parse, validate, captions, compile, manifest, verify,
estimate, export-captions.  Exit codes: 0 success, 1 ERROR diagnostics
(including malformed inputs), 2 usage or configuration problems.  All file
outputs are deterministic (no timestamps unless --stamp) and written
atomically.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

from sima.annotation import (
    AnnotatedScript,
    ScriptError,
    collect_spans,
    parse_script,
    serialize_script,
    tag_position,
    validate_script,
)
from sima.captions import (
    AlignmentError,
    CaptionFormat,
    FormatError,
    align_script_to_captions,
    export_captions,
    parse_captions,
    polish_captions,
)
from sima.config import ConfigError, ProjectConfig, load_config
from sima.diagnostics import Diagnostic, has_errors
from sima.estimator import PlanError, estimate_pipeline, plan_splits
from sima.manifest import (
    ManifestSyntaxError,
    generate_manifest,
    parse_manifest,
    parse_metadata_sidecar,
    verify_assets,
)
from sima.timefmt import fmt_speed
from sima.timeline import CompileError, CompileResult, compile_split, export_edl


class _CliError(Exception):
    """Input-level failure already reported; carries the exit code."""

    def __init__(self, code: int):
        super().__init__(code)
        self.code = code


def _fail(message: str, code: int = 1) -> _CliError:
    print(message, file=sys.stderr)
    return _CliError(code)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _fail(f"cannot read {path}: {exc.strerror}", 2)


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _tsv(rows: list[list[str]]) -> str:
    return "".join("\t".join(row) + "\n" for row in rows)


def _diag_dict(diag: Diagnostic) -> dict:
    return {
        "severity": diag.severity.value,
        "code": diag.code,
        "line": diag.line,
        "col": diag.col,
        "message": diag.message,
    }


def _print_diagnostics(diags: list[Diagnostic], file: str, *, stream=None) -> None:
    for diag in diags:
        print(diag.render(file), file=stream or sys.stdout)


def _load_config(args) -> ProjectConfig:
    return load_config(getattr(args, "config", None))


def _script_path(args, config: ProjectConfig) -> str:
    path = getattr(args, "script", None) or config.script
    if not path:
        raise _fail("no script given: pass one or set 'script' in the config", 2)
    return path


def _parse_script_file(path: str) -> AnnotatedScript:
    try:
        return parse_script(_read_text(path))
    except ScriptError as exc:
        print(exc.to_diagnostic().render(path), file=sys.stderr)
        raise _CliError(1) from None


def _sniff_format(path: str, text: str) -> CaptionFormat:
    if text.lstrip("﻿ \n\r\t").startswith("WEBVTT"):
        return CaptionFormat.VTT
    if path.lower().endswith(".vtt"):
        return CaptionFormat.VTT
    return CaptionFormat.SRT


def _parse_caption_file(path: str) -> tuple[CaptionFormat, list]:
    text = _read_text(path)
    fmt = _sniff_format(path, text)
    try:
        return fmt, parse_captions(text, fmt)
    except FormatError as exc:
        print(f"{path}:{exc.line or 0}: [FormatError] {exc.message}", file=sys.stderr)
        raise _CliError(1) from None


# --- parse ---------------------------------------------------------------------------


def _cmd_parse(args) -> int:
    script = _parse_script_file(args.script)
    if args.json:
        doc = []
        for part in script.parts:
            spans = collect_spans(part)
            doc.append(
                {
                    "part": part.index,
                    "title": part.title,
                    "sentences": len(part.sentences),
                    "tags": len(part.tags),
                    "spans": [
                        {
                            "ids": [a.render() for a in span.open.ids],
                            "kind": "video" if span.is_video else "image",
                            "first_sentence": span.first_sentence,
                            "last_sentence": span.last_sentence,
                            "position": tag_position(part, span.open),
                        }
                        for span in spans
                    ],
                }
            )
        print(json.dumps({"parts": doc}, indent=2))
    else:
        for part in script.parts:
            spans = collect_spans(part)
            videos = sum(1 for s in spans if s.is_video)
            print(
                f"Part {part.index}: {part.title or '(untitled)'} -"
                f" {len(part.sentences)} sentences, {len(spans)} spans"
                f" ({videos} video, {len(spans) - videos} image)"
            )
        print(f"OK: {len(script.parts)} parts")
    return 0


# --- validate ------------------------------------------------------------------------


def _cmd_validate(args) -> int:
    config = _load_config(args)
    path = _script_path(args, config)
    script = _parse_script_file(path)
    diags = validate_script(script, config.validator_config())
    if args.json:
        print(json.dumps([_diag_dict(d) for d in diags], indent=2))
    else:
        _print_diagnostics(diags, path)
        if not diags:
            print(f"{path}: clean")
    return 1 if has_errors(diags) else 0


# --- captions ------------------------------------------------------------------------


def _cmd_captions(args) -> int:
    config = _load_config(args)
    if args.input:
        path = args.input
        label = args.split.upper() if args.split else Path(args.input).stem
    else:
        if not args.split:
            raise _fail("captions: pass an input file or --split with a config", 2)
        label = args.split.upper()
        path = config.captions.get(label)
        if not path:
            raise _fail(f"captions: no caption file configured for split {label}", 2)
    fmt, raw = _parse_caption_file(path)
    result = polish_captions(raw, config.polish_config())
    out_dir = Path(args.out or config.output_dir)
    polished_path = out_dir / f"polished{label}.{fmt.value}"
    cuts_path = out_dir / f"cuts{label}.tsv"
    _write_atomic(polished_path, export_captions(result.cues, fmt))
    rows = [["start_s", "end_s", "reason"]]
    rows += [[f"{c.start:.3f}", f"{c.end:.3f}", c.reason.value] for c in result.cuts]
    _write_atomic(cuts_path, _tsv(rows))
    summary = {
        "input": path,
        "raw_cues": len(raw),
        "polished_cues": len(result.cues),
        "cuts": len(result.cuts),
        "raw_duration_s": round(result.raw_duration, 3),
        "polished_duration_s": round(result.polished_duration, 3),
        "outputs": [str(polished_path), str(cuts_path)],
    }
    if args.json:
        print(json.dumps(summary, indent=2))
    else:
        print(
            f"{path}: {len(raw)} cues -> {len(result.cues)} polished,"
            f" {len(result.cuts)} cuts,"
            f" {result.raw_duration:.3f}s -> {result.polished_duration:.3f}s"
        )
        for out in summary["outputs"]:
            print(f"wrote {out}")
    return 0


# --- compile -------------------------------------------------------------------------


def _compile_one(
    script: AnnotatedScript, config: ProjectConfig, label: str, parts: list[int]
) -> tuple[CompileResult, str]:
    path = config.captions.get(label)
    if not path:
        raise _fail(f"compile: no caption file configured for split {label}", 2)
    fmt, raw = _parse_caption_file(path)
    polished = polish_captions(raw, config.polish_config()).cues
    try:
        aligned = align_script_to_captions(
            script, polished, parts=parts, match_threshold=config.align_match_threshold
        )
    except AlignmentError as exc:
        raise _fail(f"{path}: alignment failed: {exc}", 1)
    try:
        return compile_split(script, aligned, label, config.compile_options()), path
    except CompileError as exc:
        raise _fail(f"compile: split {label}: {exc}", 1)


def _coverage_rows(result: CompileResult) -> list[list[str]]:
    report = result.report
    rows = [["split", "kind", "start_ms", "end_ms", "part", "sentences", "severity", "detail"]]
    entries: list[tuple[int, list[str]]] = []
    for a, b in report.covered:
        entries.append((a, [report.split, "covered", str(a), str(b), "-", "-", "-", ""]))
    for a, b in report.mandatory:
        entries.append((a, [report.split, "mandatory", str(a), str(b), "-", "-", "-", ""]))
    for gap in report.gaps:
        entries.append(
            (
                gap.start_ms,
                [
                    report.split,
                    "gap",
                    str(gap.start_ms),
                    str(gap.end_ms),
                    str(gap.part),
                    f"{gap.first_sentence}-{gap.last_sentence}",
                    gap.severity.value,
                    gap.suggestion,
                ],
            )
        )
    rows += [row for _, row in sorted(entries, key=lambda item: (item[0], item[1][1]))]
    return rows


def _fit_rows(result: CompileResult) -> list[list[str]]:
    rows = [
        [
            "split",
            "asset",
            "speed",
            "covered_start_s",
            "covered_end_s",
            "extended_before",
            "extended_after",
            "residual",
        ]
    ]
    for fit in result.fits:
        residual = "-"
        if fit.residual is not None:
            residual = f"{fit.residual.kind.value}:{fit.residual.seconds:.3f}"
        rows.append(
            [
                result.report.split,
                fit.asset.render() if fit.asset else "-",
                fmt_speed(fit.speed),
                f"{fit.covered[0]:.3f}",
                f"{fit.covered[1]:.3f}",
                str(fit.extended_before),
                str(fit.extended_after),
                residual,
            ]
        )
    return rows


def _cmd_compile(args) -> int:
    config = _load_config(args).merged(script=args.script, output_dir=args.out)
    path = _script_path(args, config)
    script = _parse_script_file(path)
    diags = validate_script(script, config.validator_config())
    _print_diagnostics(diags, path, stream=sys.stderr)
    if has_errors(diags):
        return 1
    total = script.part_count
    ranges = plan_splits(total, min(config.split_count, total))
    wanted = ranges if args.split.lower() == "all" else [
        r for r in ranges if r.id == args.split.upper()
    ]
    if not wanted:
        raise _fail(f"unknown split {args.split!r}; splits are {', '.join(r.id for r in ranges)}", 2)

    def run(rng) -> tuple[CompileResult, str]:
        return _compile_one(script, config, rng.id, list(rng.parts()))

    if len(wanted) > 1:
        with ThreadPoolExecutor(max_workers=len(wanted)) as pool:
            compiled = list(pool.map(run, wanted))
    else:
        compiled = [run(wanted[0])]

    from sima.figures import render_timeline_figure

    out_dir = Path(config.output_dir)
    metadata = None
    if args.stamp:
        metadata = {"generated": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    merged_script = copy.deepcopy(script)
    summaries = []
    exit_code = 0
    for rng, (result, _) in zip(wanted, compiled):
        for index in rng.parts():
            merged_script.parts[index - 1] = result.script.parts[index - 1]
        edl_path = out_dir / f"split{rng.id}.edl"
        coverage_path = out_dir / f"coverage{rng.id}.tsv"
        fits_path = out_dir / f"fits{rng.id}.tsv"
        figure_path = out_dir / f"timeline{rng.id}.png"
        _write_atomic(edl_path, export_edl(result.timeline, metadata))
        _write_atomic(coverage_path, _tsv(_coverage_rows(result)))
        _write_atomic(fits_path, _tsv(_fit_rows(result)))
        render_timeline_figure(result.timeline, str(figure_path))
        for diag in result.diagnostics:
            print(diag.render(path), file=sys.stderr)
        if has_errors(list(result.diagnostics)):
            exit_code = 1
        summaries.append(
            {
                "split": rng.id,
                "parts": [rng.first_part, rng.last_part],
                "duration_ms": result.report.duration_ms,
                "covered_ms": result.report.covered_ms,
                "mandatory_ms": result.report.mandatory_ms,
                "gap_ms": result.report.gap_ms,
                "fits": len(result.fits),
                "overlays": len(result.overlays),
                "diagnostics": [_diag_dict(d) for d in result.diagnostics],
                "outputs": [
                    str(edl_path),
                    str(coverage_path),
                    str(fits_path),
                    str(figure_path),
                ],
            }
        )
    script_path = out_dir / "rewritten.sima.md"
    _write_atomic(script_path, serialize_script(merged_script))
    if args.json:
        print(json.dumps({"splits": summaries, "script": str(script_path)}, indent=2))
    else:
        for s in summaries:
            pct = 100.0 * s["covered_ms"] / s["duration_ms"] if s["duration_ms"] else 0.0
            print(
                f"split {s['split']} (parts {s['parts'][0]}-{s['parts'][1]}):"
                f" {s['duration_ms']} ms, {pct:.1f}% covered,"
                f" {s['fits']} clips, {s['overlays']} overlays, {s['gap_ms']} ms gaps"
            )
        print(f"wrote {script_path}")
    return exit_code


# --- manifest ------------------------------------------------------------------------


def _cmd_manifest(args) -> int:
    config = _load_config(args)
    path = _script_path(args, config)
    script = _parse_script_file(path)
    images, videos = generate_manifest(script)
    if args.out:
        out_dir = Path(args.out)
        image_path = out_dir / "images.manifest"
        video_path = out_dir / "videos.manifest"
        _write_atomic(image_path, images)
        _write_atomic(video_path, videos)
        print(f"wrote {image_path} ({len(images.splitlines())} tasks)")
        print(f"wrote {video_path} ({len(videos.splitlines())} tasks)")
    elif args.json:
        print(
            json.dumps(
                {"images": images.splitlines(), "videos": videos.splitlines()}, indent=2
            )
        )
    else:
        sys.stdout.write(images)
        sys.stdout.write(videos)
    return 0


# --- verify --------------------------------------------------------------------------


def _cmd_verify(args) -> int:
    config = _load_config(args)
    path = _script_path(args, config)
    script = _parse_script_file(path)
    sidecar = args.sidecar or config.metadata_sidecar
    if not sidecar:
        raise _fail("verify: pass --sidecar or set 'metadata_sidecar' in the config", 2)
    images, videos = generate_manifest(script)
    try:
        entries = parse_manifest(images) + parse_manifest(videos)
        metadata = parse_metadata_sidecar(_read_text(sidecar))
    except ManifestSyntaxError as exc:
        print(f"{sidecar}: {exc}", file=sys.stderr)
        return 1
    tolerance = args.tolerance if args.tolerance is not None else config.verify_tolerance
    results = verify_assets(entries, metadata, tolerance)
    if args.json:
        print(
            json.dumps(
                [
                    {
                        "asset": r.asset.render(),
                        "status": r.status,
                        "code": r.code,
                        "message": r.message,
                        "delta_s": r.delta,
                    }
                    for r in results
                ],
                indent=2,
            )
        )
    else:
        for r in results:
            print(r.render())
    return 0 if all(r.ok for r in results) else 1


# --- estimate ------------------------------------------------------------------------


def _cmd_estimate(args) -> int:
    config = _load_config(args)
    try:
        estimate = estimate_pipeline(config.pipeline_plan())
    except PlanError as exc:
        raise _fail(f"estimate: {exc}", 2)
    if args.json:
        doc = {
            "steps": [asdict(s) | {"role": s.role.value} for s in estimate.steps],
            "role_hours": {role.value: h for role, h in estimate.role_hours.items()},
            "senior_wall_hours": estimate.senior_wall_hours,
            "wall_clock_hours": estimate.wall_clock_hours,
            "split_assignments": [
                {"split": label, "agent": agent} for label, agent in estimate.split_assignments
            ],
        }
        print(json.dumps(doc, indent=2))
    else:
        print(f"{'Step':>4}  {'Role':<12} {'Hours':>7}  Task")
        for s in estimate.steps:
            note = f"  ({s.note})" if s.note else ""
            print(f"{s.step:>4}  {s.role.value:<12} {s.hours:>7.2f}  {s.name}{note}")
        for role, hours in estimate.role_hours.items():
            print(f"total {role.value}: {hours:.2f} h")
        assignments = ", ".join(
            f"{label}->agent{agent + 1}" for label, agent in estimate.split_assignments
        )
        print(f"senior agents in parallel: {estimate.senior_wall_hours:.2f} h ({assignments})")
        print(f"wall clock: {estimate.wall_clock_hours:.2f} h")
    if args.out:
        out_dir = Path(args.out)
        rows = [["step", "name", "role", "hours", "note"]]
        rows += [
            [str(s.step), s.name, s.role.value, f"{s.hours:.4f}", s.note] for s in estimate.steps
        ]
        tsv_path = out_dir / "workload.tsv"
        _write_atomic(tsv_path, _tsv(rows))
        from sima.figures import render_workload_figure

        figure_path = out_dir / "workload.png"
        render_workload_figure(estimate, str(figure_path))
        print(f"wrote {tsv_path}")
        print(f"wrote {figure_path}")
    return 0


# --- export-captions -------------------------------------------------------------------


def _cmd_export_captions(args) -> int:
    _, cues = _parse_caption_file(args.input)
    fmt = CaptionFormat(args.to)
    text = export_captions(cues, fmt)
    if args.out:
        _write_atomic(Path(args.out), text)
        print(f"wrote {args.out} ({len(cues)} cues)")
    else:
        sys.stdout.write(text)
    return 0


# --- wiring --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sima",
        description="Compile annotated documentary scripts into editing artifacts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, script_positional=False):
        p.add_argument("--config", help="project config file (JSON); also $SIMA_CONFIG")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if script_positional:
            p.add_argument("script", nargs="?", help="annotated script (.sima.md)")

    p = sub.add_parser("parse", help="parse a script and show its structure")
    p.add_argument("script")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("validate", help="run the script validators")
    common(p, script_positional=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("captions", help="polish a raw caption file")
    common(p)
    p.add_argument("input", nargs="?", help="raw caption file (SRT/VTT)")
    p.add_argument("--split", help="split label to look up in the config")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=_cmd_captions)

    p = sub.add_parser("compile", help="compile splits into EDLs and reports")
    common(p, script_positional=True)
    p.add_argument("--split", default="all", help="split label or 'all'")
    p.add_argument("--out", help="output directory")
    p.add_argument("--stamp", action="store_true", help="stamp outputs with a timestamp")
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("manifest", help="emit the asset download manifests")
    common(p, script_positional=True)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=_cmd_manifest)

    p = sub.add_parser("verify", help="check downloaded assets against the manifest")
    common(p, script_positional=True)
    p.add_argument("--sidecar", help="metadata sidecar (JSON)")
    p.add_argument("--tolerance", type=float, help="video duration tolerance in seconds")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("estimate", help="report the workload estimate")
    common(p)
    p.add_argument("--out", help="directory for workload.tsv and workload.png")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("export-captions", help="convert captions between SRT and VTT")
    p.add_argument("input")
    p.add_argument("--to", required=True, choices=[f.value for f in CaptionFormat])
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=_cmd_export_captions)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        return exc.code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ScriptError as exc:
        print(str(exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
