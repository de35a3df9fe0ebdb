"""Toolchain for annotated documentary scripts.

The package takes a narration script marked up with bracket tags, the raw
caption files produced while recording it, and a small amount of project
configuration, and derives the downstream editing artifacts: polished
captions, per-split edit timelines, asset download manifests, deliverable
validators, and workload estimates.
"""

from sima.annotation import (
    AnnotatedScript,
    AssetId,
    AssetKind,
    MissingSourceError,
    Part,
    ScriptError,
    ScriptSyntaxError,
    SourceRef,
    StructureError,
    Tag,
    parse_script,
    serialize_script,
    validate_script,
)
from sima.captions import (
    AlignmentError,
    CaptionCue,
    CaptionFormat,
    CutInterval,
    FormatError,
    align_script_to_captions,
    export_captions,
    parse_captions,
    polish_captions,
)
from sima.config import ConfigError, ProjectConfig
from sima.estimator import (
    DomainError,
    PlanError,
    PipelinePlan,
    estimate_editing,
    estimate_pipeline,
    estimate_polishing_manual,
    estimate_recording,
    estimate_sourcing,
    estimate_transitions,
    plan_splits,
)
from sima.manifest import (
    ManifestEntry,
    ManifestSyntaxError,
    RangeError,
    generate_manifest,
    parse_manifest,
    transition_graphic_name,
    validate_thumbnails,
    validate_transition_graphic,
    verify_assets,
)
from sima.timeline import (
    CompileError,
    CoverageReport,
    FitResult,
    InvalidSpan,
    Timeline,
    compile_split,
    export_edl,
    fit_clip,
    import_edl,
    place_stylized_overlays,
    resolve_transition_display,
)

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "AnnotatedScript",
    "AssetId",
    "AssetKind",
    "CaptionCue",
    "CaptionFormat",
    "CompileError",
    "ConfigError",
    "CoverageReport",
    "CutInterval",
    "DomainError",
    "FitResult",
    "FormatError",
    "InvalidSpan",
    "ManifestEntry",
    "ManifestSyntaxError",
    "MissingSourceError",
    "Part",
    "PipelinePlan",
    "PlanError",
    "ProjectConfig",
    "RangeError",
    "ScriptError",
    "ScriptSyntaxError",
    "SourceRef",
    "StructureError",
    "Tag",
    "Timeline",
    "align_script_to_captions",
    "compile_split",
    "estimate_editing",
    "estimate_pipeline",
    "estimate_polishing_manual",
    "estimate_recording",
    "estimate_sourcing",
    "estimate_transitions",
    "export_captions",
    "export_edl",
    "fit_clip",
    "generate_manifest",
    "import_edl",
    "parse_captions",
    "parse_manifest",
    "parse_script",
    "place_stylized_overlays",
    "plan_splits",
    "polish_captions",
    "resolve_transition_display",
    "serialize_script",
    "transition_graphic_name",
    "validate_script",
    "validate_thumbnails",
    "validate_transition_graphic",
    "verify_assets",
]
