"""Project configuration: a flat JSON file mapped onto one dataclass.

Every tunable threshold in the toolchain lives here so the CLI can apply
the precedence flag > config file > default.  The config file is plain
JSON whose keys mirror the field names, e.g.::

    {
      "script": "project.sima.md",
      "captions": {"A": "splitA.srt", "B": "splitB.srt"},
      "part_count": 15,
      "silence_threshold": 1.5
    }
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field

from sima.annotation import ValidatorConfig
from sima.captions import DEFAULT_ANOMALY_LEXICON, PolishConfig
from sima.estimator import PipelinePlan
from sima.timeline import CompileOptions

ENV_VAR = "SIMA_CONFIG"


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class ProjectConfig:
    # paths
    script: str | None = None
    captions: dict[str, str] = field(default_factory=dict)  # split label -> caption file
    metadata_sidecar: str | None = None
    output_dir: str = "out"
    # project shape
    part_count: int = 15
    split_count: int = 3
    senior_agents: int = 3
    final_runtime_hours: float = 1.5
    finalization_hours: float = 1.0
    broll_ready: bool = True
    # caption polishing and alignment
    silence_threshold: float = 1.5
    similarity_threshold: float = 0.8
    anomaly_lexicon: tuple[str, ...] = DEFAULT_ANOMALY_LEXICON
    align_match_threshold: float = 0.5
    # timeline compilation
    preferred_speed_low: float = 0.75
    preferred_speed_high: float = 2.0
    hard_speed_low: float = 0.5
    hard_speed_high: float = 4.0
    extension_sentences: int = 2
    transition_duration: float = 4.0
    early_start_threshold: float = 2.0
    overlay_count: int = 4
    overlay_duration: float = 20.0
    overlay_min_gap: float = 180.0
    # validators
    max_image_span_sentences: int = 3
    allow_overlapping_images: bool = False
    verify_tolerance: float = 0.5

    def validate(self) -> None:
        if not 2 <= self.part_count <= 30:
            raise ConfigError(f"part_count must be in 2..30, got {self.part_count}")
        if not 1 <= self.split_count <= self.part_count:
            raise ConfigError(
                f"split_count must be in 1..part_count, got {self.split_count}"
            )
        if self.senior_agents < 1:
            raise ConfigError("senior_agents must be at least 1")
        bands = (
            self.hard_speed_low,
            self.preferred_speed_low,
            self.preferred_speed_high,
            self.hard_speed_high,
        )
        if not all(b > 0 for b in bands) or sorted(bands) != list(bands):
            raise ConfigError(
                "speed bands must be positive and ordered:"
                " hard low <= preferred low <= preferred high <= hard high"
            )
        positives = {
            "final_runtime_hours": self.final_runtime_hours,
            "silence_threshold": self.silence_threshold,
            "similarity_threshold": self.similarity_threshold,
            "align_match_threshold": self.align_match_threshold,
            "transition_duration": self.transition_duration,
            "early_start_threshold": self.early_start_threshold,
            "overlay_duration": self.overlay_duration,
            "overlay_min_gap": self.overlay_min_gap,
            "verify_tolerance": self.verify_tolerance,
        }
        for name, value in positives.items():
            if value <= 0:
                raise ConfigError(f"{name} must be positive, got {value}")
        for name, value in (
            ("finalization_hours", self.finalization_hours),
            ("extension_sentences", self.extension_sentences),
            ("overlay_count", self.overlay_count),
            ("max_image_span_sentences", self.max_image_span_sentences),
        ):
            if value < 0:
                raise ConfigError(f"{name} must not be negative, got {value}")

    def merged(self, **overrides) -> ProjectConfig:
        """A copy with the non-None overrides applied (flag > config > default)."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        unknown = set(changes) - {f.name for f in dataclasses.fields(self)}
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        merged = dataclasses.replace(self, **changes)
        merged.validate()
        return merged

    # views consumed by the individual modules
    def compile_options(self) -> CompileOptions:
        return CompileOptions(
            split_count=self.split_count,
            preferred_band=(self.preferred_speed_low, self.preferred_speed_high),
            hard_band=(self.hard_speed_low, self.hard_speed_high),
            transition_duration=self.transition_duration,
            early_start_threshold=self.early_start_threshold,
            extension_sentences=self.extension_sentences,
            overlay_count=self.overlay_count,
            overlay_duration=self.overlay_duration,
            overlay_min_gap=self.overlay_min_gap,
        )

    def polish_config(self) -> PolishConfig:
        return PolishConfig(
            silence_threshold=self.silence_threshold,
            similarity_threshold=self.similarity_threshold,
            anomaly_lexicon=tuple(self.anomaly_lexicon),
        )

    def validator_config(self) -> ValidatorConfig:
        return ValidatorConfig(
            max_image_span_sentences=self.max_image_span_sentences,
            allow_overlapping_images=self.allow_overlapping_images,
        )

    def pipeline_plan(self) -> PipelinePlan:
        return PipelinePlan.uniform(
            final_runtime_hours=self.final_runtime_hours,
            part_count=self.part_count,
            split_count=self.split_count,
            broll_ready=self.broll_ready,
            senior_agents=self.senior_agents,
            finalization_hours=self.finalization_hours,
        )

    @classmethod
    def from_dict(cls, data: dict) -> ProjectConfig:
        if not isinstance(data, dict):
            raise ConfigError("config document must be a JSON object")
        fields = {f.name: f for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, value in data.items():
            if key not in fields:
                raise ConfigError(f"unknown config key {key!r}")
            if key == "captions":
                if not isinstance(value, dict):
                    raise ConfigError("captions must map split labels to file paths")
                value = {str(k).upper(): str(v) for k, v in value.items()}
            elif key == "anomaly_lexicon":
                if not isinstance(value, list):
                    raise ConfigError("anomaly_lexicon must be a list of tokens")
                value = tuple(str(t).lower() for t in value)
            kwargs[key] = value
        try:
            config = cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        config.validate()
        return config

    @classmethod
    def from_file(cls, path: str) -> ProjectConfig:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad config {path}: {exc}") from None
        return cls.from_dict(data)


def load_config(path: str | None = None) -> ProjectConfig:
    """Load config from a path, $SIMA_CONFIG, or fall back to defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return ProjectConfig()
    return ProjectConfig.from_file(path)
