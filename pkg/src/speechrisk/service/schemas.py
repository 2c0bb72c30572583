"""Request and response bodies for the HTTP service.

The command-line client builds these same models and calls the handlers
in-process, so the two surfaces cannot drift apart.
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field

from ..learner import DEFAULT_C_GRID, DEFAULT_MAX_EPOCHS, DEFAULT_TOL, INNER_FOLDS


class RunConfigModel(BaseModel):
    """Evaluation knobs shared by evaluate and ablation."""

    c_grid: tuple[float, ...] = DEFAULT_C_GRID
    inner_k: int = INNER_FOLDS
    tol: float = DEFAULT_TOL
    max_epochs: int = DEFAULT_MAX_EPOCHS
    seed: int = 0
    jobs: int = Field(default=1, ge=1)


class SegmentRequest(BaseModel):
    audio_dir: str
    manifests_dir: str
    kind: str = "picture_description"
    manifests_in: Optional[str] = None
    segments_dir: Optional[str] = None
    frame_ms: float = 25.0
    hop_ms: float = 10.0
    threshold_db: float = -35.0
    min_seg_ms: float = 200.0
    min_gap_ms: float = 300.0


class SegmentResponse(BaseModel):
    manifests_dir: str
    n_recordings: int
    n_spans: int
    n_segment_files: int
    errors: list[tuple[str, str]]
    rendered_stats: str


class ExtractRequest(BaseModel):
    audio_dir: str
    manifests_dir: str
    features_dir: str
    sources: tuple[str, ...] = ("compact", "extended", "melspec_summary")
    jobs: int = Field(default=1, ge=1)


class ExtractResponse(BaseModel):
    features_dir: str
    sources: tuple[str, ...]
    n_recordings: int
    n_segments: int
    n_files: int


class EvaluateRequest(BaseModel):
    features_dir: str
    metadata_path: str
    source: str = "compact"
    scope: str = "all"
    metadata_level: Optional[int] = Field(default=None, ge=1, le=10)
    metadata_only: bool = False
    embeddings_dir: Optional[str] = None
    config: RunConfigModel = RunConfigModel()
    out_dir: Optional[str] = None


class SubjectOutcome(BaseModel):
    subject_id: str
    label: int
    prediction: int


class EvaluateResponse(BaseModel):
    source: str
    scope: str
    metadata_level: Optional[int]
    seed: int
    subject_balanced_accuracy: float
    segment_balanced_accuracy: float
    n_subjects: int
    n_segments: int
    subjects: list[SubjectOutcome]
    skipped_subjects: list[str]
    excluded_subjects: list[str]
    report_paths: Optional[dict[str, str]] = None


class AblationRequest(BaseModel):
    features_dir: str
    metadata_path: str
    source: str = "compact"
    embeddings_dir: Optional[str] = None
    levels: Optional[tuple[int, ...]] = None
    granularity: str = "subject"
    config: RunConfigModel = RunConfigModel()
    out_dir: Optional[str] = None


class AblationResponse(BaseModel):
    source: str
    granularity: str
    row_labels: list[str]
    column_labels: list[str]
    values: list[list[Optional[float]]]
    rendered: str
    cell_errors: dict[str, str]
    report_paths: Optional[dict[str, str]] = None


class SynthRequest(BaseModel):
    out_dir: str
    n_subjects: int = Field(default=20, ge=4)
    class_ratio: float = Field(default=0.5, gt=0.0, lt=1.0)
    seed: int = 0
    f0_shift_hz: float = 0.0
    jitter_shift: float = 0.0
    shimmer_shift: float = 0.0
    bdi_shift: float = 0.0
    missing_rate: float = Field(default=0.0, ge=0.0, lt=1.0)
    n_text_recordings: int = Field(default=2, ge=0)
    n_picdesc_recordings: int = Field(default=2, ge=0)
    metadata_determinism: dict[str, tuple[float, float]] = {}


class SynthResponse(BaseModel):
    out_dir: str
    audio_dir: str
    manifests_dir: str
    metadata_path: str
    subject_ids: list[str]
    n_recordings: int
    n_spans: int


class StatsRequest(BaseModel):
    manifests_dir: str
    out_path: Optional[str] = None


class StatsRow(BaseModel):
    label: str
    count: int
    mean_s: Optional[float]
    std_s: Optional[float]
    min_s: Optional[float]
    max_s: Optional[float]
    total_min: float


class StatsResponse(BaseModel):
    rows: list[StatsRow]
    rendered: str
    rendered_csv: str
    report_path: Optional[str] = None


class HealthResponse(BaseModel):
    status: str
    version: str
