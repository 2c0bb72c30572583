"""Request handlers shared by the HTTP endpoints and the command line.

Each handler is a plain function from request model to response model;
domain errors propagate for the caller (HTTP layer or CLI) to map onto
its own error surface.
"""

from __future__ import annotations

from ..cohort import read_metadata_csv
from ..evaluation import EvalConfig, ablation_run, load_dataset, loso_run
from ..pipeline import collect_stats, extract_features, segment_audio
from ..reports import (
    ablation_table_rows,
    ablation_to_dict,
    config_hash,
    loso_table_rows,
    loso_to_dict,
    render_ablation_table,
    render_csv,
    render_stats_table,
    stats_table_rows,
    stats_to_dict,
    write_json_report,
    write_report_files,
)
from ..synth import SynthConfig, generate_cohort
from . import schemas


def eval_config_from(model: schemas.RunConfigModel) -> EvalConfig:
    return EvalConfig(
        c_grid=tuple(model.c_grid),
        inner_k=model.inner_k,
        tol=model.tol,
        max_epochs=model.max_epochs,
        seed=model.seed,
        jobs=model.jobs,
    )


def _report_config(req, run_config: schemas.RunConfigModel) -> dict:
    """Everything that shaped the experiment, so the hash separates runs
    that differ in scope or source, not just solver knobs."""
    doc = run_config.model_dump()
    for key in ("source", "scope", "metadata_level", "metadata_only",
                "levels", "granularity"):
        if hasattr(req, key):
            value = getattr(req, key)
            doc[key] = list(value) if isinstance(value, tuple) else value
    return doc


def handle_segment(req: schemas.SegmentRequest) -> schemas.SegmentResponse:
    summary = segment_audio(
        req.audio_dir, req.manifests_dir, kind=req.kind,
        manifests_in=req.manifests_in, segments_dir=req.segments_dir,
        frame_ms=req.frame_ms, hop_ms=req.hop_ms,
        threshold_db=req.threshold_db, min_seg_ms=req.min_seg_ms,
        min_gap_ms=req.min_gap_ms,
    )
    rendered = render_stats_table(collect_stats(summary.manifests_dir))
    return schemas.SegmentResponse(
        manifests_dir=str(summary.manifests_dir),
        n_recordings=summary.n_recordings,
        n_spans=summary.n_spans,
        n_segment_files=summary.n_segment_files,
        errors=list(summary.errors),
        rendered_stats=rendered,
    )


def handle_extract(req: schemas.ExtractRequest) -> schemas.ExtractResponse:
    summary = extract_features(
        req.audio_dir, req.manifests_dir, req.features_dir,
        sources=tuple(req.sources), jobs=req.jobs,
    )
    return schemas.ExtractResponse(
        features_dir=str(summary.features_dir),
        sources=summary.sources,
        n_recordings=summary.n_recordings,
        n_segments=summary.n_segments,
        n_files=summary.n_files,
    )


def handle_evaluate(req: schemas.EvaluateRequest) -> schemas.EvaluateResponse:
    records = read_metadata_csv(req.metadata_path)
    config = eval_config_from(req.config)
    if req.metadata_only:
        if req.metadata_level is None:
            raise ValueError("metadata-only evaluation needs a metadata level")
        dataset = None
    else:
        dataset = load_dataset(req.features_dir, req.source, req.embeddings_dir)
    result = loso_run(dataset, records, scope=req.scope,
                      metadata_level=req.metadata_level, config=config)
    report_paths = None
    if req.out_dir:
        doc = loso_to_dict(result)
        doc["config"] = _report_config(req, req.config)
        doc["config_hash"] = config_hash(doc["config"])
        paths = write_report_files(req.out_dir, doc, loso_table_rows(result))
        report_paths = {k: str(p) for k, p in paths.items()}
    return schemas.EvaluateResponse(
        source=result.source,
        scope=result.scope,
        metadata_level=result.metadata_level,
        seed=result.seed,
        subject_balanced_accuracy=result.subject_balanced_accuracy,
        segment_balanced_accuracy=result.segment_balanced_accuracy,
        n_subjects=len(result.subject_ids),
        n_segments=len(result.segment_ids),
        subjects=[
            schemas.SubjectOutcome(subject_id=s, label=int(t), prediction=int(p))
            for s, t, p in zip(result.subject_ids, result.y_true_subject,
                               result.y_pred_subject)
        ],
        skipped_subjects=list(result.skipped_subjects),
        excluded_subjects=list(result.excluded_subjects),
        report_paths=report_paths,
    )


def handle_ablation(req: schemas.AblationRequest) -> schemas.AblationResponse:
    records = read_metadata_csv(req.metadata_path)
    config = eval_config_from(req.config)
    dataset = load_dataset(req.features_dir, req.source, req.embeddings_dir)
    kwargs = {}
    if req.levels is not None:
        kwargs["levels"] = tuple(req.levels)
    table = ablation_run(dataset, records, config=config,
                         granularity=req.granularity, **kwargs)
    rendered = render_ablation_table(table)
    doc = ablation_to_dict(table)
    report_paths = None
    if req.out_dir:
        doc["config"] = _report_config(req, req.config)
        doc["config_hash"] = config_hash(doc["config"])
        paths = write_report_files(req.out_dir, doc, ablation_table_rows(table))
        report_paths = {k: str(p) for k, p in paths.items()}
    return schemas.AblationResponse(
        source=table.source,
        granularity=table.granularity,
        row_labels=doc["row_labels"],
        column_labels=doc["column_labels"],
        values=doc["values"],
        rendered=rendered,
        cell_errors=doc["cell_errors"],
        report_paths=report_paths,
    )


def handle_synth(req: schemas.SynthRequest) -> schemas.SynthResponse:
    config = SynthConfig(
        n_subjects=req.n_subjects,
        class_ratio=req.class_ratio,
        seed=req.seed,
        f0_shift_hz=req.f0_shift_hz,
        jitter_shift=req.jitter_shift,
        shimmer_shift=req.shimmer_shift,
        bdi_shift=req.bdi_shift,
        missing_rate=req.missing_rate,
        n_text_recordings=req.n_text_recordings,
        n_picdesc_recordings=req.n_picdesc_recordings,
        metadata_determinism=dict(req.metadata_determinism),
    )
    layout = generate_cohort(req.out_dir, config)
    return schemas.SynthResponse(
        out_dir=str(layout.out_dir),
        audio_dir=str(layout.audio_dir),
        manifests_dir=str(layout.manifests_dir),
        metadata_path=str(layout.metadata_path),
        subject_ids=list(layout.subject_ids),
        n_recordings=layout.n_recordings,
        n_spans=layout.n_spans,
    )


def handle_stats(req: schemas.StatsRequest) -> schemas.StatsResponse:
    rows = collect_stats(req.manifests_dir)
    rendered = render_stats_table(rows)
    rendered_csv = render_csv(stats_table_rows(rows))
    report_path = None
    if req.out_path:
        doc = stats_to_dict(rows)
        doc["rendered"] = rendered
        doc["rendered_csv"] = rendered_csv
        write_json_report(req.out_path, doc)
        report_path = req.out_path
    return schemas.StatsResponse(
        rows=[schemas.StatsRow(**row) for row in stats_to_dict(rows)["rows"]],
        rendered=rendered,
        rendered_csv=rendered_csv,
        report_path=report_path,
    )
