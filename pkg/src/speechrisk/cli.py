"""Command line client for the pipeline.

Each subcommand builds the same request model the HTTP service accepts
and calls its handler in-process; ``serve`` starts the HTTP service.

Exit codes: 0 success, 2 configuration problem (bad flags or config
file), 3 data problem (missing or malformed inputs), 4 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

from pydantic import ValidationError

from . import __version__
from .errors import ConfigurationError, InvalidSpecError, SpeechRiskError
from .service import handlers, schemas

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_RUNTIME = 4

log = logging.getLogger("speechrisk")


def _load_run_config(args) -> schemas.RunConfigModel:
    """Config file first, then explicit --seed/--jobs flags on top."""
    fields = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise ConfigurationError(f"no such config file: {path}")
        try:
            fields = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: not valid JSON ({exc})") from exc
        if not isinstance(fields, dict):
            raise ConfigurationError(f"{path}: config must be a JSON object")
    if getattr(args, "seed", None) is not None:
        fields["seed"] = args.seed
    if getattr(args, "jobs", None) is not None:
        fields["jobs"] = args.jobs
    try:
        return schemas.RunConfigModel(**fields)
    except ValidationError as exc:
        raise ConfigurationError(f"bad run configuration: {exc}") from exc


def _add_eval_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with run configuration")
    p.add_argument("--jobs", type=int, default=None, help="parallel workers")
    p.add_argument("--seed", type=int, default=None, help="run seed")


def _cmd_segment(args) -> int:
    req = schemas.SegmentRequest(
        audio_dir=args.audio, manifests_dir=args.out, kind=args.kind,
        manifests_in=args.manifests_in, segments_dir=args.segments_out,
        frame_ms=args.frame_ms, hop_ms=args.hop_ms,
        threshold_db=args.threshold_db, min_seg_ms=args.min_seg_ms,
        min_gap_ms=args.min_gap_ms,
    )
    resp = handlers.handle_segment(req)
    print(f"segmented {resp.n_recordings} recording(s) into {resp.n_spans} span(s)")
    print(f"manifests: {resp.manifests_dir}")
    if resp.n_segment_files:
        print(f"segment audio files: {resp.n_segment_files}")
    print(resp.rendered_stats, end="")
    if resp.errors:
        for path, err in resp.errors:
            print(f"failed: {path}: {err}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def _cmd_extract(args) -> int:
    sources = tuple(s.strip() for s in args.features.split(",") if s.strip())
    req = schemas.ExtractRequest(
        audio_dir=args.audio, manifests_dir=args.manifests,
        features_dir=args.out, sources=sources,
        jobs=args.jobs if args.jobs is not None else 1,
    )
    resp = handlers.handle_extract(req)
    print(f"extracted {resp.n_segments} segment(s) from {resp.n_recordings} "
          f"recording(s); wrote {resp.n_files} feature file(s)")
    print(f"features: {resp.features_dir}")
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    config = _load_run_config(args)
    req = schemas.EvaluateRequest(
        features_dir=args.features, metadata_path=args.metadata,
        source=args.source, scope=args.scope,
        metadata_level=args.metadata_level, metadata_only=args.metadata_only,
        embeddings_dir=args.embeddings_dir, config=config, out_dir=args.out,
    )
    started = time.perf_counter()
    resp = handlers.handle_evaluate(req)
    elapsed = time.perf_counter() - started
    print(f"source={resp.source} scope={resp.scope} "
          f"metadata_level={resp.metadata_level}")
    # wall time goes to the console only; report files stay byte-stable
    print(f"runtime: {elapsed:.2f}s")
    print(f"subject balanced accuracy: {resp.subject_balanced_accuracy:.4f} "
          f"({resp.n_subjects} subjects)")
    print(f"segment balanced accuracy: {resp.segment_balanced_accuracy:.4f} "
          f"({resp.n_segments} segments)")
    if resp.skipped_subjects:
        print(f"skipped folds: {', '.join(resp.skipped_subjects)}")
    if resp.excluded_subjects:
        print(f"excluded subjects: {', '.join(resp.excluded_subjects)}")
    if resp.report_paths:
        print(f"report: {resp.report_paths['report']}")
    return EXIT_OK


def _cmd_ablation(args) -> int:
    config = _load_run_config(args)
    levels = None
    if args.levels:
        levels = tuple(int(tok) for tok in args.levels.split(",") if tok.strip())
    req = schemas.AblationRequest(
        features_dir=args.features, metadata_path=args.metadata,
        source=args.source, embeddings_dir=args.embeddings_dir,
        levels=levels, granularity=args.granularity, config=config,
        out_dir=args.out,
    )
    started = time.perf_counter()
    resp = handlers.handle_ablation(req)
    print(f"runtime: {time.perf_counter() - started:.2f}s")
    print(resp.rendered, end="")
    if resp.cell_errors:
        for cell, err in resp.cell_errors.items():
            print(f"failed cell {cell}: {err}")
    if resp.report_paths:
        print(f"report: {resp.report_paths['report']}")
    return EXIT_OK


def _parse_bool_probs(tokens) -> dict:
    out = {}
    for token in tokens or ():
        parts = token.split(":")
        if len(parts) != 3:
            raise ConfigurationError(
                f"--bool-prob expects field:p_high:p_low, got {token!r}"
            )
        try:
            out[parts[0]] = (float(parts[1]), float(parts[2]))
        except ValueError as exc:
            raise ConfigurationError(f"bad probability in {token!r}") from exc
    return out


def _cmd_synth(args) -> int:
    req = schemas.SynthRequest(
        out_dir=args.out,
        n_subjects=args.subjects,
        class_ratio=args.class_ratio,
        seed=args.seed if args.seed is not None else 0,
        f0_shift_hz=args.f0_shift,
        jitter_shift=args.jitter_shift,
        shimmer_shift=args.shimmer_shift,
        bdi_shift=args.bdi_shift,
        missing_rate=args.missing_rate,
        n_text_recordings=args.texts,
        n_picdesc_recordings=args.picdescs,
        metadata_determinism=_parse_bool_probs(args.bool_prob),
    )
    resp = handlers.handle_synth(req)
    print(f"generated {len(resp.subject_ids)} subject(s), "
          f"{resp.n_recordings} recording(s), {resp.n_spans} span(s)")
    print(f"audio: {resp.audio_dir}")
    print(f"manifests: {resp.manifests_dir}")
    print(f"metadata: {resp.metadata_path}")
    return EXIT_OK


def _cmd_stats(args) -> int:
    req = schemas.StatsRequest(manifests_dir=args.manifests, out_path=args.out)
    resp = handlers.handle_stats(req)
    print(resp.rendered, end="")
    if resp.report_path:
        print(f"report: {resp.report_path}")
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speechrisk",
        description="speech markers and subject-held-out risk evaluation",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="segment recordings into span manifests")
    p.add_argument("--audio", required=True, help="wav file or directory")
    p.add_argument("--out", required=True, help="manifests directory")
    p.add_argument("--kind", default="picture_description",
                   choices=("picture_description", "neutral_text", "vowel"))
    p.add_argument("--manifests-in", default=None,
                   help="use these hand-labeled manifests instead of detection")
    p.add_argument("--segments-out", default=None,
                   help="also write one WAV per segment under this directory")
    p.add_argument("--frame-ms", type=float, default=25.0)
    p.add_argument("--hop-ms", type=float, default=10.0)
    p.add_argument("--threshold-db", type=float, default=-35.0)
    p.add_argument("--min-seg-ms", type=float, default=200.0)
    p.add_argument("--min-gap-ms", type=float, default=300.0)
    p.set_defaults(fn=_cmd_segment)

    p = sub.add_parser("extract", help="extract per-segment feature files")
    p.add_argument("--audio", required=True, help="audio directory")
    p.add_argument("--manifests", required=True, help="manifests directory")
    p.add_argument("--out", required=True, help="features directory")
    p.add_argument("--features", default="compact,extended,melspec_summary",
                   help="comma-separated sources")
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(fn=_cmd_extract)

    p = sub.add_parser("evaluate", help="one leave-one-subject-out evaluation")
    p.add_argument("--features", required=True, help="features directory")
    p.add_argument("--metadata", required=True, help="metadata CSV")
    p.add_argument("--source", default="compact",
                   help="compact | extended | melspec_summary | embedding:<model_id>")
    p.add_argument("--scope", default="all",
                   choices=("all", "picture_description", "neutral_text", "vowel"))
    p.add_argument("--metadata-level", type=int, default=None,
                   help="fuse metadata at ladder level 1..10")
    p.add_argument("--metadata-only", action="store_true",
                   help="ignore speech features entirely")
    p.add_argument("--embeddings-dir", default=None)
    p.add_argument("--out", default=None,
                   help="write report JSON and tables into this directory")
    _add_eval_flags(p)
    p.set_defaults(fn=_cmd_evaluate)

    p = sub.add_parser("ablation", help="full metadata-ladder sweep")
    p.add_argument("--features", required=True)
    p.add_argument("--metadata", required=True)
    p.add_argument("--source", default="compact")
    p.add_argument("--embeddings-dir", default=None)
    p.add_argument("--levels", default=None, help="comma-separated levels, default 1..10")
    p.add_argument("--granularity", default="subject", choices=("subject", "segment"))
    p.add_argument("--out", default=None,
                   help="write report JSON and tables into this directory")
    _add_eval_flags(p)
    p.set_defaults(fn=_cmd_ablation)

    p = sub.add_parser("synth", help="generate a synthetic cohort")
    p.add_argument("--out", required=True, help="cohort output directory")
    p.add_argument("--subjects", type=int, default=20)
    p.add_argument("--class-ratio", type=float, default=0.5,
                   help="fraction of high-risk subjects")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--f0-shift", type=float, default=0.0)
    p.add_argument("--jitter-shift", type=float, default=0.0)
    p.add_argument("--shimmer-shift", type=float, default=0.0)
    p.add_argument("--bdi-shift", type=float, default=0.0)
    p.add_argument("--missing-rate", type=float, default=0.0)
    p.add_argument("--texts", type=int, default=2,
                   help="read-text recordings per subject")
    p.add_argument("--picdescs", type=int, default=2,
                   help="picture-description recordings per subject")
    p.add_argument("--bool-prob", action="append", metavar="FIELD:P_HIGH:P_LOW",
                   help="answer probabilities for one boolean field; repeatable")
    p.set_defaults(fn=_cmd_synth)

    p = sub.add_parser("stats", help="duration statistics over manifests")
    p.add_argument("--manifests", required=True)
    p.add_argument("--out", default=None, help="write a JSON report here")
    p.set_defaults(fn=_cmd_stats)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=_cmd_serve)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad usage already; keep 0 for --help/--version
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (ConfigurationError, InvalidSpecError, ValidationError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SpeechRiskError as exc:
        print(f"data error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001 - the CLI boundary reports anything
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
