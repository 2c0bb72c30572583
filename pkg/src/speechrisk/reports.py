"""Rendering of results as aligned text tables and deterministic JSON.

JSON reports are written with sorted keys and indent 2; floats keep
their shortest round-trip text, so a report is byte-identical across
runs and job counts given the same inputs and seed.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from pathlib import Path

import numpy as np

from .evaluation import AblationTable, LosoResult, PermutationReport
from .segmenter import SegmentStats

STATS_HEADER = ("Sample Type", "# utt.", "mean [s]", "std [s]",
                "min [s]", "max [s]", "total dur. [m]")

SCHEMA_VERSION = "1"


def _render_rows(header: tuple[str, ...], rows: list[tuple[str, ...]]) -> str:
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def line(cells, pad=" "):
        out = []
        for i, cell in enumerate(cells):
            out.append(cell.ljust(widths[i]) if i == 0 else cell.rjust(widths[i]))
        return pad.join(out).rstrip()
    rule = "-" * (sum(widths) + len(widths) - 1)
    body = [line(header), rule]
    body += [line(row) for row in rows]
    return "\n".join(body) + "\n"


def _num(value, digits=2) -> str:
    return "" if value is None else f"{value:.{digits}f}"


def stats_table_rows(rows: list[SegmentStats]) -> list[tuple[str, ...]]:
    """Header plus body cells of the duration table, all as strings."""
    body = [
        (r.label, str(r.count), _num(r.mean_s), _num(r.std_s),
         _num(r.min_s), _num(r.max_s), _num(r.total_min))
        for r in rows
    ]
    return [STATS_HEADER] + body


def render_stats_table(rows: list[SegmentStats]) -> str:
    """Duration statistics in the standard layout, two decimals."""
    table = stats_table_rows(rows)
    return _render_rows(table[0], table[1:])


def ablation_table_rows(table: AblationTable) -> list[tuple[str, ...]]:
    """Header plus body of the ladder grid: percentages with one decimal,
    n/a for dead cells."""
    header = ("",) + tuple(table.column_labels)
    body = []
    for label, row in zip(table.row_labels, table.values):
        cells = tuple("n/a" if np.isnan(v) else f"{100.0 * v:.1f}" for v in row)
        body.append((label,) + cells)
    return [header] + body


def render_ablation_table(table: AblationTable) -> str:
    rows = ablation_table_rows(table)
    return _render_rows(rows[0], rows[1:])


def loso_table_rows(result: LosoResult) -> list[tuple[str, ...]]:
    """One-line summary of a single evaluation run."""
    header = ("Source", "Scope", "Level", "Subjects",
              "Subject bal. acc.", "Segment bal. acc.")
    level = "" if result.metadata_level is None else str(result.metadata_level)
    row = (result.source, result.scope, level, str(len(result.subject_ids)),
           f"{100.0 * result.subject_balanced_accuracy:.1f}",
           f"{100.0 * result.segment_balanced_accuracy:.1f}")
    return [header, row]


def render_csv(rows: list[tuple[str, ...]]) -> str:
    """The same cells as the aligned table, in machine-readable form."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerows(rows)
    return out.getvalue()


def config_hash(doc: dict) -> str:
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:12]


def write_json_report(path, doc: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def write_report_files(out_dir, doc: dict, table_rows: list[tuple[str, ...]]) -> dict:
    """Report JSON plus rendered tables, named by the config hash.

    The hash prefix keeps distinct configurations from overwriting each
    other; the schema_version file pins the directory layout so golden
    comparisons stay meaningful across releases.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = config_hash(doc.get("config", doc))
    paths = {
        "report": out_dir / f"{stem}.report.json",
        "table_txt": out_dir / f"{stem}.table.txt",
        "table_csv": out_dir / f"{stem}.table.csv",
        "schema_version": out_dir / "schema_version",
    }
    write_json_report(paths["report"], doc)
    paths["table_txt"].write_text(_render_rows(table_rows[0], table_rows[1:]))
    paths["table_csv"].write_text(render_csv(table_rows))
    paths["schema_version"].write_text(SCHEMA_VERSION + "\n")
    return paths


def stats_to_dict(rows: list[SegmentStats]) -> dict:
    return {
        "rows": [
            {
                "label": r.label,
                "count": r.count,
                "mean_s": r.mean_s,
                "std_s": r.std_s,
                "min_s": r.min_s,
                "max_s": r.max_s,
                "total_min": r.total_min,
            }
            for r in rows
        ]
    }


def loso_to_dict(result: LosoResult) -> dict:
    return {
        "source": result.source,
        "scope": result.scope,
        "metadata_level": result.metadata_level,
        "seed": result.seed,
        "subject_balanced_accuracy": result.subject_balanced_accuracy,
        "segment_balanced_accuracy": result.segment_balanced_accuracy,
        "subjects": [
            {"subject_id": s, "label": int(t), "prediction": int(p)}
            for s, t, p in zip(result.subject_ids, result.y_true_subject,
                               result.y_pred_subject)
        ],
        "segments": [
            {"segment_id": s, "label": int(t), "prediction": int(p),
             "decision": float(d)}
            for s, t, p, d in zip(result.segment_ids, result.y_true_segment,
                                  result.y_pred_segment, result.decision_values)
        ],
        "folds": [
            {"subject_id": f.subject_id, "best_c": f.best_c,
             "n_train": f.n_train, "n_test": f.n_test, "seed": f.seed}
            for f in result.folds
        ],
        "skipped_subjects": list(result.skipped_subjects),
        "excluded_subjects": list(result.excluded_subjects),
    }


def ablation_to_dict(table: AblationTable) -> dict:
    return {
        "source": table.source,
        "granularity": table.granularity,
        "row_labels": list(table.row_labels),
        "column_labels": list(table.column_labels),
        "values": [
            [None if np.isnan(v) else float(v) for v in row]
            for row in table.values
        ],
        "cell_errors": dict(sorted(table.cell_errors.items())),
    }


def permutation_to_dict(report: PermutationReport) -> dict:
    return {
        "observed": report.observed,
        "n_permutations": report.n_permutations,
        "band_low": report.band_low,
        "band_high": report.band_high,
        "p_value": report.p_value,
        "permuted_scores": [float(s) for s in report.permuted],
    }
