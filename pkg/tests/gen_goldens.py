"""Regenerate the golden files under tests/data/golden/.

Run from the repository root after any intentional change to table
rendering, feature extraction, or the frozen configs in cohortcfg.py:

    python3 -m tests.gen_goldens

The goldens freeze rendered output bytes for the tiny cohort, so the
acceptance suite can prove a change did not silently move any table
cell or its formatting.
"""

import tempfile
from pathlib import Path

from speechrisk.cohort import read_metadata_csv
from speechrisk.evaluation import ablation_run, load_dataset
from speechrisk.pipeline import collect_stats, extract_features
from speechrisk.reports import (
    ablation_table_rows,
    render_ablation_table,
    render_csv,
    render_stats_table,
    stats_table_rows,
)
from speechrisk.synth import generate_cohort

from .cohortcfg import FAST_EVAL, TINY_COHORT

GOLDEN_DIR = Path(__file__).parent / "data" / "golden"


def build_goldens(work_dir) -> dict[str, str]:
    """Golden file name -> content, built from the frozen configs."""
    work_dir = Path(work_dir)
    layout = generate_cohort(work_dir / "cohort", TINY_COHORT)
    features_dir = work_dir / "features"
    extract_features(layout.audio_dir, layout.manifests_dir, features_dir,
                     sources=("compact",))

    stats_rows = collect_stats(layout.manifests_dir)
    dataset = load_dataset(features_dir, "compact")
    records = read_metadata_csv(layout.metadata_path)
    table = ablation_run(dataset, records, config=FAST_EVAL)

    return {
        "stats.table.txt": render_stats_table(stats_rows),
        "stats.table.csv": render_csv(stats_table_rows(stats_rows)),
        "ablation.table.txt": render_ablation_table(table),
        "ablation.table.csv": render_csv(ablation_table_rows(table)),
    }


def main() -> None:
    with tempfile.TemporaryDirectory() as work_dir:
        goldens = build_goldens(work_dir)
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    for name, content in goldens.items():
        (GOLDEN_DIR / name).write_text(content)
        print(f"wrote {GOLDEN_DIR / name} ({len(content)} bytes)")


if __name__ == "__main__":
    main()
