"""Shared fixtures.

The tiny cohort is expensive enough (synthesis plus feature extraction)
that it is built once per session and shared read-only by pipeline,
evaluation, CLI, service and golden tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import pytest

from speechrisk.cohort import SubjectRecord, read_metadata_csv
from speechrisk.featio import SegmentRecord, read_segments_index
from speechrisk.pipeline import extract_features
from speechrisk.synth import CohortLayout, generate_cohort

from .cohortcfg import TINY_COHORT


@dataclass(frozen=True)
class TinyCohort:
    root: Path
    layout: CohortLayout
    features_dir: Path
    records: tuple[SegmentRecord, ...]
    metadata: tuple[SubjectRecord, ...]


@pytest.fixture(scope="session")
def tiny_cohort(tmp_path_factory) -> TinyCohort:
    root = tmp_path_factory.mktemp("tiny_cohort")
    layout = generate_cohort(root, TINY_COHORT)
    features_dir = root / "features"
    extract_features(layout.audio_dir, layout.manifests_dir, features_dir,
                     sources=("compact",))
    return TinyCohort(
        root=root,
        layout=layout,
        features_dir=features_dir,
        records=tuple(read_segments_index(features_dir)),
        metadata=tuple(read_metadata_csv(layout.metadata_path)),
    )
