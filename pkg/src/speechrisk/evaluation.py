"""Leave-one-subject-out evaluation with metadata fusion.

Every outer fold holds one subject out entirely. Inside the fold, the
scaler is fit on training rows only, the cost parameter is picked by
grouped inner cross-validation on training subjects only, and the final
model predicts the held-out subject's segments. Subject predictions come
from a majority vote over segment predictions, broken by the mean
decision value. Nothing derived from the held-out subject ever touches
training.
"""

from __future__ import annotations

import hashlib
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .cohort import (
    LEVEL_LABELS,
    MetadataImputer,
    N_LEVELS,
    SubjectRecord,
    metadata_feature_names,
)
from .embeddings import load_embedding_table
from .errors import (
    EmptyScopeError,
    SingleClassCohortError,
    SingleClassTrainingError,
    TooFewSubjectsError,
    UnknownSubjectInFeaturesError,
)
from .featio import SegmentRecord, load_feature_table, read_segments_index
from .featvec import FEATURE_SOURCES
from .learner import (
    DEFAULT_C_GRID,
    DEFAULT_MAX_EPOCHS,
    DEFAULT_TOL,
    INNER_FOLDS,
    Scaler,
    balanced_accuracy,
    select_c,
    train_linear_svm,
)

log = logging.getLogger(__name__)

SCOPES = ("all", "picture_description", "neutral_text", "vowel")

ABLATION_COLUMNS = ("Only Metadata", "All Speech", "Pic. Desc.", "Neut. Texts", "Vowels")


@dataclass(frozen=True)
class EvalConfig:
    c_grid: tuple[float, ...] = DEFAULT_C_GRID
    inner_k: int = INNER_FOLDS
    tol: float = DEFAULT_TOL
    max_epochs: int = DEFAULT_MAX_EPOCHS
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if not self.c_grid or any(c <= 0 for c in self.c_grid):
            raise ValueError("c_grid must hold positive values")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")


@dataclass(frozen=True)
class SegmentDataset:
    """Feature rows for a set of segments, aligned with their identity."""

    source: str
    feature_names: tuple[str, ...]
    X: np.ndarray
    segment_ids: tuple[str, ...]
    subject_ids: tuple[str, ...]
    kinds: tuple[str, ...]

    def __post_init__(self):
        n = len(self.segment_ids)
        if not (len(self.subject_ids) == len(self.kinds) == n == len(self.X)):
            raise EmptyScopeError("dataset columns are misaligned")

    def restrict(self, scope: str) -> "SegmentDataset":
        if scope == "all":
            return self
        keep = [i for i, k in enumerate(self.kinds) if k == scope]
        return SegmentDataset(
            source=self.source,
            feature_names=self.feature_names,
            X=self.X[keep],
            segment_ids=tuple(self.segment_ids[i] for i in keep),
            subject_ids=tuple(self.subject_ids[i] for i in keep),
            kinds=tuple(self.kinds[i] for i in keep),
        )


def load_dataset(features_dir, source: str,
                 embeddings_dir=None) -> SegmentDataset:
    """Assemble the evaluation matrix for one feature source.

    Handcrafted sources read per-segment CSVs under the features
    directory; ``embedding:<model_id>`` reads the external encoder's
    files instead (default location: ``<features_dir>/embeddings``).
    """
    records = read_segments_index(features_dir)
    if source.startswith("embedding:"):
        model_id = source.split(":", 1)[1]
        if not model_id:
            raise ValueError("embedding source needs a model id after the colon")
        root = embeddings_dir if embeddings_dir is not None else f"{features_dir}/embeddings"
        names, X = load_embedding_table(root, model_id, [r.segment_id for r in records])
    elif source in FEATURE_SOURCES:
        names, X = load_feature_table(features_dir, source, records)
    else:
        raise ValueError(f"unknown feature source {source!r}")
    return SegmentDataset(
        source=source,
        feature_names=names,
        X=X,
        segment_ids=tuple(r.segment_id for r in records),
        subject_ids=tuple(r.subject_id for r in records),
        kinds=tuple(r.kind for r in records),
    )


@dataclass(frozen=True)
class FoldReport:
    subject_id: str
    best_c: float
    n_train: int
    n_test: int
    seed: int


@dataclass(frozen=True)
class LosoResult:
    source: str
    scope: str
    metadata_level: Optional[int]
    seed: int
    subject_ids: tuple[str, ...]
    y_true_subject: np.ndarray
    y_pred_subject: np.ndarray
    subject_balanced_accuracy: float
    segment_ids: tuple[str, ...]
    y_true_segment: np.ndarray
    y_pred_segment: np.ndarray
    decision_values: np.ndarray
    segment_balanced_accuracy: float
    folds: tuple[FoldReport, ...] = ()
    skipped_subjects: tuple[str, ...] = ()
    excluded_subjects: tuple[str, ...] = ()


def fold_seed(run_seed: int, subject_id: str) -> int:
    """Stable per-fold seed independent of subject iteration order."""
    digest = hashlib.sha256(f"{run_seed}:{subject_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % (2**63)


def majority_vote(preds: np.ndarray, decisions: np.ndarray) -> int:
    """Subject label from segment votes; ties follow the mean decision,
    and a mean of exactly 0 resolves to high risk."""
    n_high = int(np.sum(preds == 1))
    n_low = len(preds) - n_high
    if n_high > n_low:
        return 1
    if n_low > n_high:
        return 0
    return 1 if float(np.mean(decisions)) >= 0.0 else 0


def _labels_for(records: list[SubjectRecord]) -> dict[str, int]:
    return {r.subject_id: r.label for r in records}


def loso_run(dataset: Optional[SegmentDataset], records: list[SubjectRecord],
             scope: str = "all", metadata_level: Optional[int] = None,
             config: EvalConfig = EvalConfig()) -> LosoResult:
    """One full leave-one-subject-out pass.

    dataset None means metadata only: one encoded row per subject, which
    makes segment and subject predictions coincide. Otherwise rows are
    the segments whose kind matches the scope, optionally fused with the
    subject's encoded metadata.
    """
    if dataset is None and metadata_level is None:
        raise ValueError("need a feature dataset, a metadata level, or both")
    labels = _labels_for(records)
    by_subject = {r.subject_id: r for r in records}

    if dataset is not None:
        if scope not in SCOPES:
            raise ValueError(f"unknown scope {scope!r}, expected one of {SCOPES}")
        scoped = dataset.restrict(scope)
        if len(scoped.segment_ids) == 0:
            raise EmptyScopeError(f"no segments of kind {scope!r} to evaluate")
        unknown = sorted(set(scoped.subject_ids) - set(labels))
        if unknown:
            raise UnknownSubjectInFeaturesError(
                f"segments reference subjects missing from metadata: {unknown}"
            )
        subject_ids = sorted(set(scoped.subject_ids))
        excluded = tuple(s for s in sorted(labels) if s not in set(subject_ids))
        if excluded:
            log.warning("%d subject(s) have no %s segments and are excluded: %s",
                        len(excluded), scope, ", ".join(excluded))
        seg_subject = np.asarray(scoped.subject_ids)
        seg_labels = np.asarray([labels[s] for s in scoped.subject_ids])
    else:
        scoped = None
        subject_ids = sorted(labels)
        excluded = ()
        seg_subject = np.asarray(subject_ids)
        seg_labels = np.asarray([labels[s] for s in subject_ids])

    if len(subject_ids) < 3:
        raise TooFewSubjectsError(
            f"leave-one-subject-out needs at least 3 subjects, got {len(subject_ids)}"
        )
    if len(set(labels[s] for s in subject_ids)) < 2:
        raise SingleClassCohortError("every evaluable subject carries the same label")

    def run_fold(held_out: str):
        test_mask = seg_subject == held_out
        train_mask = ~test_mask
        y_train = seg_labels[train_mask]
        if len(np.unique(y_train)) < 2:
            raise SingleClassTrainingError(
                f"training fold for {held_out} covers only one class"
            )
        train_subjects = [s for s in subject_ids if s != held_out]
        imputer = MetadataImputer.fit([by_subject[s] for s in train_subjects])

        if scoped is not None:
            X_train = scoped.X[train_mask]
            X_test = scoped.X[test_mask]
            if metadata_level is not None:
                meta = {
                    s: imputer.encode(by_subject[s], metadata_level)
                    for s in subject_ids
                }
                X_train = np.hstack([
                    X_train, np.vstack([meta[s] for s in seg_subject[train_mask]])
                ])
                X_test = np.hstack([
                    X_test, np.vstack([meta[s] for s in seg_subject[test_mask]])
                ])
        else:
            meta = {s: imputer.encode(by_subject[s], metadata_level)
                    for s in subject_ids}
            X_train = np.vstack([meta[s] for s in seg_subject[train_mask]])
            X_test = np.vstack([meta[s] for s in seg_subject[test_mask]])

        scaler = Scaler.fit(X_train)
        X_train = scaler.transform(X_train)
        X_test = scaler.transform(X_test)

        seed = fold_seed(config.seed, held_out)
        best_c, _ = select_c(X_train, y_train, seg_subject[train_mask],
                             c_grid=config.c_grid, k=config.inner_k, seed=seed,
                             tol=config.tol, max_epochs=config.max_epochs)
        model = train_linear_svm(X_train, y_train, best_c, seed=seed,
                                 tol=config.tol, max_epochs=config.max_epochs)
        preds = model.predict(X_test)
        decisions = model.decision_function(X_test)
        report = FoldReport(subject_id=held_out, best_c=best_c,
                            n_train=int(train_mask.sum()),
                            n_test=int(test_mask.sum()), seed=seed)
        return preds, decisions, report

    results: dict[str, tuple] = {}
    skipped: list[str] = []

    def safe_fold(held_out: str):
        try:
            return held_out, run_fold(held_out)
        except SingleClassTrainingError:
            return held_out, None

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            outcomes = list(pool.map(safe_fold, subject_ids))
    else:
        outcomes = [safe_fold(s) for s in subject_ids]
    for held_out, outcome in outcomes:  # merge in sorted-subject order
        if outcome is None:
            skipped.append(held_out)
            log.warning("skipping fold %s: training would be single-class", held_out)
        else:
            results[held_out] = outcome

    if not results:
        raise SingleClassCohortError("no fold had both classes available for training")

    kept = [s for s in subject_ids if s in results]
    seg_ids_out, seg_true, seg_pred, seg_dec = [], [], [], []
    subj_true, subj_pred = [], []
    folds = []
    for s in kept:
        preds, decisions, report = results[s]
        folds.append(report)
        mask = seg_subject == s
        if scoped is not None:
            ids = [scoped.segment_ids[i] for i in np.nonzero(mask)[0]]
        else:
            ids = [s]
        seg_ids_out += ids
        seg_true += [labels[s]] * len(ids)
        seg_pred += list(preds)
        seg_dec += list(decisions)
        subj_true.append(labels[s])
        subj_pred.append(majority_vote(preds, decisions))

    y_true_subject = np.asarray(subj_true)
    y_pred_subject = np.asarray(subj_pred)
    y_true_segment = np.asarray(seg_true)
    y_pred_segment = np.asarray(seg_pred)
    return LosoResult(
        source=dataset.source if dataset is not None else "metadata_only",
        scope=scope if dataset is not None else "metadata_only",
        metadata_level=metadata_level,
        seed=config.seed,
        subject_ids=tuple(kept),
        y_true_subject=y_true_subject,
        y_pred_subject=y_pred_subject,
        subject_balanced_accuracy=balanced_accuracy(y_true_subject, y_pred_subject),
        segment_ids=tuple(seg_ids_out),
        y_true_segment=y_true_segment,
        y_pred_segment=y_pred_segment,
        decision_values=np.asarray(seg_dec),
        segment_balanced_accuracy=balanced_accuracy(y_true_segment, y_pred_segment),
        folds=tuple(folds),
        skipped_subjects=tuple(skipped),
        excluded_subjects=excluded,
    )


def permute_labels(records: list[SubjectRecord], rng: np.random.Generator) -> list[SubjectRecord]:
    """Shuffle clinician ratings across subjects, keeping everything else."""
    ratings = [r.clinician_rating for r in records]
    order = rng.permutation(len(records))
    return [replace(r, clinician_rating=ratings[j]) for r, j in zip(records, order)]


@dataclass(frozen=True)
class PermutationReport:
    observed: float
    permuted: np.ndarray
    n_permutations: int
    band_low: float
    band_high: float
    p_value: float


def permutation_test(dataset: Optional[SegmentDataset], records: list[SubjectRecord],
                     scope: str = "all", metadata_level: Optional[int] = None,
                     config: EvalConfig = EvalConfig(),
                     n_permutations: int = 100, alpha: float = 0.05) -> PermutationReport:
    """Chance band for the subject-level score under label shuffling.

    Permutations that collapse to a single evaluable class are scored at
    0.5, the blind-guess level.
    """
    observed = loso_run(dataset, records, scope, metadata_level, config)
    rng = np.random.default_rng(config.seed)
    scores = np.empty(n_permutations)
    for p in range(n_permutations):
        shuffled = permute_labels(records, rng)
        perm_config = replace(config, seed=int(rng.integers(0, 2**31 - 1)))
        try:
            result = loso_run(dataset, shuffled, scope, metadata_level, perm_config)
            scores[p] = result.subject_balanced_accuracy
        except SingleClassCohortError:
            scores[p] = 0.5
    lo, hi = np.percentile(scores, [100.0 * alpha / 2.0, 100.0 * (1.0 - alpha / 2.0)])
    obs = observed.subject_balanced_accuracy
    p_value = float((1 + np.sum(scores >= obs)) / (1 + n_permutations))
    return PermutationReport(observed=obs, permuted=scores,
                             n_permutations=n_permutations,
                             band_low=float(lo), band_high=float(hi),
                             p_value=p_value)


@dataclass(frozen=True)
class AblationTable:
    """Balanced-accuracy grid over the metadata ladder and speech scopes."""

    source: str
    granularity: str
    row_labels: tuple[str, ...]
    column_labels: tuple[str, ...]
    values: np.ndarray  # (n_levels, n_columns); NaN marks a failed cell
    cell_errors: dict = field(default_factory=dict)


_COLUMN_SCOPES = {
    "Only Metadata": None,
    "All Speech": "all",
    "Pic. Desc.": "picture_description",
    "Neut. Texts": "neutral_text",
    "Vowels": "vowel",
}


def ablation_run(dataset: SegmentDataset, records: list[SubjectRecord],
                 config: EvalConfig = EvalConfig(),
                 levels: Sequence[int] = tuple(range(1, N_LEVELS + 1)),
                 granularity: str = "subject") -> AblationTable:
    """The full metadata-ladder sweep: levels x (metadata, fused scopes).

    Scores are subject-level by default; granularity "segment" switches
    to the pooled per-segment metric. Cells that cannot be evaluated (an
    empty scope, say) hold NaN and the error is kept by cell label. Work
    is parallelized over cells and merged in a fixed order so the table
    is identical at any job count.
    """
    levels = tuple(levels)
    if any(not 1 <= lv <= N_LEVELS for lv in levels):
        raise ValueError(f"ladder levels must lie in 1..{N_LEVELS}")
    if granularity not in ("subject", "segment"):
        raise ValueError(f"granularity must be subject or segment, got {granularity!r}")
    cells = [
        (i, j, level, column)
        for i, level in enumerate(levels)
        for j, column in enumerate(ABLATION_COLUMNS)
    ]

    def run_cell(cell):
        i, j, level, column = cell
        scope = _COLUMN_SCOPES[column]
        try:
            if scope is None:
                result = loso_run(None, records, metadata_level=level, config=config)
            else:
                result = loso_run(dataset, records, scope=scope,
                                  metadata_level=level, config=config)
            score = (result.subject_balanced_accuracy if granularity == "subject"
                     else result.segment_balanced_accuracy)
            return i, j, score, None
        except (EmptyScopeError, SingleClassCohortError, TooFewSubjectsError) as exc:
            return i, j, float("nan"), f"{type(exc).__name__}: {exc}"

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            outcomes = list(pool.map(run_cell, cells))
    else:
        outcomes = [run_cell(cell) for cell in cells]

    values = np.full((len(levels), len(ABLATION_COLUMNS)), np.nan)
    errors: dict[str, str] = {}
    for i, j, score, error in sorted(outcomes, key=lambda t: (t[0], t[1])):
        values[i, j] = score
        if error is not None:
            errors[f"{LEVEL_LABELS[levels[i] - 1]} / {ABLATION_COLUMNS[j]}"] = error
            log.warning("ablation cell failed: %s", error)
    return AblationTable(
        source=dataset.source,
        granularity=granularity,
        row_labels=tuple(LEVEL_LABELS[lv - 1] for lv in levels),
        column_labels=ABLATION_COLUMNS,
        values=values,
        cell_errors=errors,
    )


def metadata_dimension(level: int) -> int:
    """Width of the encoded metadata block at one ladder level."""
    return len(metadata_feature_names(level))
