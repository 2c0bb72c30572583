"""Subject metadata: CSV schema, label binarization, the incremental
metadata ladder and its numeric encoding, and training-side imputation.

The clinician's 1..6 severity rating is the label source: 1..4 maps to
the low-risk class, 5..6 to high risk. Metadata fields accumulate over
ten ladder levels, from demographics alone up to the full questionnaire
plus depression inventory score.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (
    MissingFileError,
    MissingRequiredFieldError,
    RatingOutOfRangeError,
    SchemaViolationError,
    TooFewRowsError,
)

LOW_RISK, HIGH_RISK = 0, 1
CLASS_NAMES = {LOW_RISK: "low", HIGH_RISK: "high"}

GENDERS = ("female", "male", "other")

METADATA_COLUMNS = (
    "subject_id",
    "age",
    "gender",
    "height_cm",
    "weight_kg",
    "suicide_attempt_history",
    "firearm_or_lethal_medication_access",
    "hopelessness",
    "sexual_abuse_trauma",
    "stress_situation",
    "substance_abuse",
    "mania",
    "nssi",
    "bdi_score",
    "clinician_rating",
)

BOOLEAN_FIELDS = (
    "suicide_attempt_history",
    "firearm_or_lethal_medication_access",
    "sexual_abuse_trauma",
    "stress_situation",
    "substance_abuse",
    "mania",
    "nssi",
)

HOPELESSNESS_MAX = 4

# field added at each ladder level beyond the demographics base
LADDER_FIELDS = (
    "suicide_attempt_history",
    "firearm_or_lethal_medication_access",
    "hopelessness",
    "sexual_abuse_trauma",
    "stress_situation",
    "substance_abuse",
    "mania",
    "nssi",
    "bdi_score",
)

LEVEL_LABELS = (
    "Demographics (F1)",
    "F1 + Suicide Attempts (F2)",
    "F2 + Firearms or Potentially Lethal Medication (F3)",
    "F3 + Hopelessness (F4)",
    "F4 + Sexual Abuse/Trauma (F5)",
    "F5 + Stress Situation (F6)",
    "F6 + Substance Abuse (F7)",
    "F7 + Mania (F8)",
    "F8 + NSSI (F9)",
    "F9 + BDI (F10)",
)

N_LEVELS = len(LEVEL_LABELS)


@dataclass(frozen=True)
class SubjectRecord:
    """One subject's metadata row; None marks a missing answer."""

    subject_id: str
    clinician_rating: int
    age: Optional[float] = None
    gender: Optional[str] = None
    height_cm: Optional[float] = None
    weight_kg: Optional[float] = None
    suicide_attempt_history: Optional[bool] = None
    firearm_or_lethal_medication_access: Optional[bool] = None
    hopelessness: Optional[int] = None
    sexual_abuse_trauma: Optional[bool] = None
    stress_situation: Optional[bool] = None
    substance_abuse: Optional[bool] = None
    mania: Optional[bool] = None
    nssi: Optional[bool] = None
    bdi_score: Optional[float] = None

    def __post_init__(self):
        if not self.subject_id:
            raise MissingRequiredFieldError("subject_id must be non-empty")
        if not isinstance(self.clinician_rating, int) or isinstance(self.clinician_rating, bool):
            raise RatingOutOfRangeError(
                f"clinician_rating must be an integer, got {self.clinician_rating!r}"
            )
        if not 1 <= self.clinician_rating <= 6:
            raise RatingOutOfRangeError(
                f"clinician_rating must lie in 1..6, got {self.clinician_rating}"
            )
        if self.gender is not None and self.gender not in GENDERS:
            raise SchemaViolationError(f"gender must be one of {GENDERS}, got {self.gender!r}")
        if self.hopelessness is not None and not 0 <= self.hopelessness <= HOPELESSNESS_MAX:
            raise SchemaViolationError(
                f"hopelessness must lie in 0..{HOPELESSNESS_MAX}, got {self.hopelessness}"
            )

    @property
    def label(self) -> int:
        return binarize_rating(self.clinician_rating)


def binarize_rating(rating: int) -> int:
    """Severity 1..4 is low risk, 5..6 is high risk."""
    if not isinstance(rating, int) or isinstance(rating, bool) or not 1 <= rating <= 6:
        raise RatingOutOfRangeError(f"rating must be an integer in 1..6, got {rating!r}")
    return HIGH_RISK if rating >= 5 else LOW_RISK


def _parse_float(token: str, column: str, where: str) -> Optional[float]:
    if token == "":
        return None
    try:
        return float(token)
    except ValueError as exc:
        raise SchemaViolationError(f"{where}: column {column!r} is not numeric") from exc


def _parse_bool(token: str, column: str, where: str) -> Optional[bool]:
    if token == "":
        return None
    if token in ("1", "true"):
        return True
    if token in ("0", "false"):
        return False
    raise SchemaViolationError(f"{where}: column {column!r} must be 0/1, got {token!r}")


def _parse_int(token: str, column: str, where: str) -> Optional[int]:
    if token == "":
        return None
    try:
        return int(token)
    except ValueError as exc:
        raise SchemaViolationError(f"{where}: column {column!r} is not an integer") from exc


def read_metadata_csv(path) -> list[SubjectRecord]:
    """Load the cohort metadata table; empty cells mean missing."""
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"no such metadata file: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaViolationError(f"{path}: empty file") from None
        if tuple(header) != METADATA_COLUMNS:
            raise SchemaViolationError(
                f"{path}: header must be exactly {','.join(METADATA_COLUMNS)}"
            )
        records = []
        seen = set()
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            where = f"{path}:{lineno}"
            if len(row) != len(METADATA_COLUMNS):
                raise SchemaViolationError(
                    f"{where}: expected {len(METADATA_COLUMNS)} cells, got {len(row)}"
                )
            cells = dict(zip(METADATA_COLUMNS, (c.strip() for c in row)))
            if cells["subject_id"] == "":
                raise MissingRequiredFieldError(f"{where}: subject_id is empty")
            if cells["subject_id"] in seen:
                raise SchemaViolationError(
                    f"{where}: duplicate subject_id {cells['subject_id']!r}"
                )
            seen.add(cells["subject_id"])
            if cells["clinician_rating"] == "":
                raise MissingRequiredFieldError(f"{where}: clinician_rating is empty")
            rating = _parse_int(cells["clinician_rating"], "clinician_rating", where)
            gender = cells["gender"] or None
            records.append(SubjectRecord(
                subject_id=cells["subject_id"],
                clinician_rating=rating,
                age=_parse_float(cells["age"], "age", where),
                gender=gender,
                height_cm=_parse_float(cells["height_cm"], "height_cm", where),
                weight_kg=_parse_float(cells["weight_kg"], "weight_kg", where),
                suicide_attempt_history=_parse_bool(
                    cells["suicide_attempt_history"], "suicide_attempt_history", where),
                firearm_or_lethal_medication_access=_parse_bool(
                    cells["firearm_or_lethal_medication_access"],
                    "firearm_or_lethal_medication_access", where),
                hopelessness=_parse_int(cells["hopelessness"], "hopelessness", where),
                sexual_abuse_trauma=_parse_bool(
                    cells["sexual_abuse_trauma"], "sexual_abuse_trauma", where),
                stress_situation=_parse_bool(
                    cells["stress_situation"], "stress_situation", where),
                substance_abuse=_parse_bool(
                    cells["substance_abuse"], "substance_abuse", where),
                mania=_parse_bool(cells["mania"], "mania", where),
                nssi=_parse_bool(cells["nssi"], "nssi", where),
                bdi_score=_parse_float(cells["bdi_score"], "bdi_score", where),
            ))
    if not records:
        raise TooFewRowsError(f"{path}: no subject rows")
    return records


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float) and value == int(value):
        return str(int(value))
    return str(value)


def write_metadata_csv(path, records: list[SubjectRecord]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(METADATA_COLUMNS)]
    for r in records:
        lines.append(",".join(_cell(getattr(r, col)) for col in METADATA_COLUMNS))
    path.write_text("\n".join(lines) + "\n")


def metadata_feature_names(level: int) -> tuple[str, ...]:
    """Feature names for ladder level 1..10."""
    if not 1 <= level <= N_LEVELS:
        raise ValueError(f"metadata level must lie in 1..{N_LEVELS}, got {level}")
    names = ["age", "gender_female", "gender_male", "gender_other",
             "height_cm", "weight_kg"]
    names += list(LADDER_FIELDS[: level - 1])
    return tuple(names)


def encode_metadata(record: SubjectRecord, level: int) -> np.ndarray:
    """Strict numeric encoding of one subject at one ladder level.

    Every field the level needs must be answered; evaluation code that
    tolerates gaps goes through MetadataImputer instead.
    """
    required = ("age", "gender", "height_cm", "weight_kg") + LADDER_FIELDS[: level - 1]
    missing = [f for f in required if getattr(record, f) is None]
    if missing:
        raise MissingRequiredFieldError(
            f"subject {record.subject_id!r} lacks {', '.join(missing)} "
            f"required by metadata level F{level}"
        )
    values = [float(record.age)]
    onehot = [0.0, 0.0, 0.0]
    onehot[GENDERS.index(record.gender)] = 1.0
    values += onehot
    values.append(float(record.height_cm))
    values.append(float(record.weight_kg))
    values += [float(getattr(record, f)) for f in LADDER_FIELDS[: level - 1]]
    return np.asarray(values, dtype=np.float64)


@dataclass(frozen=True)
class MetadataImputer:
    """Training-fold fill-in values for missing answers.

    Numeric, ordinal and boolean fields take the training median of their
    numeric encodings; a missing gender falls into the 'other' slot.
    """

    fill: dict

    @classmethod
    def fit(cls, records: list[SubjectRecord]) -> "MetadataImputer":
        if not records:
            raise TooFewRowsError("cannot fit an imputer on an empty cohort")
        fill = {}
        numeric_fields = ("age", "height_cm", "weight_kg", "hopelessness", "bdi_score")
        for field in numeric_fields + BOOLEAN_FIELDS:
            seen = [float(v) for r in records
                    if (v := getattr(r, field)) is not None]
            fill[field] = float(np.median(seen)) if seen else 0.0
        return cls(fill=fill)

    def encode(self, record: SubjectRecord, level: int) -> np.ndarray:
        """Numeric encoding of one subject at one ladder level."""
        values = [self._numeric(record, "age")]
        onehot = [0.0, 0.0, 0.0]
        gender = record.gender if record.gender is not None else "other"
        onehot[GENDERS.index(gender)] = 1.0
        values += onehot
        values.append(self._numeric(record, "height_cm"))
        values.append(self._numeric(record, "weight_kg"))
        for field in LADDER_FIELDS[: level - 1]:
            values.append(self._numeric(record, field))
        if len(values) != len(metadata_feature_names(level)):
            raise SchemaViolationError("metadata encoding width drifted from its names")
        return np.asarray(values, dtype=np.float64)

    def _numeric(self, record: SubjectRecord, field: str) -> float:
        value = getattr(record, field)
        if value is None:
            return self.fill[field]
        return float(value)


def encode_cohort(records: list[SubjectRecord], level: int,
                  imputer: Optional[MetadataImputer] = None) -> np.ndarray:
    """Encode many subjects; the imputer defaults to one fit on them."""
    if imputer is None:
        imputer = MetadataImputer.fit(records)
    return np.vstack([imputer.encode(r, level) for r in records])
