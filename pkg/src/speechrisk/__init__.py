"""Interpretable speech markers and a leakage-safe evaluation harness
for clinician-rated risk cohorts."""

__version__ = "0.1.0"

from .audio_io import AudioBuffer, load_wav, normalize_peak, resample, write_wav
from .cohort import SubjectRecord, binarize_rating, encode_metadata, read_metadata_csv
from .errors import SpeechRiskError
from .evaluation import EvalConfig, ablation_run, load_dataset, loso_run, permutation_test
from .featvec import FeatureVector, extract_segment_features, fuse
from .learner import Scaler, balanced_accuracy, select_c, train_linear_svm
from .segmenter import SegmentManifest, SegmentSpan, energy_vad, ingest_manifest
from .synth import SynthConfig, generate_cohort

__all__ = [
    "AudioBuffer",
    "EvalConfig",
    "FeatureVector",
    "Scaler",
    "SegmentManifest",
    "SegmentSpan",
    "SpeechRiskError",
    "SubjectRecord",
    "SynthConfig",
    "__version__",
    "ablation_run",
    "balanced_accuracy",
    "binarize_rating",
    "encode_metadata",
    "energy_vad",
    "extract_segment_features",
    "fuse",
    "generate_cohort",
    "ingest_manifest",
    "load_dataset",
    "load_wav",
    "loso_run",
    "normalize_peak",
    "permutation_test",
    "read_metadata_csv",
    "resample",
    "select_c",
    "train_linear_svm",
    "write_wav",
]
