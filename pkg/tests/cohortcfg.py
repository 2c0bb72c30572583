"""Frozen configurations shared by fixtures, golden files and acceptance tests.

Any change here invalidates the golden files under tests/data/golden/;
regenerate them with tests/gen_goldens.py if these constants move.
"""

from speechrisk.evaluation import EvalConfig
from speechrisk.synth import SynthConfig

# Small cohort used by pipeline, CLI, service and golden tests. Four
# subjects is the smallest size the generator accepts.
TINY_COHORT = SynthConfig(
    n_subjects=4,
    seed=7,
    n_text_recordings=1,
    n_picdesc_recordings=1,
)

# Reduced grid so inner CV stays fast on the tiny cohort.
FAST_EVAL = EvalConfig(c_grid=(1.0, 1e-2), seed=0, jobs=1)
