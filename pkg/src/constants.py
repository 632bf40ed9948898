# Copyright 2025 Canonical Ltd.
# See LICENSE file for licensing details.

"""File containing constants to be used in the lab."""

import pathlib

# Tolerances
TOL_SYM = 1e-10
TOL_SPECTRAL = 1e-9
RANK_TOL = 1e-9
FRAME_TOL = 1e-10
ISOMETRY_TOL = 1e-10
ANGLE_TOL = 1e-7
PROJECTION_TOL = 1e-8
IMAGE_GAP_TOL = 1e-7
INJECTIVITY_GAP = 1e-6
JACOBIAN_TOL = 1e-6
MATRIX_DIFFERENCE_TOL = 1e-6
CLASSIFY_TOL = 1e-6
SIGMA_TOL = 1e-6

# Sampling
DESCENT_SAMPLES = 2
W_PROBES = 50
SEMILINEAR_PROBES = 100
RESIDUAL_PROBES = 100
LOCAL_SEARCH_RESTARTS = 50
PCA_RADIUS = 1e-3
PCA_RATIO = 0.05
INTERVAL_PROBES = 50
MAX_WITNESSES = 5

# Paths
ROOT_PATH = pathlib.Path(__file__).resolve().parent.parent
CONFIG_FILE_PATH = ROOT_PATH / "config.yaml"
TRUTH_SUFFIX = ".truth.json"

# Environment
THREADS_ENV_VAR = "WIGNER_LAB_THREADS"

# Exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
