"""Default settings."""

import os
import logging
from pathlib import Path

logger = logging.getLogger(__name__)

# Default Directory Paths
HOME = str(Path.home())
PROJECT_DIR = os.path.join(HOME, ".svetlichny")
LOG_DIR = os.path.join(PROJECT_DIR, "logs")

os.makedirs(LOG_DIR, exist_ok=True)

# Logging Configuration
LOG_FILE_PATH = os.path.join(LOG_DIR, "svetlichny.log")
logging.basicConfig(filename=LOG_FILE_PATH,
                    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s')

# SQLite scan cache
DEFAULT_DB_PATH = os.path.join(PROJECT_DIR, "svetlichny.db")
DB_PATH_ENV = 'SVT_DB_PATH'

# Optimizer
DEFAULT_SEEDS = 32
DEFAULT_MAX_ITERATIONS = 200
DEFAULT_STEP_TOLERANCE = 1e-8
DEFAULT_SEED = 0
GRID_POINTS = 16  # coarse bracketing grid per coordinate before golden-section refinement
MAX_MENU_SIZE = 16

# Random-state scans
DEFAULT_SCAN_TRIALS = 1000
DEFAULT_SCAN_RESTARTS = 2
DEFAULT_SCAN_MAX_ITERATIONS = 30
DEFAULT_SCAN_STEP_TOLERANCE = 1e-6

# Polytope
DEFAULT_MEMBERSHIP_TOLERANCE = 1e-9
SIMPLEX_MAX_ITERATIONS = 5000

# Sampler
DEFAULT_SHOTS = 10_000


def db_path() -> str:
    """Return the scan cache location, honouring the SVT_DB_PATH environment variable."""
    conn_env = os.getenv(DB_PATH_ENV)
    return conn_env if conn_env else DEFAULT_DB_PATH
