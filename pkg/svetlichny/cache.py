"""SQLite cache of random-state scan trials."""
import logging
from functools import lru_cache
from typing import Optional

from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from sqlalchemy_utils import create_database, database_exists
from tqdm import tqdm

from svetlichny import defaults
from svetlichny.constants import FULL_SPHERE
from svetlichny.defaults import DEFAULT_SCAN_MAX_ITERATIONS, DEFAULT_SCAN_RESTARTS, DEFAULT_SCAN_STEP_TOLERANCE, \
    DEFAULT_SEED
from svetlichny.exceptions import InputError
from svetlichny.models import Base, ScanTrial
from svetlichny.optimizer import ScanReport, scan_report, scan_space, scan_trial

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)


@lru_cache(maxsize=None)
def _engine(conn: str):
    if not database_exists(conn):
        create_database(conn)
    engine = create_engine(conn)
    Base.metadata.create_all(engine)
    return engine


def session(db_path: Optional[str] = None):
    """Open a session on the cache DB, creating the DB and its tables on first use."""
    conn = f"sqlite:///{db_path or defaults.db_path()}"
    return sessionmaker(bind=_engine(conn))()


def cached_random_state_scan(trials: int, seed: int = DEFAULT_SEED, restarts: int = DEFAULT_SCAN_RESTARTS,
                             max_iterations: int = DEFAULT_SCAN_MAX_ITERATIONS,
                             step_tolerance: float = DEFAULT_SCAN_STEP_TOLERANCE, kind: str = FULL_SPHERE,
                             db_path: Optional[str] = None, progress: bool = True) -> ScanReport:
    """Same result as ``optimizer.random_state_scan`` but only trials absent from the cache are computed.

    Trials are keyed by (seed, trial index, space, restarts, max_iterations, step_tolerance); a trial's result only
    depends on that key, so stored rows are reused verbatim.
    """
    if trials < 1:
        raise InputError(f"trials must be at least 1, got {trials}")

    space = scan_space(restarts, max_iterations, step_tolerance, kind)
    db = session(db_path)
    try:
        query = db.query(ScanTrial).filter_by(
            seed=str(seed), kind=kind, restarts=restarts, max_iterations=max_iterations, step_tolerance=step_tolerance
        ).filter(ScanTrial.trial_index < trials)
        rows = {trial.trial_index: trial.to_row() for trial in query}

        missing = [index for index in range(trials) if index not in rows]
        if missing:
            logger.warning(f"{len(missing)} of {trials} scan trials not cached for seed {seed}, computing them")

        for index in tqdm(missing, desc='Scanning random states', disable=not progress):
            row = scan_trial(index, seed, space)
            rows[index] = row
            db.add(ScanTrial(
                seed=str(seed),
                trial_index=index,
                kind=kind,
                restarts=restarts,
                max_iterations=max_iterations,
                step_tolerance=step_tolerance,
                best_value=row['best_value'],
                signed_value=row['signed_value'],
                anticommutator_bound=row['anticommutator_bound'],
                converged=row['converged'],
                angles=row['parameters'],
            ))
        db.commit()
    finally:
        db.close()

    return scan_report(rows.values())
