"""Tests for the `cache` module."""
import pandas as pd

from svetlichny.cache import cached_random_state_scan, session
from svetlichny.models import ScanTrial
from svetlichny.optimizer import random_state_scan

BUDGET = dict(restarts=1, max_iterations=5, step_tolerance=1e-4)


class TestScanCache:
    """Tests for the SQLite trial cache."""

    def test_matches_uncached_scan(self, tmp_path):
        """Test that cached and freshly computed scans agree row by row."""
        db_path = str(tmp_path / 'scan.db')
        cached = cached_random_state_scan(2, seed=11, db_path=db_path, progress=False, **BUDGET)
        fresh = random_state_scan(2, seed=11, progress=False, **BUDGET)
        pd.testing.assert_frame_equal(cached.trials, fresh.trials)
        assert cached.max_value == fresh.max_value

    def test_only_missing_trials_are_added(self, tmp_path):
        """Test that extending a scan reuses the stored trials."""
        db_path = str(tmp_path / 'scan.db')
        first = cached_random_state_scan(2, seed=4, db_path=db_path, progress=False, **BUDGET)
        extended = cached_random_state_scan(3, seed=4, db_path=db_path, progress=False, **BUDGET)
        pd.testing.assert_frame_equal(extended.trials.iloc[:2], first.trials)

        db = session(db_path)
        try:
            assert db.query(ScanTrial).filter_by(seed='4').count() == 3
        finally:
            db.close()

    def test_budget_is_part_of_the_key(self, tmp_path):
        """Test that a different search budget is stored separately."""
        db_path = str(tmp_path / 'scan.db')
        cached_random_state_scan(1, seed=4, db_path=db_path, progress=False, **BUDGET)
        cached_random_state_scan(1, seed=4, db_path=db_path, progress=False, restarts=2, max_iterations=5,
                                 step_tolerance=1e-4)

        db = session(db_path)
        try:
            assert db.query(ScanTrial).count() == 2
        finally:
            db.close()

    def test_large_seed(self, tmp_path):
        """Test that seeds beyond the signed 64-bit range round-trip."""
        seed = 2 ** 64 - 1
        report = cached_random_state_scan(1, seed=seed, db_path=str(tmp_path / 'scan.db'), progress=False, **BUDGET)
        assert report.bound_respected
