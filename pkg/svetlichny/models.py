"""Table definitions for SQLite DB."""

from sqlalchemy.orm import declarative_base
from sqlalchemy import Column, Integer, Float, BOOLEAN, VARCHAR, UniqueConstraint

Base = declarative_base()


class ScanTrial(Base):
    """One optimized random state of a scan, addressed by its search budget, seed and trial index."""

    __tablename__ = 'scan_trials'
    __table_args__ = (
        UniqueConstraint('seed', 'trial_index', 'kind', 'restarts', 'max_iterations', 'step_tolerance',
                         name='uq_scan_trial'),
    )
    id = Column(Integer, primary_key=True)

    seed = Column(VARCHAR(20), index=True)  # unsigned 64-bit, stored as text
    trial_index = Column(Integer, index=True)
    kind = Column(VARCHAR(32))
    restarts = Column(Integer)
    max_iterations = Column(Integer)
    step_tolerance = Column(Float)

    best_value = Column(Float)
    signed_value = Column(Float)
    anticommutator_bound = Column(Float)
    converged = Column(BOOLEAN)
    angles = Column(VARCHAR(1000))

    def to_row(self) -> dict:
        """Row in the format produced by optimizer.scan_trial."""
        return {
            'trial': self.trial_index,
            'best_value': self.best_value,
            'signed_value': self.signed_value,
            'anticommutator_bound': self.anticommutator_bound,
            'converged': bool(self.converged),
            'parameters': self.angles,
        }
