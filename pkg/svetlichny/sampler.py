"""Finite-shot simulation of the eight measurement runs of a Svetlichny experiment.

Every setting triple draws from its own Philox stream: the generator key is the plan seed and the triple's position
in the term order occupies the top word of the 256-bit counter. Outcomes are chosen by inverse CDF over the eight
outcome triples in fixed index order (+1 before -1 per party), so records are bit-reproducible regardless of the
order in which triples are sampled.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import pandas as pd
from scipy.stats import norm

from svetlichny.constants import CLASSICAL_BOUND, OUTCOME_VALUES, TERM_NAMES, TERM_SIGNS, TRIPLES
from svetlichny.defaults import DEFAULT_SEED, DEFAULT_SHOTS
from svetlichny.exceptions import InputError
from svetlichny.quantum_core import Scenario, StateVector, outcome_distribution

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

CSV_COLUMNS = ['triple', 'a_setting', 'b_setting', 'c_setting', 'outcome_a', 'outcome_b', 'outcome_c', 'count']


@dataclass(frozen=True)
class ShotPlan:
    """Scenario to measure, shots per setting triple and the 64-bit seed."""

    scenario: Scenario
    shots_per_triple: int = DEFAULT_SHOTS
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        """Check the shot count and seed range."""
        if int(self.shots_per_triple) < 1:
            raise InputError(f"shots_per_triple must be at least 1, got {self.shots_per_triple}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise InputError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


@dataclass(frozen=True, eq=False)
class SampleRecord:
    """Outcome counts, indexed [triple position, a, b, c], with the setting labels of each triple."""

    counts: np.ndarray
    labels: Tuple[Tuple[str, str, str], ...]
    shots_per_triple: int

    def __post_init__(self):
        """Check counts are nonnegative and sum to the shot count per triple."""
        counts = np.asarray(self.counts, dtype=np.int64).reshape(len(TRIPLES), 2, 2, 2)
        if np.any(counts < 0):
            raise InputError("Outcome counts must be nonnegative")
        totals = counts.sum(axis=(1, 2, 3))
        if np.any(totals != self.shots_per_triple):
            raise InputError(f"Counts per triple {totals.tolist()} do not match {self.shots_per_triple} shots")
        if len(self.labels) != len(TRIPLES):
            raise InputError(f"Expected setting labels for {len(TRIPLES)} triples, got {len(self.labels)}")

        counts.setflags(write=False)
        object.__setattr__(self, 'counts', counts)
        object.__setattr__(self, 'labels', tuple(tuple(labels) for labels in self.labels))

    def to_frame(self) -> pd.DataFrame:
        """One row per (triple, outcome) with a nonzero count."""
        rows = []
        for position, name in enumerate(TERM_NAMES):
            for index in np.ndindex(2, 2, 2):
                count = int(self.counts[(position,) + index])
                if count:
                    rows.append((name, *self.labels[position], *(OUTCOME_VALUES[i] for i in index), count))
        return pd.DataFrame(rows, columns=CSV_COLUMNS)

    def write_csv(self, path: str):
        """Write the record as CSV."""
        self.to_frame().to_csv(path, index=False, lineterminator='\n')


@dataclass(frozen=True)
class EstimateReport:
    """Correlator estimates and the statistical significance of |Sv| > 4."""

    correlator_estimates: Tuple[float, ...]
    standard_errors: Tuple[float, ...]
    sv_estimate: float
    sv_standard_error: float
    sigma_above_4: float
    p_value: float

    def to_frame(self) -> pd.DataFrame:
        """Per-term estimates in the order the inequality lists its terms."""
        return pd.DataFrame({
            'term': TERM_NAMES,
            'sign': TERM_SIGNS,
            'correlator': self.correlator_estimates,
            'standard_error': self.standard_errors,
        })


def triple_stream(seed: int, position: int) -> np.random.Generator:
    """Philox generator for the setting triple at ``position``."""
    return np.random.Generator(np.random.Philox(key=int(seed), counter=[0, 0, 0, position]))


def sample_outcomes(state: StateVector, plan: ShotPlan) -> SampleRecord:
    """Draw ``plan.shots_per_triple`` outcomes from the Born-rule distribution of every setting triple."""
    shots = int(plan.shots_per_triple)
    counts = np.zeros((len(TRIPLES), 8), dtype=np.int64)
    labels = []

    for position, triple in enumerate(TRIPLES):
        settings = plan.scenario.triple(*triple)
        labels.append(tuple(setting.label for setting in settings))

        cdf = np.cumsum(outcome_distribution(state, settings).probabilities.reshape(-1))
        cdf[-1] = 1.0
        draws = triple_stream(plan.seed, position).random(shots)
        outcomes = np.minimum(np.searchsorted(cdf, draws, side='right'), 7)
        counts[position] = np.bincount(outcomes, minlength=8)

    logger.info(f"Sampled {shots} shots for each of {len(TRIPLES)} setting triples (seed {plan.seed})")
    return SampleRecord(counts.reshape(len(TRIPLES), 2, 2, 2), tuple(labels), shots)


def estimate(record: SampleRecord) -> EstimateReport:
    """Estimate every correlator as (N_corr - N_anti) / N with binomial standard error sqrt((1 - E²) / N).

    Raises
    ------
    InputError
        If a triple has no shots.
    """
    parity = np.einsum('a,b,c->abc', *(np.array(OUTCOME_VALUES, dtype=float),) * 3)
    correlators, errors = [], []
    for position in range(len(TRIPLES)):
        counts = record.counts[position]
        total = int(counts.sum())
        if total == 0:
            raise InputError(f"No shots recorded for {TERM_NAMES[position]}")
        correlator = float(np.sum(parity * counts)) / total
        correlators.append(correlator)
        errors.append(float(np.sqrt(max(0.0, 1.0 - correlator ** 2) / total)))

    sv = float(np.dot(TERM_SIGNS, correlators))
    sv_error = float(np.sqrt(np.sum(np.square(errors))))
    excess = abs(sv) - CLASSICAL_BOUND
    if sv_error > 0:
        sigma = excess / sv_error
    else:
        sigma = float(np.sign(excess)) * np.inf if excess else 0.0

    return EstimateReport(
        correlator_estimates=tuple(correlators),
        standard_errors=tuple(errors),
        sv_estimate=sv,
        sv_standard_error=sv_error,
        sigma_above_4=float(sigma),
        p_value=float(norm.sf(sigma)),
    )
