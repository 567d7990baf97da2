"""Svetlichny's inequality in correlator form and in correlation-probability (frustrated network) form."""
import logging
from dataclasses import dataclass
from typing import Dict, Mapping, Sequence, Tuple

import numpy as np
import pandas as pd

from svetlichny.constants import CLASSICAL_BOUND, BOUND_SLACK, IDENTITY, NORM_TOLERANCE, QUANTUM_BOUND, SIGN, \
    TERM_NAMES, TERM_SIGNS, TRIPLES
from svetlichny.exceptions import InputError
from svetlichny.quantum_core import Observable, OutcomeDistribution, Scenario, StateVector, \
    correlation_tensor, outcome_distribution, real_part

logger = logging.getLogger(__name__)

Triple = Tuple[int, int, int]


@dataclass(frozen=True, eq=False)
class CorrelatorTable:
    """The eight full correlators E(X_x Y_y Z_z), stored as values[x, y, z] with 0 unprimed and 1 primed."""

    values: np.ndarray

    def __post_init__(self):
        """Check shape and that every entry is a valid correlator."""
        values = np.array(self.values, dtype=float).reshape(2, 2, 2)
        if np.any(np.abs(values) > 1.0 + NORM_TOLERANCE):
            raise InputError(f"Correlators must lie in [-1, 1], got {values.reshape(-1)}")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @classmethod
    def from_terms(cls, terms: Sequence[float]) -> 'CorrelatorTable':
        """Build a table from eight values in the order ABC, ABC', A'BC, A'BC', AB'C, AB'C', A'B'C, A'B'C'."""
        if len(terms) != len(TRIPLES):
            raise InputError(f"A correlator table has {len(TRIPLES)} entries, got {len(terms)}")
        values = np.zeros((2, 2, 2))
        for triple, term in zip(TRIPLES, terms):
            values[triple] = term
        return cls(values)

    def __getitem__(self, triple: Triple) -> float:
        return float(self.values[tuple(triple)])

    def terms(self) -> Tuple[float, ...]:
        """Entries in the order the inequality lists its terms."""
        return tuple(float(self.values[triple]) for triple in TRIPLES)

    def to_frame(self) -> pd.DataFrame:
        """Tabulate the correlators with their term names and signs."""
        return pd.DataFrame({'term': TERM_NAMES, 'sign': TERM_SIGNS, 'correlator': self.terms()})

    def __repr__(self):
        return "CorrelatorTable(" + ", ".join(f"{name}={value:.6g}" for name, value in
                                              zip(TERM_NAMES, self.terms())) + ")"


@dataclass(frozen=True)
class CorrelationStats:
    """Probabilities that the three outcomes are correlated (a = bc) or anti-correlated (a = -bc)."""

    p_correlated: float
    p_anticorrelated: float
    correlator: float

    def __post_init__(self):
        """Check E = 2 Pc - 1 = 1 - 2 Pa."""
        if abs(self.p_correlated + self.p_anticorrelated - 1.0) > NORM_TOLERANCE:
            raise InputError("Correlation and anti-correlation probabilities must sum to 1")
        if abs(self.correlator - (2 * self.p_correlated - 1)) > NORM_TOLERANCE or \
                abs(self.correlator - (1 - 2 * self.p_anticorrelated)) > NORM_TOLERANCE:
            raise InputError("Correlator is inconsistent with the correlation probabilities")


@dataclass(frozen=True)
class SvetlichnyReport:
    """Value of the Svetlichny expression with its probability form and the two bounds."""

    signed_value: float
    absolute_value: float
    s_probability_form: float
    classical_bound: float = CLASSICAL_BOUND
    quantum_bound: float = QUANTUM_BOUND

    @property
    def violates_hybrid_bound(self) -> bool:
        """Whether |Sv| exceeds the bound obeyed by every hybrid local/two-particle-nonlocal model."""
        return self.absolute_value > self.classical_bound + BOUND_SLACK

    @property
    def identity_holds(self) -> bool:
        """Whether Sv = 8 - 2S holds to 1e-12."""
        return abs(self.signed_value - (8.0 - 2.0 * self.s_probability_form)) <= NORM_TOLERANCE


def correlator_table(state: StateVector, scenario: Scenario) -> CorrelatorTable:
    """Evaluate the eight correlators of ``state`` under ``scenario``."""
    return CorrelatorTable(correlation_tensor(state, *scenario.observable_stacks()))


def scenario_distributions(state: StateVector, scenario: Scenario) -> Dict[Triple, OutcomeDistribution]:
    """Born-rule outcome distributions for all eight setting triples."""
    return {triple: outcome_distribution(state, scenario.triple(*triple)) for triple in TRIPLES}


def correlation_stats(dist: OutcomeDistribution) -> CorrelationStats:
    """Split an outcome distribution into correlation and anti-correlation probabilities."""
    p_correlated = 0.0
    p_anticorrelated = 0.0
    for (a, b, c), probability in dist.outcomes():
        if a == b * c:
            p_correlated += probability
        else:
            p_anticorrelated += probability

    # Renormalize away rounding so that E = 2Pc - 1 = 1 - 2Pa holds exactly
    total = p_correlated + p_anticorrelated
    p_correlated, p_anticorrelated = p_correlated / total, p_anticorrelated / total
    return CorrelationStats(p_correlated, p_anticorrelated, p_correlated - p_anticorrelated)


def stats_from_distributions(dists: Mapping[Triple, OutcomeDistribution]) -> Dict[Triple, CorrelationStats]:
    """Correlation statistics for every triple of a distribution map."""
    return {tuple(triple): correlation_stats(dist) for triple, dist in dists.items()}


def correlator_table_from_distributions(dists: Mapping[Triple, OutcomeDistribution]) -> CorrelatorTable:
    """Build the correlator table as Σ abc P(a, b, c) from the given distributions."""
    missing = [triple for triple in TRIPLES if triple not in dists]
    if missing:
        raise InputError(f"Missing outcome distributions for setting triples {missing}")
    values = np.zeros((2, 2, 2))
    for triple in TRIPLES:
        values[triple] = correlation_stats(dists[triple]).correlator
    return CorrelatorTable(values)


def eval_svetlichny(table: CorrelatorTable) -> SvetlichnyReport:
    """Evaluate Sv = E(ABC) + E(ABC') + E(A'BC) - E(A'BC') + E(AB'C) - E(AB'C') - E(A'B'C) - E(A'B'C')."""
    signed_value = float(np.sum(SIGN * table.values))
    # Anti-correlation probability for the + terms, correlation probability for the - terms
    s_value = float(sum((1.0 - sign * table[triple]) / 2.0 for triple, sign in zip(TRIPLES, TERM_SIGNS)))
    return SvetlichnyReport(signed_value=signed_value, absolute_value=abs(signed_value), s_probability_form=s_value)


def eval_s_probability_form(stats: Mapping[Triple, CorrelationStats]) -> float:
    """Evaluate the network sum S of correlation/anti-correlation probabilities.

    Terms carrying a + sign in Sv contribute their anti-correlation probability, terms carrying a - sign their
    correlation probability, so that Sv = 8 - 2S.

    Raises
    ------
    InputError
        If the statistics of any of the eight setting triples are missing.
    """
    missing = [name for triple, name in zip(TRIPLES, TERM_NAMES) if triple not in stats]
    if missing:
        raise InputError(f"Missing correlation statistics for {', '.join(missing)}")

    total = 0.0
    for triple, sign in zip(TRIPLES, TERM_SIGNS):
        term_stats = stats[triple]
        total += term_stats.p_anticorrelated if sign > 0 else term_stats.p_correlated

    return total


def ghz_xy_correlator(alpha: float, beta: float, gamma: float) -> float:
    """Closed-form GHZ correlator -cos(α + β - γ) for xy-plane settings."""
    return float(-np.cos(alpha + beta - gamma))


def anticommutator_bound(state: StateVector, c: Observable, c_prime: Observable) -> float:
    """Upper bound 2√(2+x) + 2√(2-x) on |Sv|, with x = ⟨ψ|CC' + C'C|ψ⟩ acting on party 3."""
    anticommutator = c.matrix @ c_prime.matrix + c_prime.matrix @ c.matrix
    stacks = (IDENTITY[np.newaxis], IDENTITY[np.newaxis], anticommutator[np.newaxis])
    x = float(correlation_tensor(state, *stacks)[0, 0, 0])
    x = min(max(x, -2.0), 2.0)
    return float(2.0 * np.sqrt(2.0 + x) + 2.0 * np.sqrt(2.0 - x))


def svetlichny_operator(scenario: Scenario) -> np.ndarray:
    """Return the 8x8 Hermitian operator whose expectation on any state is the signed Svetlichny value."""
    stack_a, stack_b, stack_c = scenario.observable_stacks()
    operator = np.zeros((8, 8), dtype=complex)
    for (x, y, z), sign in zip(TRIPLES, TERM_SIGNS):
        operator += sign * np.kron(np.kron(stack_a[x], stack_b[y]), stack_c[z])
    return operator


def max_state_violation(scenario: Scenario) -> float:
    """Largest |Sv| any pure state reaches for fixed settings: the spectral radius of the Svetlichny operator."""
    eigenvalues = np.linalg.eigvalsh(svetlichny_operator(scenario))
    return float(np.max(np.abs(real_part(eigenvalues, what="Svetlichny operator spectrum"))))
