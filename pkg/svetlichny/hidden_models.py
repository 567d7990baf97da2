"""Deterministic hidden-variable strategies: the frustrated network, local and hybrid models, and the hybrid polytope.

Settings are numbered 0 (unprimed) and 1 (primed) per party. A hybrid model mixes three partition terms in which two
parties respond jointly (and may signal to each other) while the isolated party responds on its own setting only.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import linprog
from tqdm import tqdm

from svetlichny.constants import HIGHS, NORM_TOLERANCE, OUTCOME_VALUES, PARTITIONS, SETTING_NAMES, SIGN, SIMPLEX, \
    TERM_NAMES, TRIPLES
from svetlichny.defaults import DEFAULT_MEMBERSHIP_TOLERANCE, SIMPLEX_MAX_ITERATIONS
from svetlichny.exceptions import InputError, SolverError
from svetlichny.inequalities import CorrelationStats, CorrelatorTable
from svetlichny.quantum_core import OutcomeDistribution
from svetlichny.simplex import INFEASIBLE, OPTIMAL, TwoPhaseSimplex

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

PAIR_NAMES = ("AB", "AB'", "A'B", "A'B'")
OUTCOMES = np.array(OUTCOME_VALUES, dtype=float)


def _check_signs(values: Sequence[int], count: int, what: str) -> Tuple[int, ...]:
    values = tuple(int(v) for v in values)
    if len(values) != count or any(v not in (1, -1) for v in values):
        raise InputError(f"{what} needs {count} entries in {{+1, -1}}, got {values}")
    return values


def _check_weights(weights: Sequence[float], what: str) -> np.ndarray:
    weights = np.asarray(weights, dtype=float).reshape(-1)
    if weights.size == 0:
        raise InputError(f"{what} is empty")
    if np.any(weights < 0):
        raise InputError(f"{what} has negative weights")
    if abs(float(weights.sum()) - 1.0) > NORM_TOLERANCE:
        raise InputError(f"{what} sums to {float(weights.sum())!r}, not 1")
    return weights


def _outcome_index(value: int) -> int:
    return OUTCOME_VALUES.index(value)


####################
# Frustrated network
####################

@dataclass(frozen=True)
class NetworkAssignment:
    """A ±1 value for each composite vertex AB, AB', A'B, A'B' and each singleton vertex C, C'."""

    pair_outputs: Tuple[int, int, int, int]
    singleton_outputs: Tuple[int, int]

    def __post_init__(self):
        """Check every vertex carries ±1."""
        object.__setattr__(self, 'pair_outputs', _check_signs(self.pair_outputs, 4, "pair_outputs"))
        object.__setattr__(self, 'singleton_outputs', _check_signs(self.singleton_outputs, 2, "singleton_outputs"))

    def bond_product(self, triple: Tuple[int, int, int]) -> int:
        """Product of the two vertex values joined by the bond of ``triple``."""
        x, y, z = triple
        return self.pair_outputs[2 * x + y] * self.singleton_outputs[z]


@dataclass(frozen=True)
class NetworkSummary:
    """Extremes and histogram of satisfied bonds over every network assignment."""

    min_satisfied: int
    max_satisfied: int
    histogram: pd.Series

    @property
    def total(self) -> int:
        """Number of assignments counted."""
        return int(self.histogram.sum())


def bonds_satisfied(assignment: NetworkAssignment) -> int:
    """Count the network bonds satisfied by ``assignment``.

    A + term of the inequality is an anti-correlation bond (satisfied when the vertex values differ), a - term is a
    correlation bond (satisfied when they agree).
    """
    return sum(1 for triple in TRIPLES if SIGN[triple] * assignment.bond_product(triple) == -1)


def assignment_stats(assignment: NetworkAssignment) -> Dict[Tuple[int, int, int], CorrelationStats]:
    """Degenerate correlation statistics induced by a deterministic assignment."""
    stats = {}
    for triple in TRIPLES:
        correlated = assignment.bond_product(triple) == 1
        stats[triple] = CorrelationStats(
            p_correlated=1.0 if correlated else 0.0,
            p_anticorrelated=0.0 if correlated else 1.0,
            correlator=1.0 if correlated else -1.0,
        )
    return stats


def network_assignments() -> List[NetworkAssignment]:
    """All 64 assignments, pair vertices varying slowest."""
    return [NetworkAssignment(values[:4], values[4:]) for values in itertools.product(OUTCOME_VALUES, repeat=6)]


def enumerate_network_assignments() -> NetworkSummary:
    """Count satisfied bonds for all 64 assignments."""
    counts = [bonds_satisfied(assignment) for assignment in network_assignments()]
    histogram = pd.Series(counts).value_counts().reindex(range(len(TRIPLES) + 1), fill_value=0)
    histogram.index.name = 'bonds_satisfied'
    histogram.name = 'assignments'
    logger.info(f"Network enumeration: {len(counts)} assignments, bonds in [{min(counts)}, {max(counts)}]")
    return NetworkSummary(min_satisfied=min(counts), max_satisfied=max(counts), histogram=histogram)


def network_frame() -> pd.DataFrame:
    """One row per assignment with its vertex values and satisfied-bond count."""
    rows = [assignment.pair_outputs + assignment.singleton_outputs + (bonds_satisfied(assignment),)
            for assignment in network_assignments()]
    return pd.DataFrame(rows, columns=list(PAIR_NAMES) + ["C", "C'", 'bonds_satisfied'])


####################
# Probability tables
####################

@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    """Full behaviour P(a, b, c | x, y, z), indexed [x, y, z, a, b, c] with outcome index 0 <-> +1."""

    probabilities: np.ndarray
    labels: Tuple[str, ...] = SETTING_NAMES

    def __post_init__(self):
        """Check every setting triple carries a normalized distribution."""
        probabilities = np.asarray(self.probabilities, dtype=float).reshape((2,) * 6)
        if np.any(probabilities < -NORM_TOLERANCE):
            raise InputError("Probability table has negative entries")
        totals = probabilities.sum(axis=(3, 4, 5))
        if np.any(np.abs(totals - 1.0) > NORM_TOLERANCE):
            raise InputError(f"Probability table is not normalized per setting triple: {totals.reshape(-1)}")
        if len(self.labels) != len(SETTING_NAMES):
            raise InputError(f"Expected {len(SETTING_NAMES)} setting labels, got {len(self.labels)}")

        probabilities.setflags(write=False)
        object.__setattr__(self, 'probabilities', probabilities)
        object.__setattr__(self, 'labels', tuple(self.labels))

    def distribution(self, triple: Tuple[int, int, int]) -> OutcomeDistribution:
        """Outcome distribution for one setting triple."""
        return OutcomeDistribution(np.clip(self.probabilities[tuple(triple)], 0.0, None))

    def distributions(self) -> Dict[Tuple[int, int, int], OutcomeDistribution]:
        """Outcome distributions of all eight setting triples."""
        return {triple: self.distribution(triple) for triple in TRIPLES}

    def correlators(self) -> CorrelatorTable:
        """Full correlators Σ abc P(a, b, c | x, y, z)."""
        return CorrelatorTable(np.einsum('xyzabc,a,b,c->xyz', self.probabilities, OUTCOMES, OUTCOMES, OUTCOMES))

    def to_frame(self) -> pd.DataFrame:
        """Long table with one row per (setting triple, outcome triple)."""
        rows = []
        for triple, name in zip(TRIPLES, TERM_NAMES):
            for (a, b, c), probability in self.distribution(triple).outcomes():
                rows.append((name, a, b, c, probability))
        return pd.DataFrame(rows, columns=['triple', 'outcome_a', 'outcome_b', 'outcome_c', 'probability'])


def _mix(tables: Sequence[np.ndarray], weights: Sequence[float]) -> np.ndarray:
    return np.tensordot(np.asarray(weights, dtype=float), np.stack(tables), axes=1)


###############
# Local models
###############

@dataclass(frozen=True)
class LocalStrategy:
    """Deterministic fully local responses, one ±1 value per setting in the order A, A', B, B', C, C'."""

    outputs: Tuple[int, int, int, int, int, int]

    def __post_init__(self):
        """Check every response is ±1."""
        object.__setattr__(self, 'outputs', _check_signs(self.outputs, 6, "LocalStrategy outputs"))

    def response(self, party: int, slot: int) -> int:
        """Output of ``party`` on setting ``slot``."""
        return self.outputs[2 * party + slot]

    def table(self) -> np.ndarray:
        """Deterministic probability array of shape (2,) * 6."""
        probabilities = np.zeros((2,) * 6)
        for x, y, z in itertools.product((0, 1), repeat=3):
            outcome = (self.response(0, x), self.response(1, y), self.response(2, z))
            probabilities[(x, y, z) + tuple(_outcome_index(v) for v in outcome)] = 1.0
        return probabilities


def local_strategies() -> List[LocalStrategy]:
    """All 64 deterministic local strategies."""
    return [LocalStrategy(outputs) for outputs in itertools.product(OUTCOME_VALUES, repeat=6)]


def simulate_local_model(strategies: Sequence[Tuple[LocalStrategy, float]],
                         labels: Sequence[str] = SETTING_NAMES) -> ProbabilityTable:
    """Mix deterministic local strategies into a full probability table.

    Parameters
    ----------
    strategies : Sequence[Tuple[LocalStrategy, float]]
        Pairs of (strategy, weight); the weights play the role of the hidden-variable density.
    labels : Sequence[str]
        Setting labels carried on the resulting table.

    Raises
    ------
    InputError
        If the weights are negative or do not sum to 1.
    """
    strategies = list(strategies)
    weights = _check_weights([weight for _, weight in strategies], "Local strategy mixture")
    return ProbabilityTable(_mix([strategy.table() for strategy, _ in strategies], weights), tuple(labels))


################
# Hybrid models
################

@dataclass(frozen=True)
class BipartitionStrategy:
    """Deterministic strategy of one partition term.

    ``pair_outputs`` holds the product of the two pair outcomes for each joint pair setting, indexed
    ``2 * s_first + s_second`` in party order. The first pair party outputs ``leader_outputs`` for that joint setting
    and the second outputs leader times product. ``singleton_outputs`` are the isolated party's responses to its own
    two settings.
    """

    partition: str
    pair_outputs: Tuple[int, int, int, int]
    singleton_outputs: Tuple[int, int]
    leader_outputs: Tuple[int, int, int, int] = (1, 1, 1, 1)

    def __post_init__(self):
        """Check the partition name and that every response is ±1."""
        if self.partition not in PARTITIONS:
            raise InputError(f"Unknown partition '{self.partition}'; expected one of {', '.join(PARTITIONS)}")
        object.__setattr__(self, 'pair_outputs', _check_signs(self.pair_outputs, 4, "pair_outputs"))
        object.__setattr__(self, 'singleton_outputs', _check_signs(self.singleton_outputs, 2, "singleton_outputs"))
        object.__setattr__(self, 'leader_outputs', _check_signs(self.leader_outputs, 4, "leader_outputs"))

    def outcomes(self, triple: Tuple[int, int, int]) -> Tuple[int, int, int]:
        """Outcomes (a, b, c) for setting triple (x, y, z)."""
        (first, second), isolated = PARTITIONS[self.partition]
        joint = 2 * triple[first] + triple[second]
        outcome = [0, 0, 0]
        outcome[first] = self.leader_outputs[joint]
        outcome[second] = self.leader_outputs[joint] * self.pair_outputs[joint]
        outcome[isolated] = self.singleton_outputs[triple[isolated]]
        return outcome[0], outcome[1], outcome[2]

    def correlators(self) -> CorrelatorTable:
        """Correlator table: pair product times singleton output."""
        values = np.zeros((2, 2, 2))
        for triple in TRIPLES:
            a, b, c = self.outcomes(triple)
            values[triple] = a * b * c
        return CorrelatorTable(values)

    def table(self) -> np.ndarray:
        """Deterministic probability array of shape (2,) * 6."""
        probabilities = np.zeros((2,) * 6)
        for triple in itertools.product((0, 1), repeat=3):
            probabilities[triple + tuple(_outcome_index(v) for v in self.outcomes(triple))] = 1.0
        return probabilities


def bipartition_strategies(partition: str) -> List[BipartitionStrategy]:
    """All 64 deterministic strategies of one partition (16 pair products times 4 singleton responses)."""
    return [BipartitionStrategy(partition, values[:4], values[4:])
            for values in itertools.product(OUTCOME_VALUES, repeat=6)]


@dataclass(frozen=True)
class HybridModel:
    """Partition weights (q12, q23, q13) with a finite strategy mixture per partition."""

    weights: Tuple[float, float, float]
    strategy_mixtures: Mapping[str, Sequence[Tuple[BipartitionStrategy, float]]] = field(default_factory=dict)

    def __post_init__(self):
        """Validate the partition weights and every mixture with positive weight."""
        weights = _check_weights(self.weights, "Partition weights")
        if weights.size != len(PARTITIONS):
            raise InputError(f"Expected weights (q12, q23, q13), got {tuple(weights)}")
        object.__setattr__(self, 'weights', tuple(float(q) for q in weights))

        for name in self.strategy_mixtures:
            if name not in PARTITIONS:
                raise InputError(f"Unknown partition '{name}'")

        for name, q in zip(PARTITIONS, self.weights):
            mixture = self.strategy_mixtures.get(name, ())
            if q == 0.0 and not mixture:
                continue
            _check_weights([weight for _, weight in mixture], f"Strategy mixture of {name}")
            for strategy, _ in mixture:
                if strategy.partition != name:
                    raise InputError(f"Strategy of partition {strategy.partition} listed under {name}")


def partition_tables(model: HybridModel) -> Dict[str, ProbabilityTable]:
    """Unweighted probability table of every partition term with positive weight."""
    tables = {}
    for name, q in zip(PARTITIONS, model.weights):
        mixture = model.strategy_mixtures.get(name, ())
        if q > 0.0:
            tables[name] = ProbabilityTable(_mix([s.table() for s, _ in mixture], [w for _, w in mixture]))
    return tables


def simulate_hybrid_model(model: HybridModel) -> ProbabilityTable:
    """The q-weighted mixture of the three partition terms."""
    tables = partition_tables(model)
    weights = [q for name, q in zip(PARTITIONS, model.weights) if name in tables]
    return ProbabilityTable(_mix([table.probabilities for table in tables.values()], weights))


def isolated_party_marginals(table: ProbabilityTable, partition: str) -> np.ndarray:
    """P(isolated outcome | x, y, z) as an array [x, y, z, outcome]."""
    if partition not in PARTITIONS:
        raise InputError(f"Unknown partition '{partition}'")
    _, isolated = PARTITIONS[partition]
    summed = tuple(3 + party for party in range(3) if party != isolated)
    return table.probabilities.sum(axis=summed)


def is_no_signaling_to_isolated(table: ProbabilityTable, partition: str, tolerance: float = NORM_TOLERANCE) -> bool:
    """Whether the isolated party's marginals ignore the pair's settings."""
    (first, second), isolated = PARTITIONS[partition]
    marginals = isolated_party_marginals(table, partition)
    reference = marginals.take([0], axis=first).take([0], axis=second)
    return bool(np.all(np.abs(marginals - reference) <= tolerance))


def random_hybrid_model(rng: np.random.Generator, support: int = 3) -> HybridModel:
    """Draw Dirichlet partition weights and ``support`` random strategies per partition."""
    if support < 1:
        raise InputError("support must be at least 1")
    weights = rng.dirichlet(np.ones(len(PARTITIONS)))
    mixtures = {}
    for name in PARTITIONS:
        strategies = bipartition_strategies(name)
        chosen = rng.choice(len(strategies), size=support, replace=False)
        leaders = rng.choice(OUTCOME_VALUES, size=(support, 4))
        mixture_weights = rng.dirichlet(np.ones(support))
        mixtures[name] = [
            (BipartitionStrategy(name, strategies[i].pair_outputs, strategies[i].singleton_outputs, tuple(leader)),
             float(w))
            for i, leader, w in zip(chosen, leaders, mixture_weights)
        ]
    # Dirichlet draws sum to 1 only up to rounding
    weights = weights / weights.sum()
    return HybridModel(tuple(weights), mixtures)


##########
# Polytope
##########

@dataclass(frozen=True)
class MembershipVerdict:
    """Result of testing a correlator table against the hybrid polytope."""

    inside: bool
    weights: Optional[np.ndarray]
    violation_margin: float
    method: str = SIMPLEX
    used_fallback: bool = False


def svetlichny_polytope_vertices(deduplicate: bool = True) -> List[CorrelatorTable]:
    """Correlator tables of every deterministic strategy of every partition.

    Parameters
    ----------
    deduplicate : bool
        Drop exact duplicates (entries are ±1), keeping first occurrences in partition order.
    """
    vertices = []
    seen = set()
    for name in PARTITIONS:
        for strategy in bipartition_strategies(name):
            table = strategy.correlators()
            key = table.terms()
            if deduplicate and key in seen:
                continue
            seen.add(key)
            vertices.append(table)

    logger.info(f"Generated {len(vertices)} polytope vertices (deduplicate={deduplicate})")
    return vertices


def _vertex_matrix(vertices: Sequence[CorrelatorTable]) -> np.ndarray:
    """Matrix of shape (8, k) whose columns are the vertex terms."""
    return np.array([vertex.terms() for vertex in vertices]).T


def _margin_simplex(matrix: np.ndarray, target: np.ndarray, solver: TwoPhaseSimplex) -> Tuple[float, np.ndarray]:
    """Minimize the max-norm distance s from the hull: columns are [w, s, p, q] in standard form."""
    entries, k = matrix.shape
    eye = np.eye(entries)
    upper = np.hstack([matrix, -np.ones((entries, 1)), eye, np.zeros((entries, entries))])
    lower = np.hstack([matrix, np.ones((entries, 1)), np.zeros((entries, entries)), -eye])
    total = np.hstack([np.ones((1, k)), np.zeros((1, 1 + 2 * entries))])
    a_eq = np.vstack([upper, lower, total])
    b_eq = np.concatenate([target, target, [1.0]])
    c = np.zeros(a_eq.shape[1])
    c[k] = 1.0

    result = solver.solve(c, a_eq, b_eq)
    if result.status != OPTIMAL:
        raise SolverError(f"Max-norm margin program ended with status '{result.status}'")
    return float(result.objective), result.x[:k]


def _margin_highs(matrix: np.ndarray, target: np.ndarray) -> Tuple[float, np.ndarray]:
    entries, k = matrix.shape
    a_ub = np.vstack([np.hstack([matrix, -np.ones((entries, 1))]), np.hstack([-matrix, -np.ones((entries, 1))])])
    b_ub = np.concatenate([target, -target])
    a_eq = np.hstack([np.ones((1, k)), np.zeros((1, 1))])
    c = np.zeros(k + 1)
    c[k] = 1.0

    lp = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=(0, None), method='highs')
    if lp.status != 0:
        raise SolverError(f"HiGHS margin program failed: {lp.message}")
    return float(lp.fun), lp.x[:k]


def polytope_membership(target: CorrelatorTable, tolerance: float = DEFAULT_MEMBERSHIP_TOLERANCE,
                        method: str = SIMPLEX, vertices: Optional[Sequence[CorrelatorTable]] = None,
                        max_iterations: int = SIMPLEX_MAX_ITERATIONS) -> MembershipVerdict:
    """Decide whether ``target`` is a convex combination of hybrid-polytope vertices.

    A feasibility program (nonnegative weights summing to 1 that reproduce all eight entries) is solved first. When
    it fails, the max-norm distance to the hull is minimized; a distance within ``tolerance`` still counts as inside.

    Parameters
    ----------
    target : CorrelatorTable
        Table to classify.
    tolerance : float
        Per-entry reconstruction tolerance, in [1e-12, 1e-6].
    method : str
        "simplex" for the built-in two-phase simplex, "highs" for scipy's HiGHS.
    vertices : Optional[Sequence[CorrelatorTable]]
        Vertex set; defaults to the deduplicated hybrid polytope.
    max_iterations : int
        Pivot cap of the built-in simplex.

    Returns
    -------
    MembershipVerdict

    Raises
    ------
    InputError
        If the tolerance or method is not supported.
    SolverError
        If the program does not terminate.
    """
    if not 1e-12 <= tolerance <= 1e-6:
        raise InputError(f"Membership tolerance must lie in [1e-12, 1e-6], got {tolerance!r}")
    if method not in (SIMPLEX, HIGHS):
        raise InputError(f"Unknown membership method '{method}'; expected '{SIMPLEX}' or '{HIGHS}'")

    vertices = list(vertices) if vertices is not None else svetlichny_polytope_vertices()
    matrix = _vertex_matrix(vertices)
    point = np.array(target.terms())
    a_eq = np.vstack([matrix, np.ones((1, matrix.shape[1]))])
    b_eq = np.concatenate([point, [1.0]])

    weights = None
    if method == SIMPLEX:
        solver = TwoPhaseSimplex(max_iterations=max_iterations, feasibility_tolerance=tolerance)
        result = solver.solve(np.zeros(matrix.shape[1]), a_eq, b_eq)
        if result.status != INFEASIBLE:
            weights = result.x
    else:
        lp = linprog(np.zeros(matrix.shape[1]), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method='highs')
        if lp.status == 0:
            weights = lp.x
        elif lp.status != 2:
            raise SolverError(f"HiGHS feasibility program failed: {lp.message}")

    if weights is not None:
        error = float(np.max(np.abs(matrix @ weights - point)))
        if error <= tolerance:
            logger.debug(f"Target inside the polytope, reconstruction error {error:.3e}")
            return MembershipVerdict(inside=True, weights=weights, violation_margin=0.0, method=method)

    if method == SIMPLEX:
        margin, margin_weights = _margin_simplex(matrix, point, solver)
    else:
        margin, margin_weights = _margin_highs(matrix, point)

    if margin <= tolerance:
        logger.warning(f"Membership decided through the max-norm fallback (margin {margin:.3e})")
        return MembershipVerdict(inside=True, weights=margin_weights, violation_margin=0.0, method=method,
                                 used_fallback=True)

    logger.info(f"Target outside the polytope by {margin:.6g} in max-norm")
    return MembershipVerdict(inside=False, weights=None, violation_margin=margin, method=method)


def random_vertex_mixtures(count: int, rng: np.random.Generator, support: int = 4,
                           vertices: Optional[Sequence[CorrelatorTable]] = None) -> List[CorrelatorTable]:
    """Random convex combinations of ``support`` distinct vertices with Dirichlet weights."""
    vertices = list(vertices) if vertices is not None else svetlichny_polytope_vertices()
    matrix = _vertex_matrix(vertices)
    mixtures = []
    for _ in tqdm(range(count), desc='Drawing vertex mixtures', disable=count < 100):
        chosen = rng.choice(len(vertices), size=min(support, len(vertices)), replace=False)
        weights = rng.dirichlet(np.ones(chosen.size))
        mixtures.append(CorrelatorTable.from_terms(matrix[:, chosen] @ weights))
    return mixtures
