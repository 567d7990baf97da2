"""Tests for the `hidden_models` module."""
import numpy as np
import pytest

from svetlichny.constants import CLASSICAL_BOUND, HIGHS, POLYTOPE_RAW_VERTEX_COUNT, POLYTOPE_VERTEX_COUNT, \
    PARTITIONS, SIMPLEX
from svetlichny.exceptions import InputError, SolverError
from svetlichny.hidden_models import BipartitionStrategy, HybridModel, LocalStrategy, NetworkAssignment, \
    assignment_stats, bipartition_strategies, bonds_satisfied, enumerate_network_assignments, \
    is_no_signaling_to_isolated, local_strategies, network_assignments, network_frame, partition_tables, \
    polytope_membership, random_hybrid_model, random_vertex_mixtures, simulate_hybrid_model, simulate_local_model, \
    svetlichny_polytope_vertices
from svetlichny.inequalities import CorrelatorTable, correlator_table, eval_s_probability_form, eval_svetlichny
from svetlichny.quantum_core import ghz_state, optimal_scenario
from .constants import ATOL, EXAMPLE_BONDS, EXAMPLE_PAIRS, EXAMPLE_SINGLETONS


@pytest.fixture(scope='module')
def vertices():
    """Deduplicated hybrid polytope vertices."""
    return svetlichny_polytope_vertices()


class TestNetwork:
    """Tests for the frustrated network enumeration."""

    def test_example_assignment(self):
        """Test the bond count of a fixed assignment."""
        assert bonds_satisfied(NetworkAssignment(EXAMPLE_PAIRS, EXAMPLE_SINGLETONS)) == EXAMPLE_BONDS

    def test_enumeration(self):
        """Test the enumerate_network_assignments method."""
        summary = enumerate_network_assignments()
        assert summary.min_satisfied == 2
        assert summary.max_satisfied == 6
        assert summary.total == 64
        for impossible in (0, 1, 7, 8):
            assert summary.histogram[impossible] == 0

    def test_probability_form_matches_bonds(self):
        """Test that S of a deterministic assignment equals its satisfied-bond count."""
        for assignment in network_assignments():
            assert eval_s_probability_form(assignment_stats(assignment)) == bonds_satisfied(assignment)

    def test_network_frame(self):
        """Test the network_frame method."""
        frame = network_frame()
        assert frame.shape == (64, 7)
        assert frame.bonds_satisfied.between(2, 6).all()

    def test_invalid_assignment(self):
        """Test that non ±1 vertex values are rejected."""
        with pytest.raises(InputError):
            NetworkAssignment((1, 1, 1, 0), (1, 1))


class TestLocalModels:
    """Tests for fully local hidden-variable models."""

    def test_deterministic_strategy(self):
        """Test a single all +1 strategy."""
        table = simulate_local_model([(LocalStrategy((1,) * 6), 1.0)])
        for triple, dist in table.distributions().items():
            assert dist.probability(1, 1, 1) == 1.0
        assert np.allclose(table.correlators().values, 1.0)

    def test_uniform_mixture(self):
        """Test that the uniform mixture of all strategies has vanishing correlators."""
        strategies = local_strategies()
        table = simulate_local_model([(strategy, 1 / len(strategies)) for strategy in strategies])
        assert np.allclose(table.correlators().values, 0.0, atol=ATOL)

    def test_random_mixtures_respect_bound(self):
        """Test |Sv| <= 4 for random local mixtures."""
        rng = np.random.default_rng(21)
        strategies = local_strategies()
        for _ in range(50):
            chosen = rng.choice(len(strategies), size=5, replace=False)
            weights = rng.dirichlet(np.ones(5))
            weights = weights / weights.sum()
            table = simulate_local_model([(strategies[i], w) for i, w in zip(chosen, weights)])
            assert eval_svetlichny(table.correlators()).absolute_value <= CLASSICAL_BOUND + 1e-9

    def test_bad_weights(self):
        """Test that weights not summing to 1 are rejected."""
        with pytest.raises(InputError):
            simulate_local_model([(LocalStrategy((1,) * 6), 0.5)])


class TestHybridModels:
    """Tests for hybrid local/two-particle-nonlocal models."""

    def test_single_partition(self):
        """Test that q12 = 1 reproduces the chosen strategy."""
        strategy = BipartitionStrategy('(12)-3', (1, -1, -1, 1), (1, -1))
        model = HybridModel((1.0, 0.0, 0.0), {'(12)-3': [(strategy, 1.0)]})
        assert np.array_equal(simulate_hybrid_model(model).probabilities, strategy.table())

    def test_strategy_count(self):
        """Test the number of deterministic strategies per partition."""
        for name in PARTITIONS:
            assert len(bipartition_strategies(name)) == 64

    def test_random_models_respect_bound(self, vertices):
        """Test |Sv| <= 4 and polytope membership for random hybrid models."""
        rng = np.random.default_rng(99)
        for _ in range(100):
            table = simulate_hybrid_model(random_hybrid_model(rng)).correlators()
            assert eval_svetlichny(table).absolute_value <= CLASSICAL_BOUND + 1e-9
            assert polytope_membership(table, vertices=vertices).inside

    def test_isolated_party_receives_no_signal(self):
        """Test no-signaling from the pair to the isolated party in every partition term."""
        rng = np.random.default_rng(5)
        for _ in range(10):
            for name, table in partition_tables(random_hybrid_model(rng)).items():
                assert is_no_signaling_to_isolated(table, name)

    def test_pair_may_signal(self):
        """Test that a pair party's output may depend on its partner's setting."""
        strategy = BipartitionStrategy('(12)-3', (1, 1, 1, 1), (1, 1), leader_outputs=(1, -1, 1, -1))
        model = HybridModel((1.0, 0.0, 0.0), {'(12)-3': [(strategy, 1.0)]})
        table = partition_tables(model)['(12)-3']
        assert is_no_signaling_to_isolated(table, '(12)-3')
        assert not is_no_signaling_to_isolated(table, '(23)-1')

    def test_invalid_models(self):
        """Test the HybridModel invariants."""
        strategy = BipartitionStrategy('(12)-3', (1, 1, 1, 1), (1, 1))
        with pytest.raises(InputError):
            HybridModel((0.5, 0.6, 0.0), {'(12)-3': [(strategy, 1.0)]})
        with pytest.raises(InputError):
            HybridModel((0.0, 1.0, 0.0), {'(23)-1': [(strategy, 1.0)]})
        with pytest.raises(InputError):
            BipartitionStrategy('(12)', (1, 1, 1, 1), (1, 1))


class TestPolytope:
    """Tests for the hybrid polytope and membership programs."""

    def test_vertex_counts(self, vertices):
        """Test the raw and deduplicated vertex counts."""
        assert len(svetlichny_polytope_vertices(deduplicate=False)) == POLYTOPE_RAW_VERTEX_COUNT
        assert len(vertices) == POLYTOPE_VERTEX_COUNT
        assert len({vertex.terms() for vertex in vertices}) == POLYTOPE_VERTEX_COUNT

    def test_vertices_respect_bound(self, vertices):
        """Test every vertex has ±1 entries and |Sv| <= 4."""
        values = [eval_svetlichny(vertex).absolute_value for vertex in vertices]
        assert max(values) == pytest.approx(CLASSICAL_BOUND)
        assert all(set(np.abs(vertex.values).reshape(-1)) == {1.0} for vertex in vertices)

    def test_symmetry_closure(self, vertices):
        """Test the vertex set is closed under party relabeling and outcome flips."""
        keys = {vertex.terms() for vertex in vertices}
        for axes in ((1, 0, 2), (2, 1, 0), (0, 2, 1)):
            permuted = {CorrelatorTable(np.transpose(vertex.values, axes)).terms() for vertex in vertices}
            assert permuted == keys
        assert {CorrelatorTable(-vertex.values).terms() for vertex in vertices} == keys

    @pytest.mark.parametrize('method', [SIMPLEX, HIGHS])
    def test_vertex_is_inside(self, vertices, method):
        """Test that a vertex is found with all its weight."""
        verdict = polytope_membership(vertices[5], method=method, vertices=vertices)
        assert verdict.inside
        assert verdict.weights[5] == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize('method', [SIMPLEX, HIGHS])
    def test_center_is_inside(self, vertices, method):
        """Test the all-zero table."""
        verdict = polytope_membership(CorrelatorTable(np.zeros((2, 2, 2))), method=method, vertices=vertices)
        assert verdict.inside
        assert verdict.weights.sum() == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize('method', [SIMPLEX, HIGHS])
    def test_ghz_is_outside(self, vertices, method):
        """Test that the optimal GHZ table lies outside the polytope."""
        verdict = polytope_membership(correlator_table(ghz_state(), optimal_scenario()), method=method,
                                      vertices=vertices)
        assert not verdict.inside
        assert verdict.violation_margin > 1e-3

    def test_methods_agree_on_margin(self, vertices):
        """Test the built-in simplex and HiGHS agree on the max-norm margin."""
        target = correlator_table(ghz_state(), optimal_scenario())
        simplex = polytope_membership(target, method=SIMPLEX, vertices=vertices)
        highs = polytope_membership(target, method=HIGHS, vertices=vertices)
        assert simplex.violation_margin == pytest.approx(highs.violation_margin, abs=1e-7)

    def test_reconstruction(self, vertices):
        """Test inside verdicts reproduce the target within tolerance."""
        matrix = np.array([vertex.terms() for vertex in vertices]).T
        for mixture in random_vertex_mixtures(1000, np.random.default_rng(3), vertices=vertices):
            verdict = polytope_membership(mixture, vertices=vertices)
            assert verdict.inside
            assert np.all(verdict.weights >= 0)
            assert np.max(np.abs(matrix @ verdict.weights - np.array(mixture.terms()))) <= 1e-9

    def test_tolerance_range(self, vertices):
        """Test that tolerances outside [1e-12, 1e-6] are rejected."""
        with pytest.raises(InputError):
            polytope_membership(vertices[0], tolerance=1e-3, vertices=vertices)
        with pytest.raises(InputError):
            polytope_membership(vertices[0], method='dual', vertices=vertices)

    def test_pivot_cap(self, vertices):
        """Test that hitting the pivot cap raises a solver error."""
        target = correlator_table(ghz_state(), optimal_scenario())
        with pytest.raises(SolverError):
            polytope_membership(target, vertices=vertices, max_iterations=1)
