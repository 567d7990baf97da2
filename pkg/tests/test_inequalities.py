"""Tests for the `inequalities` module."""
import numpy as np
import pytest

from svetlichny.constants import OPTIMAL_S, OPTIMAL_SIGNED_VALUE, TERM_NAMES
from svetlichny.exceptions import InputError
from svetlichny.inequalities import CorrelationStats, CorrelatorTable, anticommutator_bound, correlator_table, \
    correlator_table_from_distributions, eval_s_probability_form, eval_svetlichny, max_state_violation, \
    scenario_distributions, stats_from_distributions, svetlichny_operator
from svetlichny.quantum_core import MeasurementSetting, Scenario, axis_setting, ghz_state, \
    observable_from_setting, optimal_scenario, random_state
from .constants import ATOL, QUANTUM_MAX


def random_scenario(rng: np.random.Generator) -> Scenario:
    """Six random Bloch directions."""
    directions = rng.standard_normal((6, 3))
    return Scenario.from_settings(*(MeasurementSetting(d / np.linalg.norm(d)) for d in directions))


class TestSvetlichny:
    """Tests for the correlator and probability forms."""

    def test_optimal_ghz_value(self):
        """Test Sv and S of the GHZ state at the optimal angles."""
        distributions = scenario_distributions(ghz_state(), optimal_scenario())
        report = eval_svetlichny(correlator_table_from_distributions(distributions))
        assert report.signed_value == pytest.approx(OPTIMAL_SIGNED_VALUE, abs=ATOL)
        assert report.absolute_value == pytest.approx(QUANTUM_MAX, abs=ATOL)
        assert report.violates_hybrid_bound
        assert eval_s_probability_form(stats_from_distributions(distributions)) == pytest.approx(OPTIMAL_S, abs=ATOL)

    def test_all_x_is_zero(self):
        """Test that all-σx settings give Sv = 0 for the GHZ state."""
        x = axis_setting('x')
        report = eval_svetlichny(correlator_table(ghz_state(), Scenario.from_settings(*[x] * 6)))
        assert report.absolute_value == pytest.approx(0.0, abs=ATOL)
        assert not report.violates_hybrid_bound

    def test_identity_on_random_inputs(self):
        """Test Sv = 8 - 2S computed from the same distributions."""
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            distributions = scenario_distributions(random_state(rng), random_scenario(rng))
            signed = eval_svetlichny(correlator_table_from_distributions(distributions)).signed_value
            s_value = eval_s_probability_form(stats_from_distributions(distributions))
            assert signed == pytest.approx(8.0 - 2.0 * s_value, abs=ATOL)

    def test_report_identity(self):
        """Test the identity_holds property."""
        report = eval_svetlichny(correlator_table(ghz_state(), optimal_scenario()))
        assert report.identity_holds

    def test_two_table_paths_agree(self):
        """Test that the einsum table matches the table built from outcome distributions."""
        rng = np.random.default_rng(8)
        state, scenario = random_state(rng), random_scenario(rng)
        direct = correlator_table(state, scenario)
        from_dists = correlator_table_from_distributions(scenario_distributions(state, scenario))
        assert np.allclose(direct.values, from_dists.values, atol=ATOL)

    def test_missing_statistics(self):
        """Test that a partial statistics map is rejected."""
        stats = stats_from_distributions(scenario_distributions(ghz_state(), optimal_scenario()))
        stats.pop((1, 1, 1))
        with pytest.raises(InputError, match="A'B'C'"):
            eval_s_probability_form(stats)


class TestCorrelatorTable:
    """Tests for the CorrelatorTable type."""

    def test_term_order(self):
        """Test that from_terms places entries in the inequality's order."""
        table = CorrelatorTable.from_terms([0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8])
        assert table[(0, 0, 1)] == 0.2
        assert table[(1, 0, 0)] == 0.3
        assert table[(0, 1, 0)] == 0.5
        frame = table.to_frame()
        assert list(frame.term) == list(TERM_NAMES)
        assert list(frame.sign) == [1, 1, 1, -1, 1, -1, -1, -1]

    def test_out_of_range(self):
        """Test that correlators outside [-1, 1] are rejected."""
        with pytest.raises(InputError):
            CorrelatorTable.from_terms([1.5] + [0.0] * 7)
        with pytest.raises(InputError):
            CorrelatorTable.from_terms([0.0] * 7)

    def test_stats_consistency(self):
        """Test the CorrelationStats invariants."""
        CorrelationStats(0.75, 0.25, 0.5)
        with pytest.raises(InputError):
            CorrelationStats(0.75, 0.5, 0.25)
        with pytest.raises(InputError):
            CorrelationStats(0.75, 0.25, 0.0)


class TestQuantumBounds:
    """Tests for the operator and anticommutator bounds."""

    def test_operator_expectation(self):
        """Test that ⟨ψ|Sv operator|ψ⟩ reproduces the signed value."""
        rng = np.random.default_rng(4)
        state, scenario = random_state(rng), random_scenario(rng)
        operator = svetlichny_operator(scenario)
        assert np.allclose(operator, operator.conj().T, atol=ATOL)
        expectation = np.vdot(state.amplitudes, operator @ state.amplitudes).real
        assert expectation == pytest.approx(eval_svetlichny(correlator_table(state, scenario)).signed_value, abs=1e-10)

    def test_max_state_violation(self):
        """Test that the optimal settings admit no state beyond 4√2."""
        assert max_state_violation(optimal_scenario()) == pytest.approx(QUANTUM_MAX, abs=1e-9)

    def test_anticommutator_bound_at_optimum(self):
        """Test the bound is tight for anticommuting C and C'."""
        scenario = optimal_scenario()
        c, c_prime = (observable_from_setting(s) for s in scenario.party_settings[2])
        assert anticommutator_bound(ghz_state(), c, c_prime) == pytest.approx(QUANTUM_MAX, abs=ATOL)

    def test_anticommutator_bound_holds(self):
        """Test |Sv| never exceeds the anticommutator bound."""
        rng = np.random.default_rng(17)
        for _ in range(1000):
            state, scenario = random_state(rng), random_scenario(rng)
            c, c_prime = (observable_from_setting(s) for s in scenario.party_settings[2])
            value = eval_svetlichny(correlator_table(state, scenario)).absolute_value
            assert value <= anticommutator_bound(state, c, c_prime) + 1e-9
            assert anticommutator_bound(state, c, c_prime) <= QUANTUM_MAX + 1e-9

    def test_equal_c_settings(self):
        """Test that C = C' caps the bound at 4."""
        z = axis_setting('z')
        c = observable_from_setting(z)
        assert anticommutator_bound(ghz_state(), c, c) == pytest.approx(4.0, abs=ATOL)
