"""Tests for the `config` module."""
import numpy as np
import pytest

from svetlichny.config import load_config, parse_angle, parse_menu, parse_setting, parse_state
from svetlichny.constants import FULL_SPHERE, HIGHS, PLANAR
from svetlichny.exceptions import ConfigError, ZeroNormError
from svetlichny.quantum_core import ghz_state, optimal_scenario
from .constants import SQRT_HALF


@pytest.fixture
def config_file(tmp_path):
    """Write a run configuration and return its path."""
    def write(text: str) -> str:
        path = tmp_path / 'run.cfg'
        path.write_text(text)
        return str(path)
    return write


class TestParsers:
    """Tests for the value parsers."""

    def test_parse_angle(self):
        """Test radians with and without pi multipliers."""
        assert parse_angle('0.25pi') == pytest.approx(np.pi / 4)
        assert parse_angle('-pi') == pytest.approx(-np.pi)
        assert parse_angle('pi/2') == pytest.approx(np.pi / 2)
        assert parse_angle('2*pi') == pytest.approx(2 * np.pi)
        assert parse_angle('1.5') == 1.5
        with pytest.raises(ValueError):
            parse_angle('north')

    def test_parse_setting(self):
        """Test axis names, angles and Bloch vectors."""
        assert parse_setting('x').direction == (1.0, 0.0, 0.0)
        assert parse_setting('0 0 1').direction == pytest.approx((0.0, 0.0, 1.0))
        assert parse_setting('0.5pi').direction == pytest.approx((0.0, 1.0, 0.0), abs=1e-15)
        assert parse_setting(f"{SQRT_HALF} 0 {SQRT_HALF}").direction == pytest.approx((SQRT_HALF, 0.0, SQRT_HALF))
        with pytest.raises(ValueError):
            parse_setting('1 1 0')

    def test_parse_menu(self):
        """Test comma-separated menus."""
        menu = parse_menu('x, z')
        assert [setting.label for setting in menu] == ['x', 'z']
        with pytest.raises(ValueError):
            parse_menu(' , ')

    def test_parse_state(self):
        """Test named, labelled and explicit states."""
        assert np.allclose(parse_state('ghz').amplitudes, ghz_state().amplitudes)
        assert parse_state('up').amplitude('uuu') == 1.0
        assert parse_state('HHV').amplitude('uud') == 1.0
        explicit = parse_state(' '.join(['1', '0'] + ['0'] * 14))
        assert explicit.amplitude('uuu') == 1.0
        with pytest.raises(ZeroNormError):
            parse_state(' '.join(['0'] * 16))


class TestLoadConfig:
    """Tests for configuration files and overrides."""

    def test_defaults(self):
        """Test that an empty configuration is the GHZ state at the optimal angles."""
        config = load_config()
        assert np.allclose(config.state.amplitudes, ghz_state().amplitudes)
        assert config.scenario == optimal_scenario()
        assert config.space == PLANAR

    def test_file(self, config_file):
        """Test comments, aliases and value normalization."""
        path = config_file(
            "# a run\n"
            "\n"
            "shots = 100   # per triple\n"
            "space = full-sphere\n"
            "A' = x\n"
            "C_prime = 0.5pi\n"
            "method = HiGHS\n"
        )
        config = load_config(path)
        assert config.shots == 100
        assert config.space == FULL_SPHERE
        assert config.method == HIGHS
        assert config.scenario.setting(0, 1).label == 'x'
        assert config.scenario.setting(2, 1).direction == pytest.approx((0.0, 1.0, 0.0), abs=1e-15)

    def test_precedence(self, config_file):
        """Test that overrides beat the file and options beat overrides."""
        path = config_file("shots = 100\nseed = 1\n")
        config = load_config(path, ['shots=200', 'seed=2'], seed=3)
        assert config.shots == 200
        assert config.seed == 3

    def test_bad_value(self, config_file):
        """Test that parse failures name the file, line and field."""
        path = config_file("# header\nstate = ghz\nshots = many\n")
        with pytest.raises(ConfigError) as error:
            load_config(path)
        assert str(error.value).startswith(f"{path}:3: field 'shots':")
        assert error.value.line == 3
        assert error.value.field == 'shots'

    def test_unknown_key(self, config_file):
        """Test unknown keys."""
        with pytest.raises(ConfigError, match="field 'color'"):
            load_config(config_file("color = blue\n"))

    def test_missing_equals(self, config_file):
        """Test lines that are not key = value pairs."""
        with pytest.raises(ConfigError, match=":1:"):
            load_config(config_file("shots 100\n"))

    def test_missing_file(self, tmp_path):
        """Test that an unreadable file raises a configuration error."""
        with pytest.raises(ConfigError):
            load_config(str(tmp_path / 'absent.cfg'))

    def test_override_errors(self):
        """Test malformed overrides and out-of-range values."""
        with pytest.raises(ConfigError, match='--set'):
            load_config(overrides=['shots'])
        with pytest.raises(ConfigError, match="field 'tolerance'"):
            load_config(overrides=['tolerance=0.1'])
        with pytest.raises(ConfigError, match="field 'seed'"):
            load_config(overrides=[f'seed={2 ** 64}'])

    def test_base(self):
        """Test that keys no source sets keep the base configuration's values."""
        base = load_config(overrides=['space=full_sphere', 'max_iterations=30'])
        config = load_config(overrides=['max_iterations=5'], base=base)
        assert config.space == FULL_SPHERE
        assert config.max_iterations == 5
