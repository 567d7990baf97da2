"""Run configuration: a flat ``key = value`` file plus command-line overrides."""
import logging
import re
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterable, Optional, Tuple

import numpy as np

from svetlichny.constants import HIGHS, PLANAR, SEARCH_KINDS, SETTING_NAMES, SIMPLEX
from svetlichny.defaults import DEFAULT_MAX_ITERATIONS, DEFAULT_MEMBERSHIP_TOLERANCE, DEFAULT_SCAN_RESTARTS, \
    DEFAULT_SCAN_TRIALS, DEFAULT_SEED, DEFAULT_SEEDS, DEFAULT_SHOTS, DEFAULT_STEP_TOLERANCE
from svetlichny.exceptions import ConfigError, SvetlichnyError
from svetlichny.quantum_core import MeasurementSetting, Scenario, StateVector, axis_setting, basis_state, \
    ghz_state, make_state, optimal_scenario, planar_setting

logger = logging.getLogger(__name__)

# Polytope input modes
INPUT_STATE = 'state'
INPUT_UNIFORM = 'uniform'
INPUT_VERTEX = 'vertex'
INPUT_MODES = (INPUT_STATE, INPUT_UNIFORM, INPUT_VERTEX)

SETTING_KEYS = ('A', 'A_prime', 'B', 'B_prime', 'C', 'C_prime')
SETTING_ALIASES = dict(zip(SETTING_NAMES, SETTING_KEYS))

# Tolerance on the norm of a setting vector before it is normalized
VECTOR_NORM_SLACK = 1e-6


@dataclass(frozen=True)
class RunConfig:
    """Everything a subcommand needs, already parsed into module inputs."""

    state: StateVector = field(default_factory=ghz_state)
    scenario: Scenario = field(default_factory=optimal_scenario)
    space: str = PLANAR
    menu: Tuple[MeasurementSetting, ...] = ()
    seeds: int = DEFAULT_SEEDS
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    step_tolerance: float = DEFAULT_STEP_TOLERANCE
    shots: int = DEFAULT_SHOTS
    seed: int = DEFAULT_SEED
    trials: int = DEFAULT_SCAN_TRIALS
    restarts: int = DEFAULT_SCAN_RESTARTS
    tolerance: float = DEFAULT_MEMBERSHIP_TOLERANCE
    method: str = SIMPLEX
    input: str = INPUT_STATE
    vertex: int = 0
    out: Optional[str] = None


def parse_angle(text: str) -> float:
    """Parse radians with an optional ``pi`` multiplier: '0.25pi', '-pi', 'pi/2', '1.5707963'."""
    text = text.strip().lower()
    match = re.fullmatch(r'([+-]?[0-9.eE+-]*)\s*\*?\s*pi(?:\s*/\s*([0-9.]+))?', text)
    if match:
        coefficient, divisor = match.groups()
        if coefficient in ('', '+'):
            value = 1.0
        elif coefficient == '-':
            value = -1.0
        else:
            value = float(coefficient)
        angle = value * np.pi
        return angle / float(divisor) if divisor else angle

    angle = float(text)
    if not np.isfinite(angle):
        raise ValueError(f"angle '{text}' is not finite")
    return angle


def parse_setting(text: str) -> MeasurementSetting:
    """Parse an axis name, a planar angle, or a Bloch vector 'nx ny nz'."""
    text = text.strip()
    if text.lower() in ('x', 'y', 'z'):
        return axis_setting(text)

    tokens = text.split()
    if len(tokens) == 3:
        direction = np.array([float(token) for token in tokens])
        norm = float(np.linalg.norm(direction))
        if abs(norm - 1.0) > VECTOR_NORM_SLACK:
            raise ValueError(f"setting vector '{text}' is not a unit vector (norm {norm:.6g})")
        return MeasurementSetting(tuple(direction / norm))

    return planar_setting(parse_angle(text))


def parse_menu(text: str) -> Tuple[MeasurementSetting, ...]:
    """Comma-separated settings."""
    items = [item for item in text.split(',') if item.strip()]
    if not items:
        raise ValueError("menu is empty")
    return tuple(parse_setting(item) for item in items)


def parse_state(text: str) -> StateVector:
    """'ghz', 'up', a three-qubit ket label such as 'uud', or 16 reals (re, im per amplitude)."""
    text = text.strip()
    if text.lower() == 'ghz':
        return ghz_state()
    if text.lower() == 'up':
        return basis_state('uuu')

    tokens = text.replace(',', ' ').split()
    if len(tokens) == 1:
        return basis_state(tokens[0])
    if len(tokens) != 16:
        raise ValueError(f"expected 'ghz', 'up', a ket label or 16 reals, got {len(tokens)} values")
    values = np.array([float(token) for token in tokens])
    return make_state(values[0::2] + 1j * values[1::2])


def _choice(options: Tuple[str, ...]) -> Callable[[str], str]:
    def parse(text: str) -> str:
        value = text.strip().lower().replace('-', '_')
        if value not in options:
            raise ValueError(f"'{text.strip()}' is not one of {', '.join(options)}")
        return value
    return parse


def _positive_int(text: str) -> int:
    value = int(text.strip())
    if value < 1:
        raise ValueError(f"must be at least 1, got {value}")
    return value


def _seed(text: str) -> int:
    value = int(text.strip())
    if not 0 <= value < 2 ** 64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text.strip())
    if not value > 0:
        raise ValueError(f"must be positive, got {value}")
    return value


def _tolerance(text: str) -> float:
    value = float(text.strip())
    if not 1e-12 <= value <= 1e-6:
        raise ValueError(f"must lie in [1e-12, 1e-6], got {value}")
    return value


def _nonnegative_int(text: str) -> int:
    value = int(text.strip())
    if value < 0:
        raise ValueError(f"must be nonnegative, got {value}")
    return value


PARSERS: Dict[str, Callable[[str], object]] = {
    'state': parse_state,
    'space': _choice(SEARCH_KINDS),
    'menu': parse_menu,
    'seeds': _positive_int,
    'max_iterations': _positive_int,
    'step_tolerance': _positive_float,
    'shots': _positive_int,
    'seed': _seed,
    'trials': _positive_int,
    'restarts': _positive_int,
    'tolerance': _tolerance,
    'method': _choice((SIMPLEX, HIGHS)),
    'input': _choice(INPUT_MODES),
    'vertex': _nonnegative_int,
    'out': str.strip,
}
for _key in SETTING_KEYS:
    PARSERS[_key] = parse_setting
del _key

KNOWN_KEYS = tuple(PARSERS)


def _parse_entry(key: str, value: str, source: str, line: Optional[int]) -> Tuple[str, object]:
    key = SETTING_ALIASES.get(key.strip(), key.strip())
    if key not in PARSERS:
        raise ConfigError(f"unknown key; expected one of {', '.join(KNOWN_KEYS)}", source, line, key)
    try:
        return key, PARSERS[key](value)
    except (ValueError, SvetlichnyError) as error:
        raise ConfigError(str(error), source, line, key) from error


def read_entries(lines: Iterable[str], source: str) -> Dict[str, object]:
    """Parse ``key = value`` lines; ``#`` starts a comment, blank lines are skipped."""
    entries = {}
    for number, raw in enumerate(lines, start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError("expected 'key = value'", source, number)
        key, value = line.split('=', 1)
        parsed_key, parsed = _parse_entry(key, value, source, number)
        entries[parsed_key] = parsed
    return entries


def build_config(entries: Dict[str, object], base: Optional[RunConfig] = None) -> RunConfig:
    """Apply parsed entries on top of ``base`` (defaults when omitted)."""
    config = base or RunConfig()
    settings = list(config.scenario.settings)
    changed = {}
    for key, value in entries.items():
        if key in SETTING_KEYS:
            settings[SETTING_KEYS.index(key)] = value
        else:
            changed[key] = value
    return replace(config, scenario=Scenario.from_settings(*settings), **changed)


def load_config(path: Optional[str] = None, overrides: Iterable[str] = (), base: Optional[RunConfig] = None,
                **options) -> RunConfig:
    """Load a RunConfig from an optional file, ``key=value`` overrides and keyword options.

    Keyword options with value None are ignored; later sources win. Keys no source sets keep their value in ``base``.

    Raises
    ------
    ConfigError
        With ``path:line: field 'key':`` context when a value does not parse.
    """
    entries = {}
    if path:
        try:
            with open(path, encoding='utf-8') as config_file:
                entries.update(read_entries(config_file, path))
        except OSError as error:
            raise ConfigError(f"cannot read config: {error.strerror}", path) from error
        logger.info(f"Loaded run configuration from {path}")

    for override in overrides:
        if '=' not in override:
            raise ConfigError(f"override '{override}' is not of the form key=value", '--set')
        key, value = override.split('=', 1)
        parsed_key, parsed = _parse_entry(key, value, '--set', None)
        entries[parsed_key] = parsed

    for key, value in options.items():
        if value is not None:
            parsed_key, parsed = _parse_entry(key, str(value), f'--{key}', None)
            entries[parsed_key] = parsed

    return build_config(entries, base)

