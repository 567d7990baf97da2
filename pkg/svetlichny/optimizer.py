"""Search for measurement settings that maximize |Sv| for a given state.

Continuous spaces use multi-start coordinate ascent: Sv is linear in each single observable, so every coordinate is a
one-dimensional periodic function, bracketed on a coarse grid and refined by golden-section search. Fixed menus are
searched exhaustively.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from svetlichny.constants import BOUND_SLACK, CANNOT_CERTIFY, CAN_CERTIFY, CLASSICAL_BOUND, FIXED_MENU, FULL_SPHERE, \
    PAULIS, PLANAR, QUANTUM_BOUND, SEARCH_KINDS, SIGN, TERM_SIGNS, TRIPLES
from svetlichny.defaults import DEFAULT_MAX_ITERATIONS, DEFAULT_SCAN_MAX_ITERATIONS, DEFAULT_SCAN_RESTARTS, \
    DEFAULT_SCAN_STEP_TOLERANCE, DEFAULT_SEED, DEFAULT_SEEDS, DEFAULT_STEP_TOLERANCE, GRID_POINTS, MAX_MENU_SIZE
from svetlichny.exceptions import ConsistencyError, InputError
from svetlichny.inequalities import anticommutator_bound, correlator_table, eval_svetlichny
from svetlichny.quantum_core import MeasurementSetting, Scenario, StateVector, bloch_setting, correlation_tensor, \
    ghz_state, observable_from_setting, optimal_scenario, planar_setting, random_state

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)

INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0
TWO_PI = 2.0 * np.pi
ZERO_OPERATOR = np.zeros((2, 2), dtype=complex)

# Smallest improvement of |Sv| that counts as a move
IMPROVEMENT_SLACK = 1e-14


def wrap_angle(angle: float) -> float:
    """Map an angle to (-π, π]."""
    wrapped = float(np.mod(angle + np.pi, TWO_PI) - np.pi)
    return np.pi if wrapped == -np.pi else wrapped


def golden_section_max(f: Callable[[float], float], lower: float, upper: float, tolerance: float) -> Tuple[float, float]:
    """Maximize a unimodal ``f`` on [lower, upper] until the bracket is narrower than ``tolerance``."""
    c = upper - INV_PHI * (upper - lower)
    d = lower + INV_PHI * (upper - lower)
    fc, fd = f(c), f(d)
    while upper - lower > tolerance:
        if fc > fd:
            upper, d, fd = d, c, fc
            c = upper - INV_PHI * (upper - lower)
            fc = f(c)
        else:
            lower, c, fc = c, d, fd
            d = lower + INV_PHI * (upper - lower)
            fd = f(d)

    best = 0.5 * (lower + upper)
    return best, f(best)


def maximize_periodic(f: Callable[[float], float], current: float, tolerance: float,
                      grid_points: int = GRID_POINTS) -> Tuple[float, float]:
    """Maximize a 2π-periodic ``f``: best point of a grid anchored at ``current``, then golden-section around it."""
    spacing = TWO_PI / grid_points
    grid = current + spacing * np.arange(grid_points)
    values = [f(t) for t in grid]
    anchor = int(np.argmax(values))

    refined, refined_value = golden_section_max(f, grid[anchor] - spacing, grid[anchor] + spacing, tolerance)
    if refined_value >= values[anchor]:
        return refined, refined_value
    return float(grid[anchor]), float(values[anchor])


def signed_value(state: StateVector, stacks: Sequence[np.ndarray]) -> float:
    """Signed Sv of ``state`` for per-party observable stacks of shape (2, 2, 2)."""
    return float(np.sum(SIGN * correlation_tensor(state, *stacks)))


@dataclass(frozen=True)
class SearchSpace:
    """Where and how long to search."""

    kind: str
    menu: Tuple[MeasurementSetting, ...] = ()
    seeds: int = DEFAULT_SEEDS
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    step_tolerance: float = DEFAULT_STEP_TOLERANCE

    def __post_init__(self):
        """Validate the space."""
        if self.kind not in SEARCH_KINDS:
            raise InputError(f"Unknown search space '{self.kind}'; expected one of {', '.join(SEARCH_KINDS)}")
        object.__setattr__(self, 'menu', tuple(self.menu))

        if self.kind == FIXED_MENU:
            if not self.menu:
                raise InputError("A fixed_menu search needs a nonempty menu")
            if len(self.menu) > MAX_MENU_SIZE:
                raise InputError(f"Menus are limited to {MAX_MENU_SIZE} settings, got {len(self.menu)}")
        else:
            if self.seeds < 1:
                raise InputError(f"seeds must be at least 1, got {self.seeds}")
            if self.max_iterations < 1:
                raise InputError(f"max_iterations must be at least 1, got {self.max_iterations}")
            if not self.step_tolerance > 0:
                raise InputError(f"step_tolerance must be positive, got {self.step_tolerance}")


@dataclass(frozen=True)
class OptimizationResult:
    """Best scenario found, with the trace of how it was reached.

    ``parameters`` are the planar angles (planar), the (polar, azimuth) pairs flattened (full_sphere), or the menu
    indices of A, A', B, B', C, C' (fixed_menu).
    """

    best_scenario: Scenario
    best_value: float
    signed_value: float
    kind: str
    parameters: Tuple[float, ...]
    iterations: int
    restart: int
    converged: bool
    evaluated: int
    restart_values: Tuple[float, ...] = field(default=())


@dataclass(frozen=True)
class AuditReport:
    """Exhaustive menu audit with its certification verdict."""

    best_scenario: Scenario
    best_value: float
    signed_value: float
    verdict: str
    evaluated: int

    @property
    def can_certify(self) -> bool:
        """Whether the menu can show genuine three-particle nonlocality."""
        return self.verdict == CAN_CERTIFY


@dataclass(frozen=True)
class ScanReport:
    """Random-state scan: overall maximum and one row per trial."""

    max_value: float
    trials: pd.DataFrame

    @property
    def bound_respected(self) -> bool:
        """Whether every trial stays below both its anticommutator bound and 4√2."""
        below_schwarz = (self.trials['best_value'] <= self.trials['anticommutator_bound'] + BOUND_SLACK).all()
        return bool(below_schwarz and self.max_value <= QUANTUM_BOUND + BOUND_SLACK)


class CoordinateAscent:
    """Coordinate-wise golden-section ascent of |Sv| over planar or Bloch-sphere angles."""

    def __init__(self, state: StateVector, space: SearchSpace):
        """Init method for CoordinateAscent.

        Parameters
        ----------
        state : StateVector
            State whose violation is maximized.
        space : SearchSpace
            A planar or full_sphere space.
        """
        if space.kind not in (PLANAR, FULL_SPHERE):
            raise InputError(f"CoordinateAscent handles planar and full_sphere spaces, not '{space.kind}'")
        self.state = state
        self.space = space
        self.planar = space.kind == PLANAR
        self.tolerance = space.step_tolerance / 4

    def initial_parameters(self, rng: np.random.Generator) -> np.ndarray:
        """Random starting point: uniform angles, or uniform directions on the sphere."""
        if self.planar:
            return rng.uniform(-np.pi, np.pi, size=6)
        polar = np.arccos(rng.uniform(-1.0, 1.0, size=6))
        azimuth = rng.uniform(-np.pi, np.pi, size=6)
        return np.stack([polar, azimuth], axis=1)

    def direction(self, params: np.ndarray, setting: int) -> np.ndarray:
        """Unit Bloch vector of one setting."""
        if self.planar:
            return np.array([np.cos(params[setting]), np.sin(params[setting]), 0.0])
        polar, azimuth = params[setting]
        return np.array([np.sin(polar) * np.cos(azimuth), np.sin(polar) * np.sin(azimuth), np.cos(polar)])

    def coordinates(self) -> List[Tuple[int, ...]]:
        """Parameter indices visited in one sweep."""
        if self.planar:
            return [(setting,) for setting in range(6)]
        return [(setting, which) for setting in range(6) for which in (0, 1)]

    def stacks(self, params: np.ndarray) -> List[np.ndarray]:
        """Per-party observable stacks for ``params``."""
        stacks = []
        for party in range(3):
            stacks.append(np.stack([
                np.tensordot(self.direction(params, 2 * party + slot), PAULIS, axes=1) for slot in (0, 1)
            ]))
        return stacks

    def linear_response(self, stacks: List[np.ndarray], setting: int) -> Tuple[np.ndarray, float]:
        """Return (v, R) such that Sv = v·n + R when only ``setting`` moves to direction n."""
        party, slot = divmod(setting, 2)
        values = []
        for operator in (*PAULIS, ZERO_OPERATOR):
            trial = list(stacks)
            trial[party] = stacks[party].copy()
            trial[party][slot] = operator
            values.append(signed_value(self.state, trial))
        constant = values[3]
        return np.array(values[:3]) - constant, constant

    def scenario(self, params: np.ndarray) -> Scenario:
        """Scenario built from ``params``."""
        if self.planar:
            return Scenario.from_settings(*(planar_setting(angle) for angle in params))
        return Scenario.from_settings(*(bloch_setting(polar, azimuth) for polar, azimuth in params))

    def normalize(self, params: np.ndarray) -> np.ndarray:
        """Canonical angles: planar in (-π, π]; polar in [0, π] with azimuth in (-π, π]."""
        if self.planar:
            return np.array([wrap_angle(angle) for angle in params])
        normalized = np.empty_like(params)
        for setting, (polar, azimuth) in enumerate(params):
            polar = float(np.mod(polar, TWO_PI))
            if polar > np.pi:
                polar, azimuth = TWO_PI - polar, azimuth + np.pi
            normalized[setting] = (polar, wrap_angle(azimuth))
        return normalized

    def run(self, rng: np.random.Generator) -> Tuple[np.ndarray, int, bool]:
        """One restart. Returns (parameters, sweeps, converged)."""
        params = self.initial_parameters(rng)
        stacks = self.stacks(params)

        for sweep in range(1, self.space.max_iterations + 1):
            max_step = 0.0
            for coordinate in self.coordinates():
                setting = coordinate[0]
                v, constant = self.linear_response(stacks, setting)
                current = float(params[coordinate])

                def objective(t: float) -> float:
                    params[coordinate] = t
                    return abs(float(v @ self.direction(params, setting)) + constant)

                current_value = objective(current)
                best, best_value = maximize_periodic(objective, current, self.tolerance)
                if best_value > current_value + IMPROVEMENT_SLACK:
                    params[coordinate] = best
                    max_step = max(max_step, abs(wrap_angle(best - current)))
                    party, slot = divmod(setting, 2)
                    stacks[party] = stacks[party].copy()
                    stacks[party][slot] = np.tensordot(self.direction(params, setting), PAULIS, axes=1)
                else:
                    params[coordinate] = current

            if max_step < self.space.step_tolerance:
                return params, sweep, True

        return params, self.space.max_iterations, False


def _menu_values(state: StateVector, menu: Sequence[MeasurementSetting]) -> np.ndarray:
    """Signed Sv for every assignment, as an array indexed [A, A', B, B', C, C'] by menu position."""
    operators = np.stack([observable_from_setting(setting).matrix for setting in menu])
    tensor = correlation_tensor(state, operators, operators, operators)
    size = len(menu)

    values = np.zeros((size,) * 6)
    for (x, y, z), sign in zip(TRIPLES, TERM_SIGNS):
        shape = [1] * 6
        shape[x] = shape[2 + y] = shape[4 + z] = size
        values = values + sign * tensor.reshape(shape)
    return values


def _search_menu(state: StateVector, space: SearchSpace) -> OptimizationResult:
    values = _menu_values(state, space.menu)
    indices = np.unravel_index(int(np.argmax(np.abs(values))), values.shape)
    scenario = Scenario.from_settings(*(space.menu[i] for i in indices))
    report = eval_svetlichny(correlator_table(state, scenario))
    logger.info(f"Menu of {len(space.menu)} settings: {values.size} scenarios, best |Sv| {report.absolute_value:.12g}")

    return OptimizationResult(
        best_scenario=scenario,
        best_value=report.absolute_value,
        signed_value=report.signed_value,
        kind=FIXED_MENU,
        parameters=tuple(int(i) for i in indices),
        iterations=1,
        restart=0,
        converged=True,
        evaluated=int(values.size),
    )


def _search_continuous(state: StateVector, space: SearchSpace, seed: int) -> OptimizationResult:
    ascent = CoordinateAscent(state, space)
    children = np.random.SeedSequence(seed).spawn(space.seeds)

    best = None
    restart_values = []
    for restart, child in enumerate(children):
        params, sweeps, converged = ascent.run(np.random.default_rng(child))
        params = ascent.normalize(params)
        value = abs(signed_value(state, ascent.stacks(params)))
        restart_values.append(value)
        logger.debug(f"Restart {restart}: |Sv| {value:.12g} after {sweeps} sweeps (converged={converged})")
        if best is None or value > best[0] + 1e-12:
            best = (value, restart, params, sweeps, converged)

    _, restart, params, sweeps, converged = best
    scenario = ascent.scenario(params)
    report = eval_svetlichny(correlator_table(state, scenario))
    if not converged:
        logger.warning(f"Best restart {restart} hit the iteration cap of {space.max_iterations} sweeps")

    return OptimizationResult(
        best_scenario=scenario,
        best_value=report.absolute_value,
        signed_value=report.signed_value,
        kind=space.kind,
        parameters=tuple(float(p) for p in np.asarray(params).reshape(-1)),
        iterations=sweeps,
        restart=restart,
        converged=converged,
        evaluated=space.seeds,
        restart_values=tuple(restart_values),
    )


def optimize_settings(state: StateVector, space: SearchSpace, seed: int = DEFAULT_SEED) -> OptimizationResult:
    """Maximize |Sv| of ``state`` over ``space``.

    Parameters
    ----------
    state : StateVector
        State under test.
    space : SearchSpace
        Planar, full_sphere or fixed_menu space.
    seed : int
        Seeds the restarts; restart ``i`` draws from the i-th child of ``SeedSequence(seed)``.

    Returns
    -------
    OptimizationResult
        Best scenario re-evaluated through ``eval_svetlichny``. Ties between restarts go to the lowest index.

    Raises
    ------
    ConsistencyError
        If a search reports a value above 4√2, which can only come from a numerical defect.
    """
    logger.info(f"Optimizing settings over {space.kind} space")
    if space.kind == FIXED_MENU:
        result = _search_menu(state, space)
    else:
        result = _search_continuous(state, space, seed)

    if result.best_value > QUANTUM_BOUND + BOUND_SLACK:
        raise ConsistencyError(f"|Sv| = {result.best_value!r} exceeds the quantum bound 4√2")
    return result


def verify_optimal_angles() -> Tuple[Scenario, float]:
    """Evaluate the GHZ state at the known optimal planar angles."""
    scenario = optimal_scenario()
    return scenario, eval_svetlichny(correlator_table(ghz_state(), scenario)).absolute_value


def audit_fixed_menu(state: StateVector, menu: Sequence[MeasurementSetting]) -> AuditReport:
    """Exhaustively check whether settings drawn from ``menu`` can push |Sv| beyond 4."""
    result = optimize_settings(state, SearchSpace(FIXED_MENU, menu=tuple(menu)))
    verdict = CANNOT_CERTIFY if result.best_value <= CLASSICAL_BOUND + BOUND_SLACK else CAN_CERTIFY
    logger.info(f"Menu audit verdict: {verdict} (best |Sv| {result.best_value:.12g})")
    return AuditReport(
        best_scenario=result.best_scenario,
        best_value=result.best_value,
        signed_value=result.signed_value,
        verdict=verdict,
        evaluated=result.evaluated,
    )


def scan_trial(index: int, seed: int, space: SearchSpace, state: Optional[StateVector] = None) -> dict:
    """Optimize one random state; trial ``index`` only depends on (seed, index)."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))
    trial_state = state if state is not None else random_state(rng)
    result = optimize_settings(trial_state, space, seed=int(rng.integers(0, 2 ** 32)))

    c, c_prime = (observable_from_setting(setting) for setting in result.best_scenario.party_settings[2])
    return {
        'trial': index,
        'best_value': result.best_value,
        'signed_value': result.signed_value,
        'anticommutator_bound': anticommutator_bound(trial_state, c, c_prime),
        'converged': result.converged,
        'parameters': '|'.join(f"{p:.12g}" for p in result.parameters),
    }


def scan_space(restarts: int = DEFAULT_SCAN_RESTARTS, max_iterations: int = DEFAULT_SCAN_MAX_ITERATIONS,
               step_tolerance: float = DEFAULT_SCAN_STEP_TOLERANCE, kind: str = FULL_SPHERE) -> SearchSpace:
    """Search space used per scanned state."""
    return SearchSpace(kind, seeds=restarts, max_iterations=max_iterations, step_tolerance=step_tolerance)


def random_state_scan(trials: int, seed: int = DEFAULT_SEED, restarts: int = DEFAULT_SCAN_RESTARTS,
                      max_iterations: int = DEFAULT_SCAN_MAX_ITERATIONS,
                      step_tolerance: float = DEFAULT_SCAN_STEP_TOLERANCE,
                      states: Optional[Sequence[StateVector]] = None, kind: str = FULL_SPHERE,
                      progress: bool = True) -> ScanReport:
    """Optimize |Sv| for ``trials`` random pure states and report the largest value seen.

    Parameters
    ----------
    trials : int
        Number of states.
    seed : int
        Master seed; trial ``i`` uses ``SeedSequence(seed, spawn_key=(i,))`` for both its state and its restarts.
    restarts, max_iterations, step_tolerance : optional
        Per-state search budget.
    states : Optional[Sequence[StateVector]]
        Explicit states replacing the random draws, one per trial.
    kind : str
        full_sphere (default) or planar.
    progress : bool
        Show a progress bar.
    """
    if trials < 1:
        raise InputError(f"trials must be at least 1, got {trials}")
    if states is not None and len(states) != trials:
        raise InputError(f"Got {len(states)} explicit states for {trials} trials")

    space = scan_space(restarts, max_iterations, step_tolerance, kind)
    logger.info(f"Scanning {trials} states with seed {seed}")
    rows = [
        scan_trial(index, seed, space, states[index] if states is not None else None)
        for index in tqdm(range(trials), desc='Scanning random states', disable=not progress)
    ]
    return scan_report(rows)


def scan_report(rows: Sequence[dict]) -> ScanReport:
    """Assemble a ScanReport from per-trial rows."""
    frame = pd.DataFrame(list(rows)).sort_values('trial').reset_index(drop=True)
    return ScanReport(max_value=float(frame['best_value'].max()), trials=frame)
