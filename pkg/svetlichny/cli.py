"""Console script for svetlichny."""
import sys
from functools import wraps
from typing import List, Optional, Sequence, Tuple

import click
import numpy as np

from svetlichny.cache import cached_random_state_scan
from svetlichny.config import INPUT_STATE, INPUT_UNIFORM, RunConfig, load_config
from svetlichny.constants import CLASSICAL_BOUND, FIXED_MENU, FULL_SPHERE, NORM_TOLERANCE, PLANAR, QUANTUM_BOUND, \
    SETTING_NAMES, TERM_NAMES
from svetlichny.defaults import DEFAULT_SCAN_MAX_ITERATIONS, DEFAULT_SCAN_STEP_TOLERANCE
from svetlichny.exceptions import ConfigError, InputError, InvalidSettingError, SolverError, ZeroNormError
from svetlichny.hidden_models import enumerate_network_assignments, network_frame, polytope_membership, \
    svetlichny_polytope_vertices
from svetlichny.inequalities import CorrelatorTable, correlator_table_from_distributions, eval_s_probability_form, \
    eval_svetlichny, scenario_distributions, stats_from_distributions
from svetlichny.optimizer import SearchSpace, audit_fixed_menu, optimize_settings, random_state_scan
from svetlichny.quantum_core import Scenario
from svetlichny.sampler import ShotPlan, estimate, sample_outcomes
from svetlichny.utils import export_table, format_value, render_key_values

EXIT_CONFIG = 2
EXIT_SOLVER = 3

HUMAN_LABELS = {'identity_check': '8 - 2S == Sv_signed'}

# Scans default to a cheaper full-sphere budget than single optimizations
SCAN_BASE = RunConfig(space=FULL_SPHERE, max_iterations=DEFAULT_SCAN_MAX_ITERATIONS,
                      step_tolerance=DEFAULT_SCAN_STEP_TOLERANCE)
SCAN_KINDS = (FULL_SPHERE, PLANAR)

Items = List[Tuple[str, object]]


def emit(items: Items, machine: bool):
    """Print ``key: value`` lines, or a ``key = value`` block in machine mode."""
    if machine:
        click.echo(render_key_values(items))
    else:
        for key, value in items:
            click.echo(f"{HUMAN_LABELS.get(key, key)}: {format_value(value)}")


def handle_errors(func):
    """Map configuration and input failures to exit code 2, solver failures to 3."""
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ConfigError, InputError, InvalidSettingError, ZeroNormError, OSError) as error:
            click.echo(f"error: {error}", err=True)
            sys.exit(EXIT_CONFIG)
        except SolverError as error:
            click.echo(f"solver error: {error}", err=True)
            sys.exit(EXIT_SOLVER)
    return wrapper


def common_options(func):
    """Options shared by every analysis subcommand."""
    options = [
        click.option('-c', '--config', 'config_path', default=None, type=click.Path(),
                     help="Run configuration file of 'key = value' lines."),
        click.option('-m', '--machine', is_flag=True, default=False, help="Flag to print a 'key = value' block."),
        click.option('-s', '--seed', default=None, type=click.IntRange(0, 2 ** 64 - 1), help="Unsigned 64-bit seed."),
        click.option('-o', '--out', default=None, help="Output path for tables (csv, tsv or xlsx)."),
        click.option('--set', 'overrides', multiple=True, help="Override a configuration key, e.g. --set shots=1000."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _config(config_path: str, overrides: Sequence[str], seed: int, out: str,
            base: Optional[RunConfig] = None) -> RunConfig:
    return load_config(config_path, overrides, base=base, seed=seed, out=out)


def _scenario_items(scenario: Scenario) -> Items:
    return list(zip(SETTING_NAMES, scenario.labels))


def _table_items(table: CorrelatorTable, prefix: str = 'E') -> Items:
    return [(f"{prefix}({name})", value) for name, value in zip(TERM_NAMES, table.terms())]


@click.group(help=f"Svetlichny Nonlocality Toolkit Command Line Utilities on {sys.executable}")
@click.version_option()
def main():
    """Console script for svetlichny."""
    pass


@main.command()
@common_options
@handle_errors
def evaluate(config_path: str, machine: bool, seed: int, out: str, overrides: Tuple[str, ...]):
    """Evaluate Sv and the network sum S of a state under a scenario.

    Both forms are computed from the same Born-rule distributions, so the identity Sv = 8 - 2S is checked directly.
    """
    config = _config(config_path, overrides, seed, out)
    distributions = scenario_distributions(config.state, config.scenario)
    table = correlator_table_from_distributions(distributions)
    report = eval_svetlichny(table)
    s_value = eval_s_probability_form(stats_from_distributions(distributions))
    identity = abs(report.signed_value - (8.0 - 2.0 * s_value)) <= NORM_TOLERANCE

    items = _scenario_items(config.scenario) + _table_items(table) + [
        ('Sv_signed', report.signed_value),
        ('abs_Sv', report.absolute_value),
        ('S', s_value),
        ('classical_bound', CLASSICAL_BOUND),
        ('quantum_bound', QUANTUM_BOUND),
        ('violates_hybrid_bound', report.violates_hybrid_bound),
        ('identity_check', 'pass' if identity else 'fail'),
    ]
    emit(items, machine)

    if config.out:
        export_table(table.to_frame(), config.out)


@main.command()
@common_options
@handle_errors
def optimize(config_path: str, machine: bool, seed: int, out: str, overrides: Tuple[str, ...]):
    """Search settings maximizing |Sv| over the planar, full_sphere or fixed_menu space."""
    config = _config(config_path, overrides, seed, out)
    space = SearchSpace(config.space, menu=config.menu, seeds=config.seeds, max_iterations=config.max_iterations,
                        step_tolerance=config.step_tolerance)
    result = optimize_settings(config.state, space, seed=config.seed)

    parameter_key = {PLANAR: 'angles', FULL_SPHERE: 'polar_azimuth', FIXED_MENU: 'menu_indices'}[result.kind]
    items = [('space', result.kind), (parameter_key, result.parameters)] + _scenario_items(result.best_scenario) + [
        ('best_value', result.best_value),
        ('signed_value', result.signed_value),
        ('restart', result.restart),
        ('iterations', result.iterations),
        ('evaluated', result.evaluated),
        ('converged', result.converged),
    ]
    if not result.converged:
        items.append(('warning', f"not converged within {config.max_iterations} iterations; best value reported"))
    emit(items, machine)


@main.command()
@common_options
@handle_errors
def audit(config_path: str, machine: bool, seed: int, out: str, overrides: Tuple[str, ...]):
    """Decide whether a fixed measurement menu can certify genuine three-particle nonlocality."""
    config = _config(config_path, overrides, seed, out)
    if not config.menu:
        raise InputError("audit needs a nonempty menu, e.g. --set menu=x,z")
    report = audit_fixed_menu(config.state, config.menu)

    items = _scenario_items(report.best_scenario) + [
        ('best_value', report.best_value),
        ('signed_value', report.signed_value),
        ('evaluated', report.evaluated),
        ('verdict', report.verdict),
    ]
    emit(items, machine)


@main.command()
@common_options
@handle_errors
def polytope(config_path: str, machine: bool, seed: int, out: str, overrides: Tuple[str, ...]):
    """Test a correlator table for membership in the hybrid local/nonlocal polytope.

    The table comes from the configured state and scenario (input = state), the uniform vertex mixture
    (input = uniform), or a single vertex (input = vertex, selected by index with vertex = i).
    """
    config = _config(config_path, overrides, seed, out)
    vertices = svetlichny_polytope_vertices()

    if config.input == INPUT_STATE:
        target = correlator_table_from_distributions(scenario_distributions(config.state, config.scenario))
    elif config.input == INPUT_UNIFORM:
        target = CorrelatorTable(np.mean([vertex.values for vertex in vertices], axis=0))
    else:
        if config.vertex >= len(vertices):
            raise InputError(f"vertex index {config.vertex} out of range; the polytope has {len(vertices)} vertices")
        target = vertices[config.vertex]

    verdict = polytope_membership(target, tolerance=config.tolerance, method=config.method, vertices=vertices)

    items = [('input', config.input), ('vertices', len(vertices))] + _table_items(target) + [
        ('result', 'inside' if verdict.inside else 'outside'),
    ]
    if verdict.inside:
        support = [(int(i), float(w)) for i, w in enumerate(verdict.weights) if w > NORM_TOLERANCE]
        items.append(('weights', " ".join(f"{i}:{format_value(w)}" for i, w in support)))
    else:
        items.append(('violation_margin', verdict.violation_margin))
    emit(items, machine)


@main.command()
@common_options
@handle_errors
def sample(config_path: str, machine: bool, seed: int, out: str, overrides: Tuple[str, ...]):
    """Simulate finite-shot measurement runs and estimate Sv with its significance above 4."""
    config = _config(config_path, overrides, seed, out)
    record = sample_outcomes(config.state, ShotPlan(config.scenario, config.shots, config.seed))
    if config.out:
        record.write_csv(config.out)
    report = estimate(record)

    items = [('shots_per_triple', config.shots), ('seed', config.seed)]
    items += [(f"E({name})", value) for name, value in zip(TERM_NAMES, report.correlator_estimates)]
    items += [(f"se({name})", value) for name, value in zip(TERM_NAMES, report.standard_errors)]
    items += [
        ('sv_estimate', report.sv_estimate),
        ('sv_standard_error', report.sv_standard_error),
        ('sigma_above_4', report.sigma_above_4),
        ('p_value', report.p_value),
    ]
    if config.out:
        items.append(('csv', config.out))
    emit(items, machine)


@main.command()
@click.option('-m', '--machine', is_flag=True, default=False, help="Flag to print a 'key = value' block.")
@click.option('-o', '--out', default=None, help="Output path for the table of all assignments.")
@handle_errors
def network(machine: bool, out: str):
    """Count satisfied bonds of the frustrated network over all 64 assignments."""
    summary = enumerate_network_assignments()
    items = [
        ('min_satisfied', summary.min_satisfied),
        ('max_satisfied', summary.max_satisfied),
        ('assignments', summary.total),
    ]
    items += [(f"histogram[{bonds}]", count) for bonds, count in summary.histogram.items()]
    emit(items, machine)

    if out:
        export_table(network_frame(), out)


@main.command()
@common_options
@click.option('--no-cache', is_flag=True, default=False, help="Flag to skip the SQLite trial cache.")
@handle_errors
def scan(config_path: str, machine: bool, seed: int, out: str, overrides: Tuple[str, ...], no_cache: bool):
    """Optimize |Sv| for many random pure states and check the 4√2 bound."""
    config = _config(config_path, overrides, seed, out, base=SCAN_BASE)
    if config.space not in SCAN_KINDS:
        raise ConfigError(f"scans search {' or '.join(SCAN_KINDS)}, got '{config.space}'", field='space')

    budget = dict(seed=config.seed, restarts=config.restarts, max_iterations=config.max_iterations,
                  step_tolerance=config.step_tolerance, kind=config.space)
    if no_cache:
        report = random_state_scan(config.trials, **budget)
    else:
        report = cached_random_state_scan(config.trials, **budget)

    items = [
        ('trials', config.trials),
        ('seed', config.seed),
        ('restarts', config.restarts),
        ('space', config.space),
        ('max_iterations', config.max_iterations),
        ('step_tolerance', config.step_tolerance),
        ('max_value', report.max_value),
        ('quantum_bound', QUANTUM_BOUND),
        ('bound_respected', report.bound_respected),
    ]
    emit(items, machine)

    if config.out:
        export_table(report.trials, config.out)


if __name__ == "__main__":
    sys.exit(main())
