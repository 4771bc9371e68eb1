"""Implements command line."""

import logging
import os
from contextlib import contextmanager

import click
import yaml
from click_loglevel import LogLevel
from importlib_metadata import distribution
from tabulate import tabulate

from soliton_forge import DEFAULT_CONFIG_PATH, DEFAULT_OUTPUT_PATH, NaturalOrderGroup
from soliton_forge.common import ForgeError, ValidationFailed
from soliton_forge.config import ForgeConfig, load_config
from soliton_forge.emitter import read_profile, write_curves, write_profile, write_psi, write_report
from soliton_forge.identities import flux_functional, perturb, relative_flux
from soliton_forge.model import VerificationReport
from soliton_forge.psi import extract_psi
from soliton_forge.solver import solve_bryant
from soliton_forge.suite import prepare_suite, reference_profile, run_suite

LOG_FORMAT = '%(asctime)s %(name)s %(levelname)-8s %(message)s'
logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_ERROR = 2

OVERRIDES = [
    click.option('--rel-tol', 'rel_tol', type=float, help='Solver relative tolerance.'),
    click.option('--abs-tol', 'abs_tol', type=float, help='Solver absolute tolerance.'),
    click.option('--seed-radius', 'seed_radius', type=float, help='Radius where the origin series hands over.'),
    click.option('--stop-scalar-curvature', 'stop_scalar_curvature', type=float, help='Stop once R falls below.'),
    click.option('--max-radius', 'max_radius', type=float, help='Hard stop for the integration.'),
    click.option('--psi-nodes', 'psi_nodes', type=int, help='Number of s nodes for psi.'),
    click.option('--workers', 'workers', type=int, help='Threads running the checks.'),
]


def overrides(func):
    """Flags that override config file values."""
    for option in reversed(OVERRIDES):
        func = option(func)
    return func


@contextmanager
def exit_codes(ctx):
    """Map errors onto exit codes: 1 for a failed verification, 2 for everything else."""
    try:
        yield
    except ValidationFailed as exc:
        logger.error(str(exc))
        ctx.exit(EXIT_FAIL)
    except (ForgeError, OSError) as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        ctx.exit(EXIT_ERROR)


def _config(ctx, **values) -> ForgeConfig:
    """Defaults < config file < flags."""
    return load_config(ctx.obj['config_path'], explicit=ctx.obj['explicit_config'], **values)


def _output(ctx, path, file_name) -> str:
    return path or os.path.join(ctx.obj['output_path'], file_name)


def _profile(config: ForgeConfig, profile_path: str):
    """Read the profile if a path is given, otherwise solve."""
    if profile_path:
        return read_profile(profile_path)
    return solve_bryant(config.solver_config())


@click.group(cls=NaturalOrderGroup)
@click.option("-l", "--log-level", type=LogLevel(), default=logging.INFO)
@click.option('--output_path', default=lambda: os.environ.get("SOLITON_FORGE_OUTPUT_PATH", DEFAULT_OUTPUT_PATH),
              help=f'Output path for files. Read from SOLITON_FORGE_OUTPUT_PATH [default: {DEFAULT_OUTPUT_PATH}]',)
@click.option('--config_path', default=None,
              help=f'Path to key = value config file. Read from SOLITON_FORGE_CONFIG_PATH [default: {DEFAULT_CONFIG_PATH}]',)
@click.pass_context
def cli(ctx, log_level, output_path, config_path):
    """Build the Bryant soliton and verify the identities along it."""
    # set root logging
    logging.basicConfig(level=log_level, format=LOG_FORMAT)
    ctx.ensure_object(dict)
    ctx.obj['log_level'] = log_level
    if not os.path.isdir(output_path):
        logger.debug(f"{output_path} does not exist")
    ctx.obj['output_path'] = output_path
    environment_path = os.environ.get("SOLITON_FORGE_CONFIG_PATH")
    ctx.obj['explicit_config'] = bool(config_path or environment_path)
    ctx.obj['config_path'] = config_path or environment_path or DEFAULT_CONFIG_PATH


@cli.command()
def version():
    """Print the version."""
    dist = distribution('soliton_forge')
    print(dist.version)


@cli.command()
@click.option('--format', 'format_', type=click.Choice(['json', 'yaml'], case_sensitive=False), default='json',
              show_default=True)
@overrides
@click.pass_context
def config(ctx, format_, **values):
    """Print the effective config."""
    with exit_codes(ctx):
        config_ = _config(ctx, **values)
        if format_ == 'yaml':
            print(yaml.safe_dump(config_.dict(), sort_keys=False), end='')
        else:
            print(config_.json(indent=2))


@cli.command()
@click.option('--profile_path', default=None, help='Where to write the profile CSV [default: <output_path>/profile.csv]')
@overrides
@click.pass_context
def solve(ctx, profile_path, **values):
    """Integrate the Bryant soliton, write the profile CSV."""
    with exit_codes(ctx):
        profile = solve_bryant(_config(ctx, **values).solver_config())
        path = write_profile(profile, _output(ctx, profile_path, 'profile.csv'))
        print(f"{path}: {len(profile.r)} nodes, r in [{profile.r[0]:.6g}, {profile.r[-1]:.6g}]")


@cli.command()
@click.option('--profile_path', '--profile', 'profile_path', default=None,
              help='Exact soliton profile CSV [default: solve]')
@click.option('--psi_path', default=None, help='Where to write the psi CSV [default: <output_path>/psi.csv]')
@overrides
@click.pass_context
def psi(ctx, profile_path, psi_path, **values):
    """Extract psi and u from an exact profile, write the psi CSV."""
    with exit_codes(ctx):
        config_ = _config(ctx, **values)
        psi_ = extract_psi(_profile(config_, profile_path), config_.s_grid(), rel_tol=config_.rel_tol)
        path = write_psi(psi_, _output(ctx, psi_path, 'psi.csv'))
        print(f"{path}: {len(psi_.s_nodes)} nodes, psi(1) ~ {psi_.limit_at_one:.12f}")


def _summary(report: VerificationReport) -> str:
    rows = [[check.name, check.max_abs, check.rms, check.n_samples, check.threshold,
             'pass' if check.passed else 'FAIL'] for check in report.checks]
    table = tabulate(rows, headers=['id', 'max_abs', 'rms', 'n', 'threshold', 'result'], floatfmt='.3e')
    return f"{table}\n{'PASS' if report.passed else 'FAIL'}"


@cli.command()
@click.option('--profile_path', '--profile', 'profile_path', default=None,
              help='Profile CSV to verify [default: solve]')
@click.option('--report_path', default=None, help='Where to write the report [default: <output_path>/report.json]')
@click.option('--plot_dir', default=None, help='Also write plot-ready CSV files here.')
@overrides
@click.pass_context
def verify(ctx, profile_path, report_path, plot_dir, **values):
    """Run every check, write the report JSON, print a summary."""
    report_path = _output(ctx, report_path, 'report.json')
    with exit_codes(ctx):
        config_ = _config(ctx, **values)
        profile = read_profile(profile_path) if profile_path else None
        try:
            data = prepare_suite(config_, profile)
            report = run_suite(config_, data=data)
        except ForgeError as exc:
            write_report(exc.report or VerificationReport(config=config_.dict(), checks=[], passed=False), report_path)
            raise
        write_report(report, report_path)
        if plot_dir:
            write_curves(data.profile, data.psi, plot_dir)
        print(_summary(report))
        ctx.exit(EXIT_PASS if report.passed else EXIT_FAIL)


@cli.command('perturb')
@click.option('--profile_path', '--profile', 'profile_path', default=None,
              help='Profile CSV to perturb [default: solve]')
@click.option('--perturbed_path', default=None, help='Where to write [default: <output_path>/perturbed.csv]')
@click.option('--target', type=click.Choice(['df', 'phi']), default=None, help='Field to multiply by the bump.')
@click.option('--amplitude', type=float, default=None, help='Bump amplitude.')
@click.option('--center', type=float, default=None, help='Bump center.')
@click.option('--width', type=float, default=None, help='Bump width.')
@overrides
@click.pass_context
def perturb_(ctx, profile_path, perturbed_path, target, amplitude, center, width, **values):
    """Multiply one field by a Gaussian bump, write the perturbed profile CSV."""
    with exit_codes(ctx):
        config_ = _config(ctx, perturbation_target=target, perturbation_amplitude=amplitude,
                          perturbation_center=center, perturbation_width=width, **values)
        perturbed = perturb(_profile(config_, profile_path), config_.perturbation_spec())
        path = write_profile(perturbed, _output(ctx, perturbed_path, 'perturbed.csv'))
        print(f"{path}: {len(perturbed.r)} nodes, {config_.perturbation_target} bumped by "
              f"{config_.perturbation_amplitude} at r={config_.perturbation_center}")


def _radii(ctx, param, value):
    try:
        radii = [float(item) for item in value.split(',') if item.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma separated numbers, got {value}")
    if not radii or min(radii) <= 0:
        raise click.BadParameter("radii must be positive")
    return radii


@cli.command()
@click.option('--radii', default='1,2,4,8', show_default=True, callback=_radii, help='Comma separated radii.')
@click.option('--profile_path', '--profile', 'profile_path', default=None,
              help='Profile CSV [default: solve]')
@overrides
@click.pass_context
def flux(ctx, radii, profile_path, **values):
    """Print the weighted flux of X through spheres."""
    with exit_codes(ctx):
        config_ = _config(ctx, **values)
        profile = _profile(config_, profile_path)
        psi_ = extract_psi(reference_profile(config_, profile), config_.s_grid(), rel_tol=config_.rel_tol)
        rows = [[r, flux_functional(profile, psi_, r), relative_flux(profile, psi_, r)] for r in radii]
        print(tabulate(rows, headers=['r', 'flux', 'relative'], floatfmt='.6e'))
