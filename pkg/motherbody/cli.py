"""
Command line entry point.

Every command builds a ``RunConfig`` (JSON config file first, flags on top),
runs one pipeline and writes its artifacts to ``--out``. Exit codes: 0 on
success, 2 for invalid input, 3 for numerical failures or failed acceptance
checks; failures print a JSON error report on stdout.
"""

import json
import math
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import click
from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError, field_validator

from . import asympt, conformal, droplet, equilibrium, export, measures, model, oracle, spectral
from .config import get_settings, setup_logging
from .errors import MotherbodyError, NumericalError, ParseError
from .model import ModelParams
from .report import ValidationReport

logger = logging.getLogger(__name__)

DEFAULT_LADDER = (8, 16, 32, 64)
CROSS_ORACLE_SIZES = ((4, 40), (6, 12), (10, 20))
SMALL_T = (0.05, 0.02, 0.01)
SCALING_FACTOR = 1.5
QUADRATURE_MOMENT_TOL = 1e-6


class Command(str, Enum):
    PHASE = 'phase'
    DROPLET = 'droplet'
    SPECTRAL = 'spectral'
    MEASURES = 'measures'
    ORACLE = 'oracle'
    VERIFY_ALL = 'verify-all'


class OutputFormat(str, Enum):
    CSV = 'csv'
    JSON = 'json'


NEEDS_T = {Command.DROPLET, Command.SPECTRAL, Command.MEASURES, Command.VERIFY_ALL}


class RunConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    command: Command
    a: float = Field(..., gt=0, description="Charge position, charges at +-ia")
    c: float = Field(..., gt=0, description="Charge strength")
    t: Optional[float] = Field(None, gt=0, description="Total mass / time parameter")
    n: Optional[int] = Field(None, ge=0, description="Polynomial degree")
    N: Optional[int] = Field(None, ge=1, description="Weight scaling")
    samples: int = Field(256, ge=64, description="Boundary samples")
    ladder: List[int] = Field(default_factory=lambda: list(DEFAULT_LADDER))
    route: str = Field(oracle.MOMENT, pattern='^(kernel|moment)$')
    merge: bool = False
    potential: bool = False
    cell_resolution: Optional[int] = Field(None, ge=50, description="Cells across the droplet; default targets 10^6 cells inside")
    out: Path = Path('out')
    format: OutputFormat = OutputFormat.CSV

    @field_validator('ladder', mode='before')
    @classmethod
    def split_ladder(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [int(part) for part in value.split(',') if part.strip()]
        return value

    @field_validator('ladder')
    @classmethod
    def positive_ladder(cls, value: List[int]) -> List[int]:
        if any(n < 1 for n in value):
            raise ValueError('ladder sizes must be positive')
        return sorted(set(value))

    @property
    def params(self) -> ModelParams:
        return ModelParams(self.a, self.c, self.t)


def load_config(path: Optional[Path], flags: Dict[str, Any]) -> RunConfig:
    """
    File values first, then every flag that was given (not None).

    Raises:
        ParseError: unreadable file, unknown keys, missing or invalid values
    """
    data: Dict[str, Any] = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text(encoding='utf-8'))
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}: line {e.lineno}: {e.msg}", path=str(path), line=e.lineno) from e
        except OSError as e:
            raise ParseError(f"cannot read config {path}: {e}", path=str(path)) from e
        if not isinstance(data, dict):
            raise ParseError(f"{path}: top level must be an object", path=str(path))
    data.update({key: value for key, value in flags.items() if value is not None})

    try:
        config = RunConfig.model_validate(data)
    except PydanticValidationError as e:
        first = e.errors()[0]
        field = '.'.join(str(part) for part in first['loc']) or 'config'
        if first['type'] == 'missing':
            raise ParseError(f"missing required --{field}", flag=f"--{field}") from e
        raise ParseError(f"--{field}: {first['msg']}", flag=f"--{field}") from e

    if config.command in NEEDS_T and config.t is None:
        raise ParseError(f"missing required --t for {config.command.value}", flag='--t')
    if config.command is Command.ORACLE and (config.n is None or config.N is None):
        raise ParseError("oracle needs --n and --N", flag='--n' if config.n is None else '--N')
    return config


# Pipelines

def _write_table(config: RunConfig, name: str, columns: List[str], rows: List[List[Any]]) -> Path:
    if config.format is OutputFormat.CSV:
        return export.write_csv(config.out / f'{name}.csv', columns, rows)
    return export.write_json(config.out / f'{name}.json', {'columns': columns, 'rows': rows})


def _write_records(config: RunConfig, name: str, records: List[Dict[str, Any]], columns: List[str]) -> Path:
    if config.format is OutputFormat.CSV:
        return export.write_records(config.out / f'{name}.csv', records, columns)
    return _write_table(config, name, columns, [[row[k] for k in columns] for row in records])


def run_phase(config: RunConfig) -> Dict[str, Any]:
    a, c = config.a, config.c
    constants = model.phase_constants(a, c)
    payload: Dict[str, Any] = {
        'a': a,
        'c': c,
        't_c': constants.t_c,
        't_star': constants.t_star,
        't_star_upper_bound': model.t_star_upper_bound(a, c),
        'quintic_coeffs': list(constants.quintic_coeffs),
        't': config.t,
        'phase_one': None if config.t is None else config.t < constants.t_star,
        'merge': None,
    }
    if config.merge:
        estimate = conformal.gap_merging_t_star(a, c)
        payload['merge'] = {
            't_merge': estimate.t_merge,
            't_extrapolated': estimate.t_extrapolated,
            'relative_difference': abs(estimate.t_extrapolated - constants.t_star) / constants.t_star,
        }
    export.write_json(config.out / 'phase.json', payload, schema='phase')
    return payload


def run_droplet(config: RunConfig) -> Dict[str, Any]:
    cd = conformal.solve_map(config.params)
    boundary = conformal.droplet_boundary(cd, config.samples)
    payload: Dict[str, Any] = {
        'a': config.a, 'c': config.c, 't': config.t,
        'rho': cd.rho, 'kappa': cd.kappa, 'alpha': cd.alpha,
        'w1': cd.w1, 'w2': cd.w2, 'x1': cd.x1, 'x2': cd.x2,
        'residual': cd.residual,
        'samples': config.samples,
        'area': boundary.area,
        'moments': list(boundary.harmonic_moments),
        'closed_form_moments': list(boundary.closed_form_moments),
        'quadrature_moments': list(boundary.quadrature_moments),
        'schwarz_error': conformal.schwarz_check(cd, config.samples),
        'potential_check': None,
    }
    if config.potential:
        ms = measures.build_measures(cd)
        payload['potential_check'] = droplet.droplet_potential_check(cd, ms, resolution=config.cell_resolution).to_dict()
    _write_table(
        config, 'boundary', ['theta', 're_z', 'im_z'],
        [[th, z.real, z.imag] for th, z in zip(boundary.theta, boundary.samples)],
    )
    export.write_json(config.out / 'droplet.json', payload, schema='droplet')
    return payload


def run_spectral(config: RunConfig) -> Dict[str, Any]:
    cd = conformal.solve_map(config.params)
    sc = spectral.build_curve(cd)
    disc = spectral.discriminant(sc)
    zs = spectral.zs_critical_values(sc)
    report = spectral.verify_curve(sc).merge(spectral.discriminant_pattern(sc, disc))
    payload = {
        'a': config.a, 'c': config.c, 't': config.t,
        'C1': sc.C1, 'C2': sc.C2, 'b0': sc.b0, 'b1': sc.b1, 'b2': sc.b2,
        'discriminant': {
            'degree': disc.degree,
            'coeffs': [float(v) for v in disc.coeffs],
            'clusters': [{'root': root, 'multiplicity': mult} for root, mult in disc.clusters],
        },
        'zs_critical': {'s1': zs.s1, 'p1': zs.p1, 's2': zs.s2, 'p2': zs.p2},
        'report': report.to_dict(),
    }
    export.write_json(config.out / 'spectral.json', payload, schema='spectral')
    return payload


def _measures_report(ms: measures.Measures) -> Tuple[ValidationReport, equilibrium.EquilibriumData]:
    report = ValidationReport('measures')
    report.merge(measures.measure_checks(ms))
    report.merge(measures.cauchy_checks(ms))
    variational, _ = equilibrium.variational_check(ms)
    report.merge(variational)
    eq = equilibrium.contour_u_and_gamma(ms)
    report.add_check('gamma margin', eq.min_margin > 0, eq.min_margin, 0.0, construction=eq.construction)
    increasing, smallest = equilibrium.imaginary_axis_increasing(ms)
    report.add_check('u increasing on [0, ia]', increasing, smallest, 0.0)
    report.merge(equilibrium.phi_sign_checks(ms, eq))
    return report, eq


def run_measures(config: RunConfig) -> Dict[str, Any]:
    cd = conformal.solve_map(config.params)
    ms = measures.build_measures(cd)
    report, eq = _measures_report(ms)

    _write_table(config, 'mu1', ['x', 'density'], [[x, v] for x, v in zip(ms.mu1.nodes, ms.mu1.values)])
    _write_table(config, 'mu2', ['x', 'density'], [[x, v] for x, v in zip(ms.mu2.nodes, ms.mu2.values)])
    _write_table(config, 'gamma', ['re', 'im'], [[z.real, z.imag] for z in eq.gamma_samples])
    payload = dict(report.to_dict(), params={'a': config.a, 'c': config.c, 't': config.t})
    export.write_json(config.out / 'measures.json', payload, schema='acceptance')
    if not report.is_valid():
        raise NumericalError(f"measure checks failed: {'; '.join(report.errors)}", failed=len(report.errors))
    return payload


def run_oracle(config: RunConfig) -> Dict[str, Any]:
    op = oracle.OracleParams.from_floats(config.n, config.N, config.a, config.c)
    poly = oracle.solve(op, config.route)
    payload = poly.to_dict()
    export.write_json(config.out / f'polynomial_n{op.n}_N{op.N}.json', payload, schema='polynomial')

    constants = model.phase_constants(config.a, config.c)
    if 0 < op.t < constants.t_star and poly.zeros:
        cd = conformal.solve_map(ModelParams(config.a, config.c, op.t))
        stats = oracle.zero_counting_measure(poly.zeros, cd)
        logger.info(f"🎯 zeros n={op.n}: KS={stats.ks:.5f}, delta={stats.delta:.3e}, max |Im|={stats.max_imag:.3e}")
    return payload


def _section(report: ValidationReport, name: str, fn: Callable[[], ValidationReport]) -> None:
    """Run one acceptance section; a numerical failure becomes a failed check"""
    try:
        report.merge(fn())
    except NumericalError as e:
        logger.error(f"❌ {name}: {e.detail}")
        report.add_check(f"{name}.completed", False, reason=e.detail)


def acceptance_outcome(report: ValidationReport) -> None:
    """
    Log the tally and warnings of an acceptance report.

    Raises:
        NumericalError: failed checks, or any warning when MOTHERBODY_STRICT is set
    """
    logger.info(f"🏁 acceptance: {sum(r.passed for r in report.checks)}/{len(report.checks)} checks passed")
    if report.has_warnings():
        for msg in report.warnings:
            logger.warning(f"⚠️ {msg}")
        if get_settings().runtime.strict:
            raise NumericalError(f"{len(report.warnings)} acceptance warnings in strict mode", warnings=len(report.warnings))
    if not report.is_valid():
        raise NumericalError(f"{len(report.errors)} acceptance checks failed", failed=len(report.errors))


def run_verify_all(config: RunConfig) -> Dict[str, Any]:
    params = config.params
    a, c, t = params.a, params.c, params.t
    constants = model.require_phase_one(params)
    cd = conformal.solve_map(params)
    report = ValidationReport('acceptance')

    def conformal_section() -> ValidationReport:
        section = ValidationReport('conformal')
        section.add_check('map residual', cd.residual < 1e-12, cd.residual, 1e-12)
        boundary = conformal.droplet_boundary(cd, config.samples)
        area_err = abs(boundary.area - math.pi * t)
        section.add_check('area', area_err < 1e-8, area_err, 1e-8)
        moment_err = max(abs(p - q) for p, q in zip(boundary.harmonic_moments, boundary.closed_form_moments))
        section.add_check('harmonic moments', moment_err < 1e-10, moment_err, 1e-10)
        drift = max(abs(p - q) for p, q in zip(boundary.quadrature_moments, boundary.harmonic_moments))
        if drift > QUADRATURE_MOMENT_TOL:
            section.add_warning(f"boundary quadrature moments drift by {drift:.3e} from the residue values")
        section.merge(conformal.cut_curve_check(cd, config.samples))
        schwarz = conformal.schwarz_check(cd, config.samples)
        section.add_check('Schwarz function', schwarz < 1e-8, schwarz, 1e-8)
        return section

    def spectral_section() -> ValidationReport:
        sc = spectral.build_curve(cd)
        section = spectral.verify_curve(sc).merge(spectral.discriminant_pattern(sc, spectral.discriminant(sc)))
        return section.merge(spectral.scaling_check(params, SCALING_FACTOR))

    def small_t_section() -> ValidationReport:
        section = ValidationReport('small t')
        errors = measures.small_t_errors(a, c, SMALL_T)
        values = [errors[s] for s in SMALL_T]
        section.add_check('error decreases as t -> 0', all(q < p for p, q in zip(values, values[1:])), values[-1])
        section.add_check('error at smallest t', values[-1] < 0.02, values[-1], 0.02)
        return section

    def phase_section() -> ValidationReport:
        section = ValidationReport('phase boundary')
        estimate = conformal.gap_merging_t_star(a, c)
        rel = abs(estimate.t_extrapolated - constants.t_star) / constants.t_star
        section.add_check('gap merging t*', rel < 1e-3, rel, 1e-3)
        return section

    def oracle_section() -> ValidationReport:
        section = ValidationReport('cross oracle')
        for n, N in CROSS_ORACLE_SIZES:
            section.merge(oracle.cross_check(oracle.OracleParams.from_floats(n, N, a, c)))
        return section

    def measures_section() -> ValidationReport:
        report_ms, _ = _measures_report(measures.build_measures(cd))
        return report_ms

    ladder_holder: Dict[str, asympt.LadderResult] = {}

    def asymptotics_section() -> ValidationReport:
        result = asympt.ladder(params, config.ladder)
        ladder_holder['result'] = result
        return asympt.asymptotics_report(result).merge(asympt.zero_report(result))

    _section(report, 'conformal', conformal_section)
    _section(report, 'spectral', spectral_section)
    _section(report, 'measures', measures_section)
    _section(report, 'small t', small_t_section)
    _section(report, 'phase boundary', phase_section)
    _section(report, 'cross oracle', oracle_section)
    _section(report, 'asymptotics', asymptotics_section)

    if 'result' in ladder_holder:
        result = ladder_holder['result']
        _write_records(config, 'errors', result.error_table(), ['n', 'N', 're_z', 'im_z', 'log_err_re', 'log_err_im'])
        _write_records(config, 'zeros', result.zero_table(), ['n', 'N', 'ks', 'delta', 'max_imag'])

    payload = dict(report.to_dict(), params={'a': a, 'c': c, 't': t, 'ladder': list(config.ladder)})
    export.write_json(config.out / 'acceptance.json', payload, schema='acceptance')
    acceptance_outcome(report)
    return payload


def _echo_error(payload: Dict[str, Any]) -> None:
    plain = export.to_plain(payload)
    export.validate_payload(plain, 'error')
    click.echo(export.dumps(plain), nl=False)


PIPELINES: Dict[Command, Callable[[RunConfig], Dict[str, Any]]] = {
    Command.PHASE: run_phase,
    Command.DROPLET: run_droplet,
    Command.SPECTRAL: run_spectral,
    Command.MEASURES: run_measures,
    Command.ORACLE: run_oracle,
    Command.VERIFY_ALL: run_verify_all,
}


def run(config: RunConfig) -> int:
    """Execute one pipeline and map failures to exit codes"""
    try:
        logger.info(f"🚀 {config.command.value}: a={config.a} c={config.c} t={config.t}")
        summary = PIPELINES[config.command](config)
    except MotherbodyError as e:
        logger.error(f"❌ {type(e).__name__}: {e.detail}")
        _echo_error(e.to_dict())
        return e.exit_code
    except Exception as e:
        logger.exception("Unexpected failure")
        _echo_error({'error': type(e).__name__, 'detail': str(e), 'exit_code': 3})
        return 3
    if config.command in (Command.PHASE, Command.ORACLE):
        click.echo(export.dumps(summary), nl=False)
    logger.info(f"✅ {config.command.value} done, artifacts in {config.out}")
    return 0


# click surface

def _invoke(command: Command, config_path: Optional[Path], flags: Dict[str, Any]) -> None:
    try:
        config = load_config(config_path, dict(flags, command=command.value))
    except ParseError as e:
        logger.error(f"❌ {e.detail}")
        _echo_error(e.to_dict())
        raise SystemExit(e.exit_code)
    raise SystemExit(run(config))


def model_options(fn):
    options = [
        click.option('--a', 'a', type=float, default=None, help='Charge position (charges at ±ia)'),
        click.option('--c', 'c', type=float, default=None, help='Charge strength'),
        click.option('--t', 't', type=float, default=None, help='Time parameter'),
        click.option('--config', 'config_path', type=click.Path(path_type=Path, dir_okay=False), default=None,
                     help='JSON config file; flags override its values'),
        click.option('--out', type=click.Path(path_type=Path, file_okay=False), default=None, help='Output directory'),
        click.option('--format', 'fmt', type=click.Choice(['csv', 'json']), default=None, help='Format of tabular artifacts'),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _flags(**values: Any) -> Dict[str, Any]:
    # unset boolean flags leave the config file value alone
    values = {key: (None if value is False else value) for key, value in values.items()}
    fmt = values.pop("fmt", None)
    if fmt is not None:
        values['format'] = fmt
    return values


@click.group()
@click.option('--log-level', default=None, help='Logging level (default MOTHERBODY_LOG_LEVEL or INFO)')
def main(log_level: Optional[str]):
    """Droplet, spectral curve, measures and orthogonal polynomials for two point charges."""
    setup_logging(log_level)
    logger.debug(f"settings: {get_settings()}")


@main.command()
@model_options
@click.option('--merge', is_flag=True, default=False, help='Also estimate t* from gap merging')
def phase(config_path, **kwargs):
    """Phase constants t* and t_c."""
    _invoke(Command.PHASE, config_path, _flags(**kwargs))


@main.command('droplet')
@model_options
@click.option('--samples', type=int, default=None, help='Boundary samples')
@click.option('--potential', is_flag=True, default=False, help='Also run the area potential check')
@click.option('--cell-resolution', 'cell_resolution', type=int, default=None, help='Cells across the droplet')
def droplet_command(config_path, **kwargs):
    """Conformal map, boundary samples, area and harmonic moments."""
    _invoke(Command.DROPLET, config_path, _flags(**kwargs))


@main.command('spectral')
@model_options
def spectral_command(config_path, **kwargs):
    """Spectral curve constants, nodes and discriminant."""
    _invoke(Command.SPECTRAL, config_path, _flags(**kwargs))


@main.command('measures')
@model_options
def measures_command(config_path, **kwargs):
    """Densities of mu1 and mu2, variational checks and the contour gamma."""
    _invoke(Command.MEASURES, config_path, _flags(**kwargs))


@main.command('oracle')
@model_options
@click.option('--n', 'n', type=int, default=None, help='Degree')
@click.option('--N', 'N', type=int, default=None, help='Scaling N (cN must be an integer)')
@click.option('--route', type=click.Choice(['kernel', 'moment']), default=None, help='Construction route')
def oracle_command(config_path, **kwargs):
    """Exact orthogonal polynomial P_{n,N} with zeros."""
    _invoke(Command.ORACLE, config_path, _flags(**kwargs))


@main.command('verify-all')
@model_options
@click.option('--samples', type=int, default=None, help='Boundary samples')
@click.option('--ladder', type=str, default=None, help='Comma separated degrees, e.g. 8,16,32')
def verify_all(config_path, **kwargs):
    """Full acceptance suite; writes acceptance.json."""
    _invoke(Command.VERIFY_ALL, config_path, _flags(**kwargs))


if __name__ == '__main__':
    main()
