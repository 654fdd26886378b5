import json
import logging

from motherbody.config import get_settings, reset_settings, setup_logging
from motherbody.errors import (
    BranchCutHit,
    InvalidParams,
    MotherbodyError,
    NumericalError,
    ParseError,
    PrecisionExhausted,
    ValidationError,
)
from motherbody.export import dumps, format_number, to_plain, validate_payload
from motherbody.report import ValidationReport


def test_defaults(clean_env):
    settings = get_settings()
    assert settings.solver.tol == 1e-12
    assert settings.quadrature.mu2_nodes == 48
    assert settings.runtime.threads == 1


def test_environment_overrides(clean_env):
    clean_env.setenv('MOTHERBODY_THREADS', '4')
    clean_env.setenv('MOTHERBODY_MU1_NODES', '512')
    clean_env.setenv('MOTHERBODY_LOG_LEVEL', 'debug')
    settings = reset_settings()
    assert settings.runtime.threads == 4
    assert settings.quadrature.mu1_nodes == 512
    assert settings.runtime.log_level == 'DEBUG'


def test_bad_values_fall_back(clean_env):
    clean_env.setenv('MOTHERBODY_THREADS', 'many')
    clean_env.setenv('MOTHERBODY_TOL', 'tight')
    settings = reset_settings()
    assert settings.runtime.threads == 1
    assert settings.solver.tol == 1e-12


def test_setup_logging_level(clean_env):
    setup_logging('warning')
    assert logging.getLogger().level == logging.WARNING
    setup_logging('info')


def test_report_merge_prefixes_names():
    inner = ValidationReport('inner')
    inner.add_check('ok', True, 0.1, 1.0)
    assert not inner.add_check('bad', False, 2.0, 1.0)
    outer = ValidationReport('outer').merge(inner)
    assert [c.name for c in outer.checks] == ['inner.ok', 'inner.bad']
    assert outer.errors == ['inner.bad failed: value=2, threshold=1']
    assert not outer.is_valid()
    assert outer.check('inner.ok').passed


def test_report_serializes():
    report = ValidationReport('r')
    report.add_check('x', True, 1.5, details_are='kept')
    data = report.to_dict()
    assert data['valid'] is True
    assert data['checks'][0]['details'] == {'details_are': 'kept'}
    assert json.loads(report.checks[0].to_json())['value'] == 1.5


def test_error_exit_codes():
    assert ParseError('x').exit_code == 2
    assert InvalidParams('x').exit_code == 2
    assert BranchCutHit('x').exit_code == 3
    assert PrecisionExhausted('x').exit_code == 3
    assert issubclass(ParseError, ValidationError)
    assert issubclass(BranchCutHit, NumericalError)
    assert issubclass(NumericalError, MotherbodyError)


def test_error_to_dict():
    err = BranchCutHit('on the cut', z=0.5 + 0j, sheet=1)
    data = err.to_dict()
    assert data['error'] == 'BranchCutHit'
    assert data['exit_code'] == 3
    assert data['context'] == {'z': [0.5, 0.0], 'sheet': 1}


def test_number_formatting():
    assert format_number(0.1) == '0.10000000000000001'
    assert format_number(3) == '3'
    assert to_plain({'z': 1 + 2j, 'bad': float('inf')}) == {'z': [1.0, 2.0], 'bad': None}
    assert dumps({'b': 1, 'a': 2}) == '{\n  "a": 2,\n  "b": 1\n}\n'


def test_error_payload_matches_schema():
    validate_payload(BranchCutHit('on the cut', z=0.5 + 0j).to_dict(), 'error')
    validate_payload(ParseError('missing required --a', flag='--a').to_dict(), 'error')


def test_json_floats_use_csv_digits():
    assert dumps({'x': 0.1}) == '{\n  "x": 0.10000000000000001\n}\n'
    assert dumps([2.0, -3.0, 2.0 ** -70]) == '[\n  2.0,\n  -3.0,\n  8.4703294725430034e-22\n]\n'
    assert json.loads(dumps({'x': 0.1}))['x'] == 0.1
    assert format_number(0.1) in dumps({'x': 0.1})


def test_environment_flags(clean_env):
    clean_env.setenv('MOTHERBODY_STRICT', 'Yes')
    clean_env.setenv('MOTHERBODY_POLISH_STEPS', '7')
    clean_env.setenv('MOTHERBODY_TAIL_FACTOR', '250')
    settings = reset_settings()
    assert settings.runtime.strict is True
    assert settings.solver.polish_steps == 7
    assert settings.quadrature.tail_factor == 250.0
    clean_env.setenv('MOTHERBODY_STRICT', 'sometimes')
    assert reset_settings().runtime.strict is False


def test_report_warnings_do_not_invalidate():
    inner = ValidationReport('inner')
    inner.add_warning('drift')
    outer = ValidationReport('outer').merge(inner)
    assert outer.is_valid()
    assert outer.has_warnings()
    assert outer.to_dict()['warnings'] == ['inner.drift']
