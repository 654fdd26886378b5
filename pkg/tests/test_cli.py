import csv
import json

import pytest
from click.testing import CliRunner

from motherbody.cli import Command, RunConfig, acceptance_outcome, load_config, main
from motherbody.config import reset_settings
from motherbody.errors import NoConvergence, NumericalError, ParseError
from motherbody.export import validate_payload
from motherbody.report import ValidationReport


@pytest.fixture
def runner():
    return CliRunner()


def read_json(path):
    return json.loads(path.read_text(encoding='utf-8'))


def test_phase(runner, tmp_path):
    result = runner.invoke(main, ['phase', '--a', '2', '--c', '1', '--out', str(tmp_path)])
    assert result.exit_code == 0, result.output
    payload = read_json(tmp_path / 'phase.json')
    assert payload['t_c'] == pytest.approx(7.0)
    assert payload['t_star'] == pytest.approx(0.1911, abs=1e-3)
    assert payload['merge'] is None
    validate_payload(payload, 'phase')


def test_missing_flag_is_a_parse_error(runner, tmp_path):
    result = runner.invoke(main, ['phase', '--c', '1', '--out', str(tmp_path)])
    assert result.exit_code == 2
    assert 'ParseError' in result.output
    assert '--a' in result.output


def test_droplet(runner, tmp_path):
    result = runner.invoke(main, ['droplet', '--a', '2', '--c', '1', '--t', '0.1', '--samples', '128', '--out', str(tmp_path)])
    assert result.exit_code == 0, result.output
    with open(tmp_path / 'boundary.csv', encoding='utf-8', newline='') as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ['theta', 're_z', 'im_z']
    assert len(rows) == 129
    payload = read_json(tmp_path / 'droplet.json')
    assert payload['area'] == pytest.approx(0.314159, abs=1e-6)
    assert payload['residual'] < 1e-12
    assert payload['moments'][:3] == pytest.approx([0.0, 0.5, 0.0], abs=1e-10)


def test_droplet_in_phase_two(runner, tmp_path):
    result = runner.invoke(main, ['droplet', '--a', '2', '--c', '1', '--t', '0.5', '--out', str(tmp_path)])
    assert result.exit_code == 2
    assert 'PhaseViolation' in result.output


def test_droplet_json_tables(runner, tmp_path):
    args = ['droplet', '--a', '2', '--c', '1', '--t', '0.1', '--samples', '64', '--format', 'json', '--out', str(tmp_path)]
    assert runner.invoke(main, args).exit_code == 0
    table = read_json(tmp_path / 'boundary.json')
    assert table['columns'] == ['theta', 're_z', 'im_z']
    assert len(table['rows']) == 64


def test_export_is_deterministic(runner, tmp_path):
    first, second = tmp_path / 'first', tmp_path / 'second'
    for out in (first, second):
        args = ['droplet', '--a', '2', '--c', '1', '--t', '0.1', '--samples', '64', '--out', str(out)]
        assert runner.invoke(main, args).exit_code == 0
    for name in ('boundary.csv', 'droplet.json'):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_oracle(runner, tmp_path):
    args = ['oracle', '--a', '2', '--c', '1', '--n', '4', '--N', '40', '--out', str(tmp_path)]
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    payload = read_json(tmp_path / 'polynomial_n4_N40.json')
    assert payload['coeffs'][-1] == '1'
    assert payload['coeffs'][1] == payload['coeffs'][3] == '0'
    assert len(payload['zeros']) == 4
    validate_payload(payload, 'polynomial')


def test_oracle_non_integral_charge(runner, tmp_path):
    args = ['oracle', '--a', '2', '--c', '0.5', '--n', '2', '--N', '3', '--out', str(tmp_path)]
    result = runner.invoke(main, args)
    assert result.exit_code == 2
    assert 'NonIntegralCharge' in result.output


def test_config_file_and_flags(tmp_path):
    path = tmp_path / 'run.json'
    path.write_text(json.dumps({'a': 3.0, 'c': 1.0, 't': 0.2, 'samples': 128}), encoding='utf-8')
    config = load_config(path, {'command': 'droplet', 't': 0.1, 'samples': None})
    assert config.a == 3.0
    assert config.t == 0.1
    assert config.samples == 128


def test_integer_and_float_spellings_agree():
    first = load_config(None, {'command': 'droplet', 'a': '2', 'c': 1, 't': 0.1})
    second = load_config(None, {'command': 'droplet', 'a': 2.0, 'c': '1.0', 't': 0.1})
    assert first == second


def test_unknown_key(tmp_path):
    path = tmp_path / 'run.json'
    path.write_text(json.dumps({'a': 2.0, 'c': 1.0, 'colour': 'red'}), encoding='utf-8')
    with pytest.raises(ParseError, match='colour'):
        load_config(path, {'command': 'phase'})


def test_bad_json_reports_line(tmp_path):
    path = tmp_path / 'run.json'
    path.write_text('{\n  "a": 2.0,\n  "c": \n}\n', encoding='utf-8')
    with pytest.raises(ParseError) as info:
        load_config(path, {'command': 'phase'})
    assert info.value.context['line'] == 4


def test_missing_t_and_degree():
    with pytest.raises(ParseError, match='--t'):
        load_config(None, {'command': 'spectral', 'a': 2.0, 'c': 1.0})
    with pytest.raises(ParseError, match='--n'):
        load_config(None, {'command': 'oracle', 'a': 2.0, 'c': 1.0, 'N': 4})


def test_ladder_string():
    config = load_config(None, {'command': 'verify-all', 'a': 2.0, 'c': 1.0, 't': 0.125, 'ladder': '32,8,16,8'})
    assert config.ladder == [8, 16, 32]


def test_config_round_trip(tmp_path):
    config = RunConfig(command=Command.DROPLET, a=2.0, c=1.0, t=0.1, out=tmp_path)
    path = tmp_path / 'config.json'
    path.write_text(json.dumps(config.model_dump(mode='json')), encoding='utf-8')
    assert load_config(path, {}) == config


@pytest.mark.slow
def test_spectral_command(runner, tmp_path):
    result = runner.invoke(main, ['spectral', '--a', '2', '--c', '1', '--t', '0.1', '--out', str(tmp_path)])
    assert result.exit_code == 0, result.output
    payload = read_json(tmp_path / 'spectral.json')
    assert payload['discriminant']['degree'] == 12
    assert payload['report']['valid']


def test_verify_all_in_phase_two(runner, tmp_path):
    result = runner.invoke(main, ['verify-all', '--a', '2', '--c', '1', '--t', '0.5', '--out', str(tmp_path)])
    assert result.exit_code == 2
    assert 'PhaseViolation' in result.output
    assert not (tmp_path / 'acceptance.json').exists()


def test_verify_all_numerical_failure(runner, tmp_path, monkeypatch):
    def no_map(params):
        raise NoConvergence("continuation stalled", t=params.t)

    monkeypatch.setattr('motherbody.conformal.solve_map', no_map)
    result = runner.invoke(main, ['verify-all', '--a', '2', '--c', '1', '--t', '0.125', '--out', str(tmp_path)])
    assert result.exit_code == 3
    assert 'NoConvergence' in result.output
    assert 'continuation stalled' in result.output


def test_acceptance_outcome(clean_env):
    report = ValidationReport('acceptance')
    report.add_check('fine', True)
    report.add_warning('quadrature drift')
    acceptance_outcome(report)

    clean_env.setenv('MOTHERBODY_STRICT', '1')
    reset_settings()
    with pytest.raises(NumericalError):
        acceptance_outcome(report)

    failing = ValidationReport('acceptance')
    failing.add_check('broken', False, 1.0, 0.5)
    clean_env.delenv('MOTHERBODY_STRICT')
    reset_settings()
    with pytest.raises(NumericalError):
        acceptance_outcome(failing)


@pytest.mark.slow
def test_verify_all_end_to_end(runner, tmp_path):
    args = ['verify-all', '--a', '2', '--c', '1', '--t', '0.125', '--ladder', '8,16,32', '--out', str(tmp_path)]
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    payload = read_json(tmp_path / 'acceptance.json')
    validate_payload(payload, 'acceptance')
    assert payload['valid']
    assert payload['params']['ladder'] == [8, 16, 32]
    assert any('KS at n=64 not checked' in msg for msg in payload['warnings'])
    with open(tmp_path / 'errors.csv', encoding='utf-8', newline='') as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ['n', 'N', 're_z', 'im_z', 'log_err_re', 'log_err_im']
    assert len(rows) == 16
    with open(tmp_path / 'zeros.csv', encoding='utf-8', newline='') as fh:
        assert len(list(csv.reader(fh))) == 4
