"""
Command Line Tests
Job files in, CSV/SVG/PNG out, exit codes and logging switches.
"""

import json
import logging
import math

import pytest

import loewner_qd
from src.ui.jobs import Job

VERTICAL = math.pi / 2


def write_job(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding='utf-8')
    return path


@pytest.fixture
def vertical_job(tmp_path):
    return write_job(tmp_path, 'vertical.json', {
        'segments': [{'phi': VERTICAL, 'capacity': 0.01}],
        'config': {'h': 1e-3},
    })


def read_lines(path):
    return path.read_text(encoding='utf-8').splitlines()


def test_trace_writes_a_csv(tmp_path, vertical_job):
    out = tmp_path / 'vertical.csv'
    assert loewner_qd.main(['trace', '--job', str(vertical_job), '--csv', str(out)]) == 0
    lines = read_lines(out)
    assert lines[0].startswith('t,xi,gamma_re,gamma_im,arclength,residual,mark0_re,mark0_im,mark0_exp')
    assert lines[0].endswith(',stop_reason')
    assert lines[-1].endswith(',capacity_reached')
    assert lines[1].startswith('0.0,0.0,')


def test_trace_is_deterministic(tmp_path, vertical_job):
    first, second = tmp_path / 'a.csv', tmp_path / 'b.csv'
    loewner_qd.main(['trace', '--job', str(vertical_job), '--csv', str(first)])
    loewner_qd.main(['trace', '--job', str(vertical_job), '--csv', str(second)])
    assert first.read_bytes() == second.read_bytes()


def test_trace_without_csv_prints(capsys, vertical_job):
    assert loewner_qd.main(['trace', '--job', str(vertical_job)]) == 0
    assert capsys.readouterr().out.startswith('t,xi,')


def test_figures(tmp_path, vertical_job):
    svg, png = tmp_path / 'v.svg', tmp_path / 'v.png'
    code = loewner_qd.main(['trace', '--job', str(vertical_job), '--csv', str(tmp_path / 'v.csv'),
                            '--svg', str(svg), '--png', str(png)])
    assert code == 0
    assert '<svg' in svg.read_text(encoding='utf-8')
    assert png.read_bytes()[:8] == b'\x89PNG\r\n\x1a\n'


def test_invalid_json_writes_nothing(tmp_path):
    job = tmp_path / 'broken.json'
    job.write_text('{"segments": [', encoding='utf-8')
    out = tmp_path / 'broken.csv'
    assert loewner_qd.main(['trace', '--job', str(job), '--csv', str(out)]) == 1
    assert not out.exists()


def test_bad_config_is_a_job_error(tmp_path):
    job = write_job(tmp_path, 'order.json', {
        'segments': [{'phi': VERTICAL, 'capacity': 0.01}], 'config': {'order': 20}})
    assert loewner_qd.main(['trace', '--job', str(job)]) == 1


def test_check_passes_for_the_vertical_slit(tmp_path, capsys):
    job = write_job(tmp_path, 'check.json', {
        'path': [[0, 0], [0, 1]], 'tolerance': 1e-6, 'config': {'h': 1e-3, 'n_subdiv': 8}})
    assert loewner_qd.main(['check', '--job', str(job)]) == 0
    assert 'sup_deviation=' in capsys.readouterr().out


def test_check_fails_above_tolerance(tmp_path):
    job = write_job(tmp_path, 'tilted.json', {
        'path': [[0, 0], [1, 1]], 'config': {'h': 1e-3, 'n_subdiv': 1}})
    assert loewner_qd.main(['check', '--job', str(job), '--tol', '1e-12']) == 3


def test_oracle_command(tmp_path):
    job = write_job(tmp_path, 'lpath.json', {
        'lattice': {'kind': 'square', 'moves': ['U', 'R', 'R', 'U']}})
    out = tmp_path / 'oracle.csv'
    assert loewner_qd.main(['oracle', '--job', str(job), '--csv', str(out), '--n-subdiv', '4']) == 0
    lines = read_lines(out)
    # header, start, then 8 rows for each of the 16 elementary slits
    assert len(lines) == 1 + 1 + 16 * 8
    assert lines[-1].endswith(',path_exhausted')

    coarse = tmp_path / 'coarse.csv'
    assert loewner_qd.main(['oracle', '--job', str(job), '--csv', str(coarse),
                            '--n-subdiv', '4', '--refine', '1']) == 0
    lines = read_lines(coarse)
    assert len(lines) == 1 + 1 + 16
    assert lines[-1].endswith(',path_exhausted')


def test_multi_command(tmp_path):
    job = write_job(tmp_path, 'pair.json', {
        'multi': {'starts': [{'xi0': -1.0, 'phi': VERTICAL}, {'xi0': 1.0, 'phi': VERTICAL}],
                  'weights': [0.5, 0.5], 'capacity': 0.01},
        'config': {'h': 1e-3}})
    out = tmp_path / 'pair.csv'
    assert loewner_qd.main(['multi', '--job', str(job), '--csv', str(out)]) == 0
    assert read_lines(out)[0].startswith('t,xi1,xi2,residual')


def test_radial_command(tmp_path):
    job = write_job(tmp_path, 'radius.json', {
        'radial': {'xi0': 0.0, 'capacity': 0.05}, 'config': {'h': 1e-3}})
    out = tmp_path / 'radius.csv'
    assert loewner_qd.main(['radial', '--job', str(job), '--csv', str(out)]) == 0
    header = read_lines(out)[0]
    assert header.startswith('t,xi,tip_re,tip_im,residual_printed,modulus_defect,residual_normalized')


def test_numerical_failure_exit_code(tmp_path):
    job = write_job(tmp_path, 'printed.json', {
        'radial': {'xi0': 0.0, 'capacity': 0.05}, 'config': {'h': 1e-3}})
    out = tmp_path / 'printed.csv'
    code = loewner_qd.main(['radial', '--job', str(job), '--csv', str(out),
                            '--radial-mode', 'printed'])
    assert code == 2
    assert read_lines(out)[-1].endswith(',numerical_failure')


def test_several_jobs_go_to_the_output_directory(tmp_path, vertical_job):
    other = write_job(tmp_path, 'other.json', {
        'segments': [{'phi': math.pi / 4, 'capacity': 0.01}], 'config': {'h': 1e-3}})
    out_dir = tmp_path / 'out'
    code = loewner_qd.main(['trace', '--job', str(vertical_job), str(other),
                            '--out-dir', str(out_dir)])
    assert code == 0
    assert (out_dir / 'vertical.csv').exists()
    assert (out_dir / 'other.csv').exists()


def test_config_layers():
    job = Job.from_dict({'config': {'h': 0.01, 'order': 3}})
    cfg = loewner_qd.build_config(job, {'order': 5, 'h': None})
    assert cfg.h == 0.01
    assert cfg.order == 5


def test_logging_switch():
    loewner_qd.configure_logging({'LOEWNER_QD_LOG': 'debug'})
    assert logging.getLogger('src').level == logging.DEBUG
    loewner_qd.configure_logging({})
    assert logging.getLogger('src').level > logging.CRITICAL


def test_multi_figure_has_only_the_driving_panel(tmp_path):
    job = write_job(tmp_path, 'pair.json', {
        'multi': {'starts': [{'xi0': -1.0, 'phi': VERTICAL}, {'xi0': 1.0, 'phi': VERTICAL}],
                  'weights': [0.5, 0.5], 'capacity': 0.01},
        'config': {'h': 1e-3}})
    svg = tmp_path / 'pair.svg'
    code = loewner_qd.main(['multi', '--job', str(job), '--csv', str(tmp_path / 'pair.csv'),
                            '--svg', str(svg), '--png', str(tmp_path / 'pair.png')])
    assert code == 0
    text = svg.read_text(encoding='utf-8')
    assert text.count('<rect') == 1
    assert text.count('<polyline') == 2
