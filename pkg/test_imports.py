#!/usr/bin/env python3
"""
Test script to verify module imports and configuration defaults
"""

import dataclasses
import importlib
from pathlib import Path

import pytest

import qd_config as config
from src.errors import DomainError
from src.evolution.chordal import ChordalState, MarkedPoint
from src.evolution.run_config import RunConfig
from src.evolution.trace_result import STOP_REASONS, TraceResult

MODULES = [
    'loewner_qd',
    'src.differentials.qdiff',
    'src.maps.slitmaps',
    'src.maps.disc',
    'src.evolution.series',
    'src.evolution.chordal',
    'src.evolution.multislit',
    'src.evolution.radial',
    'src.oracle.zipper',
    'src.lattice.paths',
    'src.ui.jobs',
    'src.ui.plots',
]


@pytest.mark.parametrize('name', MODULES)
def test_module_imports(name):
    assert importlib.import_module(name)


def test_config_groups():
    assert 1 <= config.STEPPER['order'] <= config.STEPPER['max_order']
    assert config.STEPPER['startup_s'] < config.STEPPER['h']
    assert config.MULTI['mode'] in ('derived', 'printed')
    assert config.RADIAL['mode'] in ('residue', 'origin', 'printed')
    assert 'off' in config.LOGGING['levels']


def test_run_config_defaults_follow_the_config_module():
    cfg = RunConfig().validate()
    assert cfg.h == config.STEPPER['h']
    assert cfg.tol_startup == config.TOLERANCES['startup']
    assert cfg.n_subdiv == config.ORACLE['n_subdiv']


def test_run_config_overrides():
    cfg = RunConfig().updated({'order': 6, 'seed': 3, 'h': None})
    assert cfg.order == 6
    assert cfg.h == config.STEPPER['h']
    assert cfg.extra == {'seed': 3}
    with pytest.raises(DomainError):
        RunConfig().updated({'order': 0})
    with pytest.raises(DomainError):
        RunConfig().updated({'radial_mode': 'sideways'})


def test_graded_steps_shrink_with_h():
    cfg = RunConfig(h=1e-4, grading_window=1e-2)
    assert cfg.graded_ratio == pytest.approx(1e-2)
    assert cfg.step_size(1e-3, 1.0, 1.0) == pytest.approx(1e-5)
    halved = RunConfig(h=5e-5, grading_window=1e-2)
    assert halved.step_size(1e-3, 1.0, 1.0) == pytest.approx(0.5e-5)
    # far from a launch only h and the collision horizon bind
    assert cfg.step_size(1.0, 1.0, 1.0) == pytest.approx(1e-4)
    assert cfg.step_size(1.0, 1e-3, 1.0) == pytest.approx(1e-5)
    assert cfg.step_size(1.0, 1.0, 1.0, remaining=3e-5) == pytest.approx(3e-5)
    # coarse h saturates below the collision-safe ratio
    assert RunConfig(h=1.0).graded_ratio < 0.1


def test_rate_limit_falls_back_to_the_square_root_law():
    cfg = RunConfig(loop_threshold=1e4, loop_ratio=20.0)
    assert cfg.rate_limit(2.0, 1.0) == pytest.approx(40.0)
    assert cfg.rate_limit(0.0, 0.25) == pytest.approx(40.0)
    assert cfg.rate_limit(1e6, 1.0) == cfg.loop_threshold
    assert cfg.rate_limit(1.0, 0.0) == cfg.loop_threshold


def test_integer_settings_must_be_positive():
    for name in ('n_subdiv', 'oracle_refine', 'startup_rows', 'max_steps'):
        with pytest.raises(DomainError):
            RunConfig().updated({name: 0})


def test_only_reachable_stop_reasons_are_accepted():
    assert 'corner' not in STOP_REASONS
    result = TraceResult()
    with pytest.raises(ValueError):
        result.finish('corner')
    result.finish('loop_detected', 'closing')
    assert result.partial and result.message == 'closing'


def test_state_records_carry_no_unused_fields():
    assert [f.name for f in dataclasses.fields(MarkedPoint)] == ['position', 'exponent', 'role']
    assert not hasattr(ChordalState, 'base')
    assert not hasattr(ChordalState, 'exponent_multiset')


def test_pytest_is_only_a_test_dependency():
    root = Path(__file__).parent
    runtime = (root / 'requirements.txt').read_text().lower()
    assert 'pytest' not in runtime
    assert 'pytest' in (root / 'requirements-dev.txt').read_text().lower()


if __name__ == '__main__':
    print("Loewner QD - Import Test")
    print("=" * 50)
    for name in MODULES:
        importlib.import_module(name)
        print(f"✓ {name}")
    print(f"  - Step size: {config.STEPPER['h']}")
    print(f"  - Taylor order: {config.STEPPER['order']}")
    print("\n✓ All modules imported successfully!")
