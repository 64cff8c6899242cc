"""
Radial Integrator Tests
Slits in the unit disc: the radius slit against its closed form and the disc
oracle, rotation, residual bookkeeping and invalid configurations.
"""

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from src.differentials.qdiff import FactorizedQD
from src.errors import NonRealDriftError
from src.evolution.chordal import BOUNDARY_OTHER, MarkedPoint
from src.evolution.radial import RadialStart, RadialState, radial_rhs, radial_trace
from src.evolution.run_config import RunConfig
from src.oracle.zipper import DISC, Polyline, radial_polyline_driving, sup_deviation

RADII = FactorizedQD.build(-1.0, [(0j, -2)])
FAST = RunConfig(h=1e-3)
VERTICAL = math.pi / 2


def radius_tip(t: float) -> float:
    """r with 4r/(1+r)^2 = e^-t"""
    a = 4.0 * math.exp(t)
    return ((a - 2.0) - math.sqrt((a - 2.0) ** 2 - 4.0)) / 2.0


@pytest.fixture(scope='module')
def radius_slit():
    return radial_trace(RADII, RadialStart(0.3, VERTICAL), 0.5, FAST)


def test_radius_slit_has_constant_driving_angle(radius_slit):
    assert radius_slit.stop_reason == 'capacity_reached'
    assert radius_slit.t[-1] == pytest.approx(0.5)
    assert np.max(np.abs(radius_slit.xi - 0.3)) < 1e-8


def test_radius_slit_tip_matches_the_conformal_radius(radius_slit):
    tip = radius_slit.samples[-1].tip
    assert abs(tip) == pytest.approx(radius_tip(0.5), abs=1e-4)
    assert cmath.phase(tip) == pytest.approx(0.3, abs=1e-6)


def test_radius_slit_residuals(radius_slit):
    assert np.max(radius_slit.residuals) < 1e-8
    last = radius_slit.samples[-1]
    printed, defect, normalized = last.extras
    # as printed the right-hand side shrinks like e^-2t
    assert defect == pytest.approx(1.0 - math.exp(-1.0), rel=1e-6)
    assert normalized == last.residual


def test_radius_slit_agrees_with_the_disc_oracle(radius_slit):
    u0 = cmath.exp(0.3j)
    path = Polyline((u0, radius_tip(0.5) * u0), DISC)
    oracle = radial_polyline_driving(path, 16)
    assert oracle.stop_reason == 'path_exhausted'
    assert oracle.t[-1] == pytest.approx(0.5, abs=1e-8)
    assert sup_deviation(radius_slit, oracle) < 1e-6


def test_rotation_shifts_the_driving_angle(radius_slit):
    turned = radial_trace(RADII, RadialStart(1.1, VERTICAL), 0.5, FAST)
    assert len(turned.samples) == len(radius_slit.samples)
    assert np.allclose(turned.t, radius_slit.t, atol=1e-12)
    assert np.allclose(turned.xi - radius_slit.xi, 0.8, atol=1e-8)


def test_printed_mode_gives_a_non_real_drift():
    result = radial_trace(RADII, RadialStart(0.3, VERTICAL), 0.1,
                          FAST.updated({'radial_mode': 'printed'}))
    assert result.stop_reason == 'numerical_failure'
    assert "Im xi'" in result.message


def test_launch_degree_must_match_the_differential():
    result = radial_trace(RADII, RadialStart(0.3, VERTICAL, N=Fraction(1)), 0.1, FAST)
    assert result.stop_reason == 'numerical_failure'
    assert 'does not match' in result.message


def test_empty_disc_state_is_rejected():
    state = RadialState(t=0.1, xi=0.0, K=0, marks=(), pi0=1 + 0j, N=Fraction(0),
                        prefactor=1.0, phi=0.0)
    with pytest.raises(NonRealDriftError):
        radial_rhs(state)


def symmetric_disc_state(mode: str, theta: float = 0.4) -> RadialState:
    """u = 1 between two simple poles at e^{+-i theta}, double zero at the origin"""
    marks = (MarkedPoint(cmath.exp(1j * theta), Fraction(-1), BOUNDARY_OTHER),
             MarkedPoint(cmath.exp(-1j * theta), Fraction(-1), BOUNDARY_OTHER))
    return RadialState(t=0.1, xi=0.0, K=2, marks=marks, pi0=1 + 0j, N=Fraction(0),
                       prefactor=1.0, phi=0.0, mode=mode)


def test_origin_mode_constant_cancels_the_origin_degree():
    theta = 0.4
    d = radial_rhs(symmetric_disc_state('origin', theta))
    assert d.xi_dot == pytest.approx(0.0, abs=1e-12)
    expected = 1j * cmath.exp(1j * theta) / math.tan(theta / 2)
    assert d.mark_dots[0] == pytest.approx(expected)
    with pytest.raises(NonRealDriftError):
        radial_rhs(symmetric_disc_state('printed', theta))


def test_origin_mode_drifts_on_the_radius_slit():
    # c = 2 - K = 4 for K = -2, so xi' = -2i
    result = radial_trace(RADII, RadialStart(0.3, VERTICAL), 0.1,
                          FAST.updated({'radial_mode': 'origin'}))
    assert result.stop_reason == 'numerical_failure'
    assert "Im xi' = 2.000e+00" in result.message
