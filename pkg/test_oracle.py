"""
Zipper Oracle Tests
Polyline validation, straight slits with exact answers, the composed capacity
and trace comparison.
"""

import math

import numpy as np
import pytest

from src.differentials.qdiff import FactorizedQD
from src.errors import EmptyOverlapError, PathError
from src.evolution.chordal import Segment, Start, trace
from src.evolution.run_config import RunConfig
from src.evolution.trace_result import TraceResult, TraceSample
from src.lattice.paths import LatticePathSpec, build_path, to_headed_segments
from src.maps.slitmaps import driving_constant
from src.oracle.zipper import (DISC, Polyline, composed_capacity, polyline_driving,
                               segments_intersect, sup_deviation)

LPATH = build_path(LatticePathSpec('square', ('U', 'R', 'R', 'U')))
STAIRCASE = build_path(LatticePathSpec('square', ('U', 'R', 'U', 'R', 'U')))


def straight_trace(times, values) -> TraceResult:
    result = TraceResult()
    for t, xi in zip(times, values):
        result.append(TraceSample(t=t, xis=(xi,)))
    return result


# Polylines

def test_segments_intersect():
    assert segments_intersect(0j, 1 + 1j, 1 + 0j, 1j)
    assert not segments_intersect(0j, 1j, 1 + 0j, 1 + 1j)
    assert segments_intersect(0j, 2 + 0j, 1 + 0j, 3 + 0j)


@pytest.mark.parametrize('vertices', [
    (0j,),
    (1j, 2j),
    (0j, 1j, -0.5j),
    (0j, 1j, 1j),
    (0j, 2j, 1 + 2j, 1 + 1j, -1 + 1j),
    (0j, 2j, 1j),
])
def test_bad_half_plane_polylines(vertices):
    with pytest.raises(PathError):
        Polyline(vertices)


def test_bad_disc_polylines():
    with pytest.raises(PathError):
        Polyline((0.5 + 0j, 0.2 + 0j), DISC)
    with pytest.raises(PathError):
        Polyline((1 + 0j, 0j), DISC)


def test_subdivision_and_length():
    assert LPATH.length == pytest.approx(4.0)
    points = LPATH.subdivide(4)
    assert len(points) == 1 + 4 * 4
    assert points[4] == pytest.approx(1j)
    with pytest.raises(PathError):
        LPATH.subdivide(0)


# Straight slits

def test_vertical_segment_is_exact():
    result = polyline_driving(Polyline((0j, 1j)), 16)
    assert result.stop_reason == 'path_exhausted'
    assert np.max(np.abs(result.xi)) < 1e-12
    assert result.t[-1] == pytest.approx(0.25, abs=1e-12)
    assert result.arclength[-1] == pytest.approx(1.0)


def test_single_tilted_edge_is_exact():
    result = polyline_driving(Polyline((0j, 1 + 1j)), 1)
    t, xi = result.t[-1], result.xi[-1]
    assert xi / math.sqrt(t) == pytest.approx(driving_constant(0.25), rel=1e-12)


def test_refined_rows_follow_each_elementary_slit():
    result = polyline_driving(Polyline((0j, 1 + 1j)), 1, refine=8)
    assert len(result.samples) == 1 + 8
    for sample in result.samples[1:]:
        assert sample.xi / math.sqrt(sample.t) == pytest.approx(driving_constant(0.25), rel=1e-12)
    with pytest.raises(PathError):
        polyline_driving(Polyline((0j, 1j)), 1, refine=0)


def test_subdivided_tilted_edge_converges():
    errors = []
    for n_subdiv in (8, 64):
        result = polyline_driving(Polyline((0j, 1 + 1j)), n_subdiv)
        ratio = result.xi[-1] / math.sqrt(result.t[-1])
        errors.append(abs(ratio / driving_constant(0.25) - 1.0))
    assert errors[1] < errors[0]
    assert errors[1] < 0.1


def test_oracle_rejects_disc_paths():
    with pytest.raises(PathError):
        polyline_driving(Polyline((1 + 0j, 0.5 + 0j), DISC))


# Capacity and comparison

def test_composed_capacity_matches_the_final_time():
    result = polyline_driving(LPATH, 8)
    assert composed_capacity(LPATH, 8) == pytest.approx(result.t[-1], rel=1e-4)


def test_sup_deviation_of_a_trace_with_itself():
    result = polyline_driving(LPATH, 8)
    assert sup_deviation(result, result) == 0.0


def test_sup_deviation_interpolates_between_samples():
    a = straight_trace([0.0, 1.0, 2.0], [0.0, 1.0, 2.0])
    b = straight_trace([0.0, 0.5, 1.5, 2.0], [0.0, 0.5, 1.5, 2.0])
    assert sup_deviation(a, b) == pytest.approx(0.0, abs=1e-12)
    c = straight_trace([0.0, 2.0], [0.25, 2.25])
    assert sup_deviation(a, c) == pytest.approx(0.25)


def test_sup_deviation_needs_an_overlap():
    a = straight_trace([0.0, 1.0], [0.0, 0.0])
    b = straight_trace([2.0, 3.0], [0.0, 0.0])
    with pytest.raises(EmptyOverlapError):
        sup_deviation(a, b)
    with pytest.raises(EmptyOverlapError):
        sup_deviation(a, straight_trace([0.5], [0.0]))


def test_vertical_slit_integrator_agrees_with_the_oracle():
    chordal = trace(FactorizedQD.build(1.0), Start(0.0),
                    [Segment(math.pi / 2, 'arclength', 1.0)], RunConfig(h=1e-3))
    oracle = polyline_driving(Polyline((0j, 1j)), 8)
    assert sup_deviation(chordal, oracle) < 1e-8


@pytest.mark.parametrize('path', [LPATH, STAIRCASE], ids=['lpath', 'staircase'])
def test_lattice_path_integrator_agrees_with_the_oracle(path):
    segments = [Segment(phi, 'arclength', length, heading)
                for phi, length, heading in to_headed_segments(path)]
    chordal = trace(FactorizedQD.build(1.0), Start(0.0), segments, RunConfig())
    assert chordal.stop_reason == 'length_reached'
    oracle = polyline_driving(path, 2048)
    assert oracle.stop_reason == 'path_exhausted'
    assert sup_deviation(chordal, oracle) < 1e-3
