"""
Lattice Path Tests
Square, triangular and hexagonal paths and their trajectory segments.
"""

import cmath
import math
from fractions import Fraction

import pytest

from src.errors import PathError
from src.lattice.paths import (LatticePathSpec, build_path, edge_heading, segments_to_polyline,
                               to_headed_segments, to_segments, unit)

HALF_PI = math.pi / 2


def test_unit_is_exact_on_the_axes():
    assert unit(Fraction(0)) == 1
    assert unit(Fraction(1, 2)) == 1j
    assert unit(Fraction(-1, 2)) == -1j
    assert unit(Fraction(1, 3)) == pytest.approx(cmath.exp(1j * math.pi / 3))


def test_square_lpath():
    path = build_path(LatticePathSpec('square', ('U', 'R', 'R', 'U')))
    assert path.vertices == (0j, 1j, 1 + 1j, 2 + 1j, 2 + 2j)


def test_square_moves_accept_quarter_turns():
    by_name = build_path(LatticePathSpec('square', ('U', 'L', 'U')))
    by_index = build_path(LatticePathSpec('square', (1, 2, 1)))
    assert by_name.vertices == by_index.vertices


def test_spacing_and_origin():
    path = build_path(LatticePathSpec('square', ('U', 'R'), spacing=0.5, origin=-1.0))
    assert path.vertices == (-1 + 0j, -1 + 0.5j, -0.5 + 0.5j)


def test_collinear_moves_merge_into_one_segment():
    path = build_path(LatticePathSpec('square', ('U', 'R', 'R', 'U')))
    assert to_headed_segments(path) == [(HALF_PI, 1.0, HALF_PI), (0.0, 2.0, 0.0),
                                        (HALF_PI, 1.0, HALF_PI)]
    assert to_segments(path) == [(HALF_PI, 1.0), (0.0, 2.0), (HALF_PI, 1.0)]


def test_leftward_runs_have_horizontal_trajectories():
    path = build_path(LatticePathSpec('square', ('U', 'L', 'L')))
    assert to_headed_segments(path)[1] == (0.0, 2.0, math.pi)


def test_segments_resynthesize_the_merged_vertices():
    path = build_path(LatticePathSpec('square', ('U', 'R', 'R', 'U')))
    again = segments_to_polyline(0j, to_headed_segments(path))
    assert again.vertices == (0j, 1j, 2 + 1j, 2 + 2j)


def test_triangle_path():
    path = build_path(LatticePathSpec('triangle', ('NE', 'E', 'NW')))
    assert path.vertices[-1] == pytest.approx(1 + 1j * math.sqrt(3))
    phis = [phi for phi, _ in to_segments(path)]
    assert phis == pytest.approx([math.pi / 3, 0.0, 2 * math.pi / 3])
    by_degrees = build_path(LatticePathSpec('triangle', (60, 0, 120)))
    assert by_degrees.vertices == path.vertices


def test_hexagonal_path_alternates_palettes():
    path = build_path(LatticePathSpec('hexagonal', (0, 1, 0)))
    assert path.vertices[1] == 1j
    assert path.vertices[2] == pytest.approx(1j + cmath.exp(1j * math.pi / 6))
    assert path.vertices[3] == pytest.approx(path.vertices[2] + 1j)
    phis = [phi for phi, _ in to_segments(path)]
    assert phis == pytest.approx([HALF_PI, math.pi / 6, HALF_PI])


@pytest.mark.parametrize('spec', [
    LatticePathSpec('square', ()),
    LatticePathSpec('square', ('D',)),
    LatticePathSpec('square', ('U', 'X')),
    LatticePathSpec('triangle', ('NE', 45)),
    LatticePathSpec('hexagonal', (0, 3)),
    LatticePathSpec('octagonal', ('U',)),
    LatticePathSpec('square', ('U',), spacing=0.0),
])
def test_bad_specs(spec):
    with pytest.raises(PathError):
        build_path(spec)


def test_spec_dict_round_trip():
    spec = LatticePathSpec('triangle', ('NE', 'E'), spacing=2.0, origin=0.5)
    assert LatticePathSpec.from_dict(spec.to_dict()) == spec
    with pytest.raises(PathError):
        LatticePathSpec.from_dict({'moves': ['U']})


def test_edge_heading_is_exact():
    assert edge_heading(0j, 1j) == HALF_PI
    assert edge_heading(1j, 0j) == -HALF_PI
    assert edge_heading(0j, cmath.exp(1j * math.pi / 3)) == pytest.approx(math.pi / 3)
