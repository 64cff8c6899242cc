"""
Lattice Paths
Square, triangular and hexagonal lattice paths in the upper half-plane and their
conversion to trajectory segments of the constant differential Q = 1.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple, Union

from src.differentials.qdiff import rational_angle
from src.errors import PathError
from src.oracle.zipper import Polyline

Move = Union[str, int]

# Directions as multiples of pi
SQUARE_MOVES = {'R': Fraction(0), 'U': Fraction(1, 2), 'L': Fraction(1), 'D': Fraction(3, 2)}
TRIANGLE_MOVES = {'E': Fraction(0), 'NE': Fraction(1, 3), 'NW': Fraction(2, 3),
                  'W': Fraction(1), 'SW': Fraction(4, 3), 'SE': Fraction(5, 3)}
# Hexagonal vertices alternate between two palettes of three edge directions
HEX_PALETTES = ((Fraction(1, 2), Fraction(7, 6), Fraction(11, 6)),
                (Fraction(3, 2), Fraction(1, 6), Fraction(5, 6)))

KINDS = ('square', 'triangle', 'hexagonal')


def unit(angle: Fraction) -> complex:
    """e^{i pi angle}, exact when angle is a multiple of 1/2"""
    angle = angle % 2
    exact = {Fraction(0): 1 + 0j, Fraction(1, 2): 1j, Fraction(1): -1 + 0j,
             Fraction(3, 2): -1j}
    if angle in exact:
        return exact[angle]
    theta = math.pi * float(angle)
    return complex(math.cos(theta), math.sin(theta))


@dataclass(frozen=True)
class LatticePathSpec:
    kind: str
    moves: Tuple[Move, ...]
    spacing: float = 1.0
    origin: float = 0.0

    @classmethod
    def from_dict(cls, payload: dict) -> 'LatticePathSpec':
        try:
            return cls(kind=payload['kind'], moves=tuple(payload['moves']),
                       spacing=float(payload.get('spacing', 1.0)),
                       origin=float(payload.get('origin', 0.0)))
        except (KeyError, TypeError) as exc:
            raise PathError(f"bad lattice spec {payload!r}: {exc}") from exc

    def to_dict(self) -> dict:
        return {'kind': self.kind, 'spacing': self.spacing, 'origin': self.origin,
                'moves': list(self.moves)}

    def directions(self) -> List[Fraction]:
        """Exact direction of every move as a multiple of pi"""
        if self.kind not in KINDS:
            raise PathError(f"unknown lattice kind {self.kind!r}")
        if not self.spacing > 0:
            raise PathError(f"spacing must be positive, got {self.spacing}")
        angles = []
        for step, move in enumerate(self.moves):
            if self.kind == 'square':
                angles.append(self._square(move))
            elif self.kind == 'triangle':
                angles.append(self._triangle(move))
            else:
                angles.append(self._hexagonal(move, step))
        return angles

    @staticmethod
    def _square(move: Move) -> Fraction:
        if isinstance(move, str) and move.upper() in SQUARE_MOVES:
            return SQUARE_MOVES[move.upper()]
        if isinstance(move, int) and 0 <= move < 4:
            return Fraction(move, 2)
        raise PathError(f"square move {move!r} not in U/R/D/L or 0..3")

    @staticmethod
    def _triangle(move: Move) -> Fraction:
        if isinstance(move, str) and move.upper() in TRIANGLE_MOVES:
            return TRIANGLE_MOVES[move.upper()]
        if isinstance(move, int) and move % 60 == 0:
            return Fraction(move % 360, 180)
        raise PathError(f"triangle move {move!r} not a multiple of 60 degrees or E/NE/NW/W/SW/SE")

    @staticmethod
    def _hexagonal(move: Move, step: int) -> Fraction:
        if not (isinstance(move, int) and 0 <= move < 3):
            raise PathError(f"hexagonal move {move!r} not in 0..2")
        return HEX_PALETTES[step % 2][move]


def build_path(spec: LatticePathSpec) -> Polyline:
    """Vertices from origin in steps of length spacing along the lattice directions"""
    if not spec.moves:
        raise PathError("a lattice path needs at least one move")
    vertices = [complex(spec.origin, 0.0)]
    for step, angle in enumerate(spec.directions()):
        vertex = vertices[-1] + spec.spacing * unit(angle)
        if vertex.imag <= 0:
            raise PathError(f"move {step} ({spec.moves[step]!r}) leaves the upper half-plane")
        vertices.append(vertex)
    return Polyline(tuple(vertices))


def edge_heading(a: complex, b: complex) -> float:
    """Exact travel direction of an edge in (-pi, pi] when it is a rational angle"""
    return float(rational_angle(math.atan2(b.imag - a.imag, b.real - a.real))) * math.pi


def to_headed_segments(path: Polyline) -> List[Tuple[float, float, float]]:
    """(phi, length, heading) per maximal straight run of the polyline"""
    runs: List[List[float]] = []
    for a, b in path.edges:
        heading = edge_heading(a, b)
        if runs and abs(runs[-1][2] - heading) < 1e-12:
            runs[-1][1] += abs(b - a)
            continue
        runs.append([heading % math.pi, abs(b - a), heading])
    return [(phi if phi < math.pi - 1e-12 else 0.0, length, heading)
            for phi, length, heading in runs]


def to_segments(path: Polyline) -> List[Tuple[float, float]]:
    """(phi, length) per maximal straight run; phi = direction mod pi"""
    return [(phi, length) for phi, length, _ in to_headed_segments(path)]


def segments_to_polyline(start: complex, segments: Sequence[Tuple[float, float, float]]) -> Polyline:
    """Re-synthesize vertices from headed segments"""
    vertices = [complex(start)]
    for _, length, heading in segments:
        vertices.append(vertices[-1] + length * unit(rational_angle(heading)))
    return Polyline(tuple(vertices))
