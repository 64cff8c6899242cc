"""
Zipper Oracle
Driving functions of arbitrary polylines by composing explicit straight-slit
maps along a subdivided path, independent of any differential equation.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.interpolate import PchipInterpolator

import qd_config as config
from src.errors import EmptyOverlapError, LoewnerQDError, NoConvergenceError, PathError
from src.evolution.trace_result import TraceResult, TraceSample
from src.maps.disc import DiscSlitMap
from src.maps.slitmaps import TiltedSlitMap

logger = logging.getLogger(__name__)

HALF_PLANE = 'half_plane'
DISC = 'disc'


def _cross(a: complex, b: complex) -> float:
    return a.real * b.imag - a.imag * b.real


def segments_intersect(p1: complex, p2: complex, q1: complex, q2: complex) -> bool:
    """Closed-segment intersection test, collinear overlaps included"""
    d1 = _cross(q2 - q1, p1 - q1)
    d2 = _cross(q2 - q1, p2 - q1)
    d3 = _cross(p2 - p1, q1 - p1)
    d4 = _cross(p2 - p1, q2 - p1)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and 0 not in (d1, d2, d3, d4):
        return True

    def on_segment(a, b, c, d):
        return d == 0 and min(a.real, b.real) <= c.real <= max(a.real, b.real) \
            and min(a.imag, b.imag) <= c.imag <= max(a.imag, b.imag)

    return (on_segment(q1, q2, p1, d1) or on_segment(q1, q2, p2, d2)
            or on_segment(p1, p2, q1, d3) or on_segment(p1, p2, q2, d4))


@dataclass(frozen=True)
class Polyline:
    """Simple polyline starting on the boundary of the half-plane or the unit disc"""

    vertices: Tuple[complex, ...]
    domain: str = HALF_PLANE

    def __post_init__(self):
        vertices = tuple(complex(v) for v in self.vertices)
        object.__setattr__(self, 'vertices', vertices)
        if len(vertices) < 2:
            raise PathError("a polyline needs at least two vertices")
        if self.domain == HALF_PLANE:
            if vertices[0].imag != 0:
                raise PathError(f"first vertex {vertices[0]} must be real")
            if any(v.imag <= 0 for v in vertices[1:]):
                raise PathError("vertices after the first must lie in the open half-plane")
        elif self.domain == DISC:
            if abs(abs(vertices[0]) - 1.0) > 1e-12:
                raise PathError(f"first vertex {vertices[0]} must lie on the unit circle")
            if any(abs(v) >= 1.0 or v == 0 for v in vertices[1:]):
                raise PathError("vertices after the first must lie in the punctured open disc")
        else:
            raise PathError(f"unknown domain {self.domain!r}")
        for a, b in zip(vertices, vertices[1:]):
            if a == b:
                raise PathError(f"repeated vertex {a}")
        self._check_simple()

    def _check_simple(self):
        edges = self.edges
        for i in range(len(edges)):
            for j in range(i + 2, len(edges)):
                if segments_intersect(*edges[i], *edges[j]):
                    raise PathError(f"edges {i} and {j} intersect")
        for i in range(len(edges) - 1):
            (a, b), (_, c) = edges[i], edges[i + 1]
            if _cross(b - a, c - b) == 0 and ((b - a) * (c - b).conjugate()).real < 0:
                raise PathError(f"edge {i + 1} doubles back on edge {i}")

    @property
    def edges(self) -> List[Tuple[complex, complex]]:
        return list(zip(self.vertices, self.vertices[1:]))

    @property
    def length(self) -> float:
        return sum(abs(b - a) for a, b in self.edges)

    def subdivide(self, n_subdiv: int) -> np.ndarray:
        """Every edge cut into n_subdiv equal pieces, first vertex included"""
        if n_subdiv < 1:
            raise PathError(f"n_subdiv must be at least 1, got {n_subdiv}")
        points = [self.vertices[0]]
        for a, b in self.edges:
            points.extend(a + (b - a) * k / n_subdiv for k in range(1, n_subdiv + 1))
        return np.array(points, dtype=complex)


def _cumulative_length(points: np.ndarray) -> np.ndarray:
    return np.concatenate([[0.0], np.cumsum(np.abs(np.diff(points)))])


def polyline_driving(path: Polyline, n_subdiv: int = config.ORACLE['n_subdiv'],
                     tol_newton: Optional[float] = None,
                     refine: int = config.ORACLE['refine']) -> TraceResult:
    """Driving function of a half-plane polyline in capacity time (slit capacity 2t).

    Each elementary slit is straight in its own chart, so the driver over it is exactly
    x_k + c sqrt(t - t_k); refine rows per elementary slit sample that curve.
    """
    if refine < 1:
        raise PathError(f"refine must be at least 1, got {refine}")
    if path.domain != HALF_PLANE:
        raise PathError("polyline_driving needs a half-plane path")
    points = path.subdivide(n_subdiv)
    lengths = _cumulative_length(points)
    result = TraceResult(kind='oracle')
    x = points[0].real
    t = 0.0
    result.append(TraceSample(t=0.0, xis=(x,), tip=points[0], arclength=0.0))

    remaining = points[1:].copy()
    try:
        for k in range(len(remaining)):
            target = remaining[k]
            if target.imag <= 0:
                raise PathError(f"vertex {k + 1} ({points[k + 1]}) left the half-plane")
            slit = TiltedSlitMap.through(x, target)
            t += slit.capacity / 2.0
            x = slit.landmarks()[1]
            if k + 1 < len(remaining):
                try:
                    remaining[k + 1:] = slit.invert(remaining[k + 1:], tol=tol_newton)
                except NoConvergenceError as exc:
                    raise NoConvergenceError(f"pulling back after vertex {k + 1}: {exc}") from exc
            result.add_square_root_rows(
                TraceSample(t=t, xis=(x,), tip=points[k + 1], arclength=lengths[k + 1]), refine)
        result.finish('path_exhausted')
    except PathError:
        raise
    except LoewnerQDError as exc:
        logger.info("oracle stopped at t=%s: %s", t, exc)
        result.finish('numerical_failure', str(exc))
    return result


def radial_polyline_driving(path: Polyline,
                            n_subdiv: int = config.ORACLE['n_subdiv']) -> TraceResult:
    """Driving angle of a disc polyline in conformal-radius time"""
    if path.domain != DISC:
        raise PathError("radial_polyline_driving needs a disc path")
    points = path.subdivide(n_subdiv)
    lengths = _cumulative_length(points)
    result = TraceResult(kind='radial')
    u = points[0] / abs(points[0])
    xi = cmath.phase(u)
    t = 0.0
    result.append(TraceSample(t=0.0, xis=(xi,), tip=points[0], arclength=0.0,
                              extras=(math.nan, math.nan)))

    remaining = points[1:].copy()
    try:
        for k in range(len(remaining)):
            target = remaining[k]
            if abs(target) >= 1.0:
                raise PathError(f"vertex {k + 1} ({points[k + 1]}) left the disc")
            disc = DiscSlitMap.through(u, target)
            t += disc.time
            zeta = disc.landmarks()[1]
            xi += cmath.phase(zeta / u)
            u = zeta / abs(zeta)
            if k + 1 < len(remaining):
                remaining[k + 1:] = disc.pullback(remaining[k + 1:])
            result.append(TraceSample(t=t, xis=(xi,), tip=points[k + 1], arclength=lengths[k + 1],
                                      extras=(math.nan, math.nan)))
        result.finish('path_exhausted')
    except PathError:
        raise
    except LoewnerQDError as exc:
        logger.info("radial oracle stopped at t=%s: %s", t, exc)
        result.finish('numerical_failure', str(exc))
    return result


def composed_capacity(path: Polyline, n_subdiv: int = config.ORACLE['n_subdiv'],
                      radius: float = config.ORACLE['capacity_radius']) -> float:
    """Capacity time of the composed oracle map, measured from z (z - F(z)) far away"""
    points = path.subdivide(n_subdiv)
    maps: List[TiltedSlitMap] = []
    x = points[0].real
    remaining = points[1:].copy()
    for k in range(len(remaining)):
        slit = TiltedSlitMap.through(x, remaining[k])
        maps.append(slit)
        x = slit.landmarks()[1]
        if k + 1 < len(remaining):
            remaining[k + 1:] = slit.invert(remaining[k + 1:])

    def measured(height: float) -> complex:
        z = 1j * height
        w = z
        for slit in reversed(maps):
            w = complex(slit.apply(w))
        return z * (z - w)

    # Richardson step removes the 1/z term of the expansion
    capacity = 2.0 * measured(2.0 * radius) - measured(radius)
    return capacity.real / 2.0


def sup_deviation(a: TraceResult, b: TraceResult, column: int = 0) -> float:
    """sup |xi_a - xi_b| over the common time range, monotone cubic in t"""
    ta, tb = a.t, b.t
    if len(ta) < 2 or len(tb) < 2:
        raise EmptyOverlapError("both traces need at least two samples")
    lo, hi = max(ta[0], tb[0]), min(ta[-1], tb[-1])
    if not hi > lo:
        raise EmptyOverlapError(f"time ranges [{ta[0]}, {ta[-1]}] and [{tb[0]}, {tb[-1]}] "
                                "do not overlap")
    grid = np.union1d(ta[(ta >= lo) & (ta <= hi)], tb[(tb >= lo) & (tb <= hi)])
    grid = np.union1d(grid, [lo, hi])
    xa = PchipInterpolator(ta, a.xi_column(column))(grid)
    xb = PchipInterpolator(tb, b.xi_column(column))(grid)
    return float(np.max(np.abs(xa - xb)))
