"""
Chordal Driving-Function Integrator
Traces slits made of theta-trajectory arcs of a factorized quadratic differential:
straight-slit startup at every launch, Taylor stepping of the driving value and
the marked points, tip tracking by the tip-velocity formula, and corner turns.
"""

import cmath
import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.differentials.qdiff import FactorizedQD, as_fraction, rational_angle
from src.errors import (CornerAtSingularityError, DomainError, InvalidDirectionError,
                        LoewnerQDError, NonRealDriftError, SingularStateError,
                        StartupTooCoarseError, StepTooLargeError)
from src.evolution.run_config import RunConfig
from src.evolution.series import SeriesCoefficients, chordal_series
from src.evolution.trace_result import TraceResult, TraceSample
from src.maps.slitmaps import TiltedSlitMap

logger = logging.getLogger(__name__)

BASE_MINUS = 'base_minus'
BASE_PLUS = 'base_plus'
INTERIOR = 'interior'
BOUNDARY_OTHER = 'boundary_other'


@dataclass(frozen=True)
class MarkedPoint:
    """Preimage of a factor location (or of a base point) with its exponent"""

    position: complex
    exponent: Fraction
    role: str = INTERIOR

    def moved(self, position: complex) -> 'MarkedPoint':
        return MarkedPoint(complex(position), self.exponent, self.role)


def moved_marks(marks: Sequence[MarkedPoint], positions: np.ndarray,
                real_mask: np.ndarray) -> Tuple[MarkedPoint, ...]:
    """Marks at new positions; marks on the real line stay on it"""
    positions = np.where(real_mask, positions.real + 0j, positions)
    return tuple(MarkedPoint(complex(p), m.exponent, m.role) for m, p in zip(marks, positions))


@dataclass(frozen=True)
class ChordalState:
    """Moving frontier of one arc in capacity time (slit capacity 2t)"""

    t: float
    xi: float
    marks: Tuple[MarkedPoint, ...]
    sigma0: float
    prefactor: complex
    phi: float
    tip: complex
    arclength: float
    N_current: Fraction
    t_launch: float = 0.0
    heading: complex = 1j
    velocity: Optional[complex] = None

    @cached_property
    def positions(self) -> np.ndarray:
        return np.array([m.position for m in self.marks], dtype=complex)

    @cached_property
    def exponents(self) -> np.ndarray:
        return np.array([float(m.exponent) for m in self.marks])

    @cached_property
    def real_mask(self) -> np.ndarray:
        return np.array([m.position.imag == 0 for m in self.marks], dtype=bool)


@dataclass(frozen=True)
class Derivative:
    xi_dot: float
    mark_dots: np.ndarray
    imag_residual: float


@dataclass(frozen=True)
class Start:
    xi0: float
    N: Fraction = Fraction(0)
    direction_index: int = 0


@dataclass(frozen=True)
class Segment:
    """One theta-trajectory arc; stop is 'capacity' (duration) or 'arclength'"""

    phi: float
    stop: str
    value: float
    heading: Optional[float] = None


# Right-hand side and first integral

def _series(state: ChordalState, order: int) -> SeriesCoefficients:
    return chordal_series([state.xi], state.positions, state.exponents, [1.0], order, 'derived')


def _min_gap(state: ChordalState) -> float:
    if not state.marks:
        return math.inf
    return float(np.min(np.abs(state.positions - state.xi)))


def rhs(state: ChordalState, tol_collision: float = RunConfig.tol_collision) -> Derivative:
    """xi' = -sum e/(P - xi), P' = 2/(P - xi)"""
    if _min_gap(state) < tol_collision:
        raise SingularStateError(f"a marked point collided with xi={state.xi} at t={state.t}")
    series = _series(state, 1)
    return Derivative(float(series.xi_dots[0]), series.mark_dots, series.imag_residual)


def constraint_residual(state: ChordalState) -> float:
    """|2 xi + sum e P - Sigma0|"""
    total = 2.0 * state.xi + complex(np.sum(state.exponents * state.positions)) - state.sigma0
    return abs(total)


def loop_guard(state: ChordalState, threshold: float,
               tol_collision: float = RunConfig.tol_collision,
               xi_dot: Optional[float] = None, reference: float = 0.0,
               ratio: float = math.inf) -> bool:
    """True when xi' blows up or xi is about to meet a base point.

    Blow-up means |xi'| above threshold, or above ratio times the reference rate
    (|xi'| halfway through the arc, but never less than 1/sqrt(t - t_launch)).
    """
    for mark in state.marks:
        if mark.role in (BASE_MINUS, BASE_PLUS) and abs(mark.position - state.xi) < tol_collision:
            return True
    if xi_dot is None:
        xi_dot = rhs(state, tol_collision).xi_dot
    limit = threshold
    elapsed = state.t - state.t_launch
    if elapsed > 0:
        limit = min(limit, ratio * max(reference, 1.0 / math.sqrt(elapsed)))
    return abs(xi_dot) > limit


# Tip motion

def _phi_modulus(xi: float, positions: np.ndarray, exponents: np.ndarray,
                 prefactor: complex) -> float:
    """|Phi_t(xi)|; the branch does not matter for the modulus"""
    return abs(prefactor) * float(np.prod(np.abs(xi - positions) ** exponents))


def _velocity(qd: FactorizedQD, xi: float, positions: np.ndarray, exponents: np.ndarray,
              prefactor: complex, tip: complex, phi: float, heading: complex) -> complex:
    q_abs, direction = qd.trajectory_frame(tip, phi)
    speed = 2.0 * math.sqrt(_phi_modulus(xi, positions, exponents, prefactor) / q_abs)
    if (direction * heading.conjugate()).real < 0:
        direction = -direction
    return speed * direction


def tip_velocity(state: ChordalState, qd: FactorizedQD) -> complex:
    """gamma' = -2 sqrt(Phi_t(xi)/Q(gamma)) on the branch tangent to the arc"""
    if not qd.is_ordinary(state.tip):
        raise SingularStateError(f"tip {state.tip} is a zero or pole of the differential")
    return _velocity(qd, state.xi, state.positions, state.exponents, state.prefactor,
                     state.tip, state.phi, state.heading)


# Stepping

def _advance(state: ChordalState, series: SeriesCoefficients, h: float,
             qd: Optional[FactorizedQD]) -> ChordalState:
    xis, positions = series.evaluate_many((0.5 * h, h))
    xi = float(xis[1, 0])
    marks = moved_marks(state.marks, positions[1], state.real_mask)
    if qd is None:
        return replace(state, t=state.t + h, xi=xi, marks=marks, velocity=None)

    # Kutta's third-order rule for the tip, Simpson's rule for the length
    exps = state.exponents
    v0 = state.velocity
    if v0 is None:
        v0 = _velocity(qd, state.xi, state.positions, exps, state.prefactor,
                       state.tip, state.phi, state.heading)
    tip_mid = state.tip + 0.5 * h * v0
    v_mid = _velocity(qd, float(xis[0, 0]), positions[0], exps, state.prefactor,
                      tip_mid, state.phi, v0)
    tip_end = state.tip + h * (2.0 * v_mid - v0)
    v1 = _velocity(qd, xi, positions[1], exps, state.prefactor, tip_end, state.phi, v_mid)
    tip = state.tip + h / 6.0 * (v0 + 4.0 * v_mid + v1)
    length = h / 6.0 * (abs(v0) + 4.0 * abs(v_mid) + abs(v1))
    return ChordalState(t=state.t + h, xi=xi, marks=marks, sigma0=state.sigma0,
                        prefactor=state.prefactor, phi=state.phi, tip=tip,
                        arclength=state.arclength + length, N_current=state.N_current,
                        t_launch=state.t_launch, heading=v1 / abs(v1), velocity=v1)


def taylor_step(state: ChordalState, h: float, M: int,
                qd: Optional[FactorizedQD] = None,
                tol_collision: float = RunConfig.tol_collision) -> ChordalState:
    """Advance t by h with degree-M Taylor polynomials of xi and every mark"""
    d = rhs(state, tol_collision)
    if h * abs(d.xi_dot) >= 0.1 * _min_gap(state):
        raise StepTooLargeError(f"h={h} crosses the collision horizon at t={state.t}")
    return _advance(state, _series(state, M), h, qd)


# Launching arcs

def departure_angles(qd: FactorizedQD, xi0: float, N: Fraction, phi: float) -> List[Fraction]:
    """Angles theta/pi in (0, 1) with arg[a_N v^(N+2)] = 2 phi, v = e^{i theta}"""
    return angles_for_coefficient(rational_angle(cmath.phase(qd.leading_coefficient(xi0))), N, phi)


def angles_for_coefficient(arg_a: Fraction, N: Fraction, phi: float) -> List[Fraction]:
    """Solutions q in (0, 1) of arg_a + (N+2) q = 2 phi/pi (mod 2)"""
    base = 2 * rational_angle(phi) - arg_a
    span = N + 2
    found = set()
    for k in range(-int(span) - 3, int(span) + 4):
        q = (base + 2 * k) / span
        if 0 < q < 1:
            found.add(q)
    return sorted(found)


def base_exponents(N: Fraction, q: Fraction) -> Tuple[Fraction, Fraction]:
    """(mu_minus, mu_plus) for departure angle pi q from a degree-N point"""
    return (N + 2) * (1 - q) - 2, (N + 2) * q - 2


def check_launch_degree(qd: FactorizedQD, xi0: float, N: Fraction):
    """N must be the exponent of qd at xi0 (0 at an ordinary boundary point)"""
    if N < 0:
        raise InvalidDirectionError(f"launch degree {N} must be nonnegative")
    if N != qd.exponent_at(xi0):
        raise DomainError(f"launch degree {N} does not match the exponent "
                          f"{qd.exponent_at(xi0)} of the differential at {xi0}")


def _launch(marks: Sequence[MarkedPoint], x: float, q: Fraction, N: Fraction,
            sigma0: float, t_base: float, cfg: RunConfig):
    """Straight-slit startup: pull marks back and place the new base pair"""
    mu_minus, mu_plus = base_exponents(N, q)
    s = cfg.s
    while True:
        slit = TiltedSlitMap.make(float(q), x, 2.0 * s)
        c_minus, zeta, c_plus = slit.landmarks()
        pulled = slit.invert(np.array([m.position for m in marks], dtype=complex),
                             tol=cfg.tol_newton) if marks else np.array([], dtype=complex)
        new_marks = [m.moved(p.real + 0j if m.position.imag == 0 else p)
                     for m, p in zip(marks, pulled)]
        for pos, exp, role in ((c_minus, mu_minus, BASE_MINUS), (c_plus, mu_plus, BASE_PLUS)):
            if exp != 0:
                new_marks.append(MarkedPoint(complex(pos), exp, role))

        weighted = sum((float(m.exponent) * m.position for m in new_marks), 0j)
        xi = (sigma0 - weighted.real) / 2.0
        mismatch = abs(xi - zeta) / (c_plus - c_minus)
        if mismatch <= cfg.tol_startup:
            return xi, tuple(new_marks), slit, t_base + s
        if s / 2.0 < cfg.startup_floor:
            raise StartupTooCoarseError(
                f"startup mismatch {mismatch:.3e} above {cfg.tol_startup} at s={s:.3e}")
        s /= 2.0
        logger.debug("startup mismatch %.3e, halving s to %.3e", mismatch, s)


def init_arc(qd: FactorizedQD, xi0: float, N, phi: float, direction_index: int = 0,
             s: Optional[float] = None, cfg: Optional[RunConfig] = None) -> ChordalState:
    """First arc from xi0 (a degree-N point of qd) along the phi-trajectory"""
    cfg = (cfg or RunConfig())
    if s is not None:
        cfg = cfg.updated({'s': s})
    N = as_fraction(N)
    check_launch_degree(qd, xi0, N)

    angles = departure_angles(qd, xi0, N, phi)
    if not 0 <= direction_index < len(angles):
        raise InvalidDirectionError(
            f"direction_index {direction_index} not in 0..{len(angles) - 1} ({angles})")
    q = angles[direction_index]

    marks = []
    for loc, exp in qd.without(xi0).factors:
        role = BOUNDARY_OTHER if loc.imag == 0 else INTERIOR
        marks.append(MarkedPoint(loc, exp, role))
    sigma0 = float(N) * xi0 + sum(float(exp) * loc for loc, exp in qd.without(xi0).factors).real

    xi, new_marks, slit, t = _launch(marks, xi0, q, N, sigma0, 0.0, cfg)
    tip = slit.tip
    logger.info("arc launched from %.6g at angle %s*pi (N=%s, phi=%.6g)", xi0, q, N, phi)
    return ChordalState(t=t, xi=xi, marks=new_marks, sigma0=sigma0, prefactor=qd.prefactor,
                        phi=phi, tip=tip, arclength=abs(tip - xi0), N_current=N,
                        t_launch=0.0, heading=cmath.exp(1j * math.pi * float(q)))


def corner_turn(state: ChordalState, qd: FactorizedQD, delta: float, new_phi: float,
                cfg: Optional[RunConfig] = None) -> ChordalState:
    """Start a new arc at the tip after a turn by delta (positive = toward C+)"""
    cfg = cfg or RunConfig()
    if not qd.is_ordinary(state.tip):
        raise CornerAtSingularityError(f"corner at {state.tip} is a zero or pole")
    dq = rational_angle(delta)
    if not -1 < dq < 1:
        raise InvalidDirectionError(f"turn {delta} must be smaller than pi in magnitude")

    N = Fraction(2)
    q = (1 - dq) / 2
    kept = tuple(replace(m, role=BOUNDARY_OTHER) if m.role in (BASE_MINUS, BASE_PLUS) else m
                 for m in state.marks)
    sigma0 = (2.0 * state.xi + sum((float(m.exponent) * m.position for m in kept), 0j)).real

    xi, new_marks, _, t = _launch(kept, state.xi, q, N, sigma0, state.t, cfg)
    heading = state.heading * cmath.exp(-1j * math.pi * float(dq))
    turned = replace(state, t=t, xi=xi, marks=new_marks, sigma0=sigma0, phi=new_phi,
                     N_current=N, t_launch=state.t, heading=heading, velocity=None)
    speed = abs(tip_velocity(turned, qd))
    length = 4.0 * (t - state.t) * speed / float(N + 2)
    logger.info("corner at t=%.6g: turn %s*pi, new base exponents %s", state.t, dq,
                base_exponents(N, q))
    return replace(turned, tip=state.tip + length * heading,
                   arclength=state.arclength + length)


# Full traces

def _turn_angle(state: ChordalState, qd: FactorizedQD, segment: Segment) -> float:
    candidates = qd.trajectory_tangents(state.tip, segment.phi)
    turns = [-cmath.phase(v / state.heading) for v in candidates]
    if segment.heading is not None:
        target = cmath.exp(1j * segment.heading)
        best = max(range(2), key=lambda i: (candidates[i] * target.conjugate()).real)
        return turns[best]
    if abs(abs(turns[0]) - abs(turns[1])) < 1e-9:
        raise InvalidDirectionError(
            f"turn at {state.tip} is ambiguous; give the segment a heading")
    return min(turns, key=abs)


def _sample(state: ChordalState, qd: FactorizedQD) -> TraceSample:
    velocity = state.velocity
    if velocity is None:
        try:
            velocity = tip_velocity(state, qd)
        except LoewnerQDError:
            velocity = complex('nan')
    return TraceSample(t=state.t, xis=(state.xi,), tip=state.tip, arclength=state.arclength,
                       residual=constraint_residual(state),
                       marks=tuple((m.position, m.exponent) for m in state.marks),
                       xi_dots=(float('nan'),), velocity=velocity, phi=state.phi)


def _integrate_segment(state: ChordalState, qd: FactorizedQD, segment: Segment,
                       cfg: RunConfig, result: TraceResult, t0: float, length0: float):
    by_capacity = segment.stop == 'capacity'
    target = (t0 if by_capacity else length0) + segment.value
    times: List[float] = []
    rates: List[float] = []
    mid = 0

    for _ in range(cfg.max_steps):
        if by_capacity and state.t >= target - 1e-14:
            return state, 'capacity_reached'
        if not by_capacity and state.arclength >= target:
            return state, 'length_reached'

        gap = _min_gap(state)
        if gap < cfg.tol_collision:
            return state, 'loop_detected'
        series = _series(state, cfg.order)
        xi_dot = float(series.xi_dots[0])
        result.samples[-1].xi_dots = (xi_dot,)
        if series.imag_residual > cfg.tol_imag:
            raise NonRealDriftError(f"Im xi' = {series.imag_residual:.3e} at t={state.t}")

        # reference rate: |xi'| at the sample nearest the arc's time-midpoint
        times.append(state.t)
        rates.append(abs(xi_dot))
        midpoint = 0.5 * (state.t_launch + state.t)
        while mid + 1 < len(times) and times[mid + 1] <= midpoint:
            mid += 1
        if loop_guard(state, cfg.loop_threshold, cfg.tol_collision, xi_dot,
                      rates[mid], cfg.loop_ratio):
            logger.info("loop guard fired at t=%.6g with |xi'|=%.3e", state.t, abs(xi_dot))
            return state, 'loop_detected'

        rate = abs(xi_dot) + float(np.max(np.abs(series.mark_dots), initial=0.0))
        h = cfg.step_size(state.t - state.t_launch, gap, rate,
                          target - state.t if by_capacity else math.inf)

        new = _advance(state, series, h, qd)
        finished = False
        if not by_capacity and new.arclength >= target:
            h = h * (target - state.arclength) / (new.arclength - state.arclength)
            if h <= 1e-15 * max(1.0, state.t):
                return state, 'length_reached'
            new = _advance(state, series, h, qd)
            finished = True

        result.append(_sample(new, qd))
        state = new
        if finished:
            return state, 'length_reached'

    raise LoewnerQDError(f"segment did not finish within {cfg.max_steps} steps")


def parse_segments(raw: Sequence) -> List[Segment]:
    """Accept Segment objects, (phi, length) pairs or dicts"""
    segments = []
    for item in raw:
        if isinstance(item, Segment):
            segments.append(item)
        elif isinstance(item, dict):
            stop = 'capacity' if 'capacity' in item else 'arclength'
            value = item.get('capacity', item.get('length', item.get('arclength')))
            segments.append(Segment(float(item['phi']), stop, float(value),
                                    None if item.get('heading') is None else float(item['heading'])))
        else:
            phi, length, *rest = item
            segments.append(Segment(float(phi), 'arclength', float(length),
                                    float(rest[0]) if rest and rest[0] is not None else None))
    return segments


def trace(qd: FactorizedQD, start: Start, segments: Sequence, cfg: Optional[RunConfig] = None
          ) -> TraceResult:
    """Integrate a chain of trajectory arcs, turning at every segment boundary"""
    cfg = (cfg or RunConfig()).validate()
    segments = parse_segments(segments)
    result = TraceResult(kind='chordal')
    result.append(TraceSample(t=0.0, xis=(float(start.xi0),), tip=complex(start.xi0),
                              arclength=0.0, phi=segments[0].phi if segments else float('nan')))
    if not segments:
        result.finish('capacity_reached')
        return result

    state = None
    try:
        state = init_arc(qd, start.xi0, start.N, segments[0].phi, start.direction_index, cfg=cfg)
        result.add_square_root_rows(_sample(state, qd), cfg.startup_rows)
        reason = 'capacity_reached'
        for k, segment in enumerate(segments):
            t0, length0 = (0.0, 0.0) if k == 0 else (state.t, state.arclength)
            if k > 0:
                delta = _turn_angle(state, qd, segment)
                result.corners.append(state.t)
                state = corner_turn(state, qd, delta, segment.phi, cfg)
                result.add_square_root_rows(_sample(state, qd), cfg.startup_rows)
            state, reason = _integrate_segment(state, qd, segment, cfg, result, t0, length0)
            if reason == 'loop_detected':
                break
        result.finish(reason)
    except LoewnerQDError as exc:
        logger.info("trace stopped at t=%s: %s", state.t if state else 0.0, exc)
        result.finish('numerical_failure', str(exc))

    logger.info("trace finished (%s) with %d samples", result.stop_reason, len(result.samples))
    return result
