"""
Radial Driving-Function Integrator
Trajectory slits in the unit disc growing from a boundary point towards the
origin, parameterized by conformal radius (f_t'(0) = e^-t), driven by e^{i xi(t)}.
"""

import cmath
import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

from src.differentials.qdiff import FactorizedQD, as_fraction, rational_angle
from src.errors import (DomainError, InvalidDirectionError, LoewnerQDError, NonRealDriftError,
                        SingularStateError, StartupTooCoarseError)
from src.evolution.chordal import (BASE_MINUS, BASE_PLUS, BOUNDARY_OTHER, INTERIOR, MarkedPoint,
                                   angles_for_coefficient, base_exponents)
from src.evolution.run_config import RunConfig
from src.evolution.series import SeriesCoefficients, radial_constant, radial_series
from src.evolution.trace_result import TraceResult, TraceSample
from src.maps.disc import DiscSlitMap

logger = logging.getLogger(__name__)

CIRCLE_TOL = 1e-12


@dataclass(frozen=True)
class RadialStart:
    xi0: float
    phi: float
    N: Fraction = Fraction(0)
    direction_index: int = 0


@dataclass(frozen=True)
class RadialState:
    """Frontier of a radial trace; circle marks have role base_* or boundary_other"""

    t: float
    xi: float
    K: int
    marks: Tuple[MarkedPoint, ...]
    pi0: complex
    N: Fraction
    prefactor: float
    phi: float
    tip: complex = complex('nan')
    arclength: float = 0.0
    mode: str = RunConfig.radial_mode
    heading: complex = -1.0 + 0j
    interior_scale: float = 1.0

    @property
    def u(self) -> complex:
        return cmath.exp(1j * self.xi)

    @property
    def positions(self) -> np.ndarray:
        return np.array([m.position for m in self.marks], dtype=complex)

    @property
    def exponents(self) -> np.ndarray:
        return np.array([float(m.exponent) for m in self.marks])

    @property
    def constant(self) -> float:
        return radial_constant(self.mode, self.K, float(self.exponents.sum()))


@dataclass(frozen=True)
class RadialDerivative:
    xi_dot: float
    mark_dots: np.ndarray
    imag_residual: float


@dataclass(frozen=True)
class RadialResidual:
    """Constraint as printed (with e^-2t), in the mode's own form, and |RHS| defect"""

    printed: float
    normalized: float
    modulus_defect: float


def _series(state: RadialState, order: int) -> SeriesCoefficients:
    return radial_series(state.xi, state.positions, state.exponents, state.K, order, state.mode)


def _min_gap(state: RadialState) -> float:
    if not state.marks:
        return math.inf
    return float(np.min(np.abs(state.positions - state.u)))


def radial_rhs(state: RadialState, tol_collision: float = RunConfig.tol_collision,
               tol_imag: float = RunConfig.tol_imag) -> RadialDerivative:
    """xi' = -(i/2)[sum e (P+u)/(P-u) + c], P' = -P (P+u)/(P-u)"""
    if _min_gap(state) < tol_collision:
        raise SingularStateError(f"a marked point collided with e^(i xi) at t={state.t}")
    series = _series(state, 1)
    if series.imag_residual > tol_imag:
        raise NonRealDriftError(
            f"Im xi' = {series.imag_residual:.3e}: not a valid radial configuration")
    return RadialDerivative(float(series.xi_dots[0]), series.mark_dots, series.imag_residual)


def _relative_power(position: complex, exponent: float, xi: float) -> complex:
    """P^-e on the branch continued from e^{-i e xi}"""
    rel = position * cmath.exp(-1j * xi)
    return cmath.exp(-1j * exponent * xi) * cmath.exp(-exponent * cmath.log(rel))


def _mark_product(state: RadialState) -> complex:
    value = 1 + 0j
    for mark in state.marks:
        value *= _relative_power(mark.position, float(mark.exponent), state.xi)
    return value


def radial_constraint(state: RadialState) -> RadialResidual:
    """Residuals of e^{2i xi} = e^{ct} Pi0 prod P^-e for c = -2 and for the mode's c"""
    lhs = cmath.exp(2j * state.xi)
    product = state.pi0 * _mark_product(state)
    printed = math.exp(-2.0 * state.t) * product
    normalized = math.exp(state.constant * state.t) * product
    return RadialResidual(abs(lhs - printed), abs(lhs - normalized), abs(abs(printed) - 1.0))


# Launch

def _locate(qd: FactorizedQD, point: complex) -> complex:
    for loc, _ in qd.factors:
        if abs(loc - point) < CIRCLE_TOL:
            return loc
    return point


def _on_circle(position: complex) -> bool:
    return abs(abs(position) - 1.0) < CIRCLE_TOL


def _launch(qd: FactorizedQD, start: RadialStart, cfg: RunConfig) -> RadialState:
    u0 = cmath.exp(1j * start.xi0)
    launch = _locate(qd, u0)
    N = as_fraction(start.N)
    if N != qd.exponent_at(launch):
        raise DomainError(f"launch degree {N} does not match the factor at {launch}")
    K = qd.exponent_at(0)
    if K.denominator != 1:
        raise DomainError(f"degree at the origin must be an integer, got {K}")
    rest = qd.without(launch).without(0)

    a_n = qd.leading_coefficient(launch)
    arg_a = math.remainder(cmath.phase(a_n) + float(N + 2) * (math.pi / 2 + start.xi0),
                           2 * math.pi)
    angles = angles_for_coefficient(rational_angle(arg_a), N, start.phi)
    if not 0 <= start.direction_index < len(angles):
        raise InvalidDirectionError(
            f"direction_index {start.direction_index} not in 0..{len(angles) - 1} ({angles})")
    q = angles[start.direction_index]
    mu_minus, mu_plus = base_exponents(N, q)

    pi0 = cmath.exp(1j * float(N) * start.xi0)
    for loc, exp in rest.factors:
        pi0 /= _relative_power(loc, float(exp), start.xi0)

    scale = math.prod(abs(loc) ** float(exp) for loc, exp in rest.factors if not _on_circle(loc))
    marks0 = [MarkedPoint(loc, exp, BOUNDARY_OTHER if _on_circle(loc) else INTERIOR)
              for loc, exp in rest.factors]
    s = cfg.s
    while True:
        disc = DiscSlitMap.make(u0, float(q), s)
        pulled = np.atleast_1d(disc.pullback(np.array([m.position for m in marks0],
                                                      dtype=complex))) if marks0 else []
        marks = [m.moved(p / abs(p) if m.role == BOUNDARY_OTHER else p)
                 for m, p in zip(marks0, pulled)]
        c_minus, zeta, c_plus = disc.landmarks()
        for pos, exp, role in ((c_minus, mu_minus, BASE_MINUS), (c_plus, mu_plus, BASE_PLUS)):
            if exp != 0:
                marks.append(MarkedPoint(complex(pos) / abs(pos), exp, role))

        xi = start.xi0 + cmath.phase(zeta / u0)
        state = RadialState(t=disc.time, xi=xi, K=int(K), marks=tuple(marks), pi0=pi0, N=N,
                            prefactor=abs(qd.prefactor), phi=start.phi, tip=disc.tip,
                            arclength=abs(disc.tip - u0), mode=cfg.radial_mode,
                            heading=(disc.tip - u0) / abs(disc.tip - u0),
                            interior_scale=scale)
        ratio = (math.exp(state.constant * state.t) * pi0 * _mark_product(state)
                 / cmath.exp(2j * xi))
        width = cmath.phase(c_plus / zeta) - cmath.phase(c_minus / zeta)
        mismatch = abs(cmath.phase(ratio) / 2.0) / width
        if mismatch <= cfg.tol_startup:
            logger.info("radial arc launched from angle %.6g at %s*pi (N=%s, K=%s)",
                        start.xi0, q, N, K)
            return replace(state, xi=xi + cmath.phase(ratio) / 2.0)
        if s / 2.0 < cfg.startup_floor:
            raise StartupTooCoarseError(
                f"radial startup mismatch {mismatch:.3e} above {cfg.tol_startup}")
        s /= 2.0
        logger.debug("radial startup mismatch %.3e, halving s to %.3e", mismatch, s)


# Tip motion

def _speed(qd: FactorizedQD, state: RadialState, xi: float, positions: np.ndarray,
           t: float, tip: complex) -> float:
    """2 sqrt(|Phi_t(u) / Q(gamma)|) with |R_t| = |R| e^{-t(K+2)} prod (|a_j|/|A_j|)^alpha_j"""
    u = cmath.exp(1j * xi)
    value = state.prefactor * state.interior_scale * math.exp(-t * (state.K + 2))
    for mark, pos in zip(state.marks, positions):
        value *= abs(u - pos) ** float(mark.exponent)
        if mark.role == INTERIOR:
            value /= abs(pos) ** float(mark.exponent)
    return 2.0 * math.sqrt(value / abs(qd.evaluate(tip)))


def _velocity(qd: FactorizedQD, state: RadialState, xi: float, positions: np.ndarray,
              t: float, tip: complex, heading: complex) -> complex:
    v_plus, v_minus = qd.trajectory_tangents(tip, state.phi)
    direction = v_plus if (v_plus * heading.conjugate()).real >= 0 else v_minus
    return _speed(qd, state, xi, positions, t, tip) * direction


def radial_tip_velocity(state: RadialState, qd: FactorizedQD) -> complex:
    if not qd.is_ordinary(state.tip):
        raise SingularStateError(f"tip {state.tip} is a zero or pole of the differential")
    return _velocity(qd, state, state.xi, state.positions, state.t, state.tip, state.heading)


# Stepping

def _advance(state: RadialState, series: SeriesCoefficients, h: float,
             qd: FactorizedQD) -> RadialState:
    both_xis, both_positions = series.evaluate_many((0.5 * h, h))
    xis, positions = both_xis[1], both_positions[1]
    on_circle = np.array([m.role != INTERIOR for m in state.marks], dtype=bool)
    positions = np.where(on_circle, positions / np.abs(np.where(on_circle, positions, 1.0)),
                         positions)
    marks = tuple(m.moved(p) for m, p in zip(state.marks, positions))
    new = replace(state, t=state.t + h, xi=float(xis[0]), marks=marks)

    # Kutta's third-order rule for the tip, Simpson's rule for the length
    v0 = _velocity(qd, state, state.xi, state.positions, state.t, state.tip, state.heading)
    xi_mid, pos_mid = both_xis[0], both_positions[0]
    tip_mid = state.tip + 0.5 * h * v0
    v_mid = _velocity(qd, state, float(xi_mid[0]), pos_mid, state.t + h / 2.0, tip_mid, v0)
    tip_end = state.tip + h * (2.0 * v_mid - v0)
    v1 = _velocity(qd, state, new.xi, new.positions, new.t, tip_end, v_mid)
    tip = state.tip + h / 6.0 * (v0 + 4.0 * v_mid + v1)
    length = h / 6.0 * (abs(v0) + 4.0 * abs(v_mid) + abs(v1))
    return replace(new, tip=tip, arclength=state.arclength + length, heading=v1 / abs(v1))


def _sample(state: RadialState, qd: FactorizedQD, xi_dot: float = float('nan')) -> TraceSample:
    residual = radial_constraint(state)
    try:
        velocity = radial_tip_velocity(state, qd)
    except LoewnerQDError:
        velocity = complex('nan')
    return TraceSample(t=state.t, xis=(state.xi,), tip=state.tip, arclength=state.arclength,
                       residual=residual.normalized,
                       marks=tuple((m.position, m.exponent) for m in state.marks),
                       xi_dots=(xi_dot,), velocity=velocity, phi=state.phi,
                       extras=(residual.printed, residual.modulus_defect, residual.normalized))


def radial_trace(qd: FactorizedQD, start: RadialStart, capacity: float,
                 cfg: Optional[RunConfig] = None) -> TraceResult:
    """Grow one trajectory slit from e^{i xi0} until conformal-radius time capacity"""
    cfg = (cfg or RunConfig()).validate()
    result = TraceResult(kind='radial', extra_columns=('residual_normalized',))
    u0 = cmath.exp(1j * start.xi0)
    result.append(TraceSample(t=0.0, xis=(float(start.xi0),), tip=u0, arclength=0.0,
                              phi=start.phi, extras=(0.0, 0.0, 0.0)))

    state = None
    times: List[float] = []
    rates: List[float] = []
    mid = 0
    try:
        state = _launch(qd, start, cfg)
        result.append(_sample(state, qd))
        reason = 'capacity_reached'
        for _ in range(cfg.max_steps):
            if state.t >= capacity - 1e-14:
                break
            gap = _min_gap(state)
            if gap < cfg.tol_collision:
                reason = 'loop_detected'
                break
            series = _series(state, cfg.order)
            if series.imag_residual > cfg.tol_imag:
                raise NonRealDriftError(f"Im xi' = {series.imag_residual:.3e} at t={state.t}")
            xi_dot = float(series.xi_dots[0])
            result.samples[-1].xi_dots = (xi_dot,)
            times.append(state.t)
            rates.append(abs(xi_dot))
            while mid + 1 < len(times) and times[mid + 1] <= 0.5 * state.t:
                mid += 1
            if abs(xi_dot) > cfg.rate_limit(rates[mid], state.t):
                logger.info("loop guard fired at t=%.6g with |xi'|=%.3e", state.t, abs(xi_dot))
                reason = 'loop_detected'
                break

            rate = abs(xi_dot) + float(np.max(np.abs(series.mark_dots), initial=0.0))
            h = cfg.step_size(state.t, gap, rate, capacity - state.t)
            state = _advance(state, series, h, qd)
            result.append(_sample(state, qd))
        else:
            raise LoewnerQDError(f"radial trace did not finish within {cfg.max_steps} steps")
        result.finish(reason)
    except LoewnerQDError as exc:
        logger.info("radial trace stopped at t=%s: %s", state.t if state else 0.0, exc)
        result.finish('numerical_failure', str(exc))

    logger.info("radial trace finished (%s) with %d samples", result.stop_reason,
                len(result.samples))
    return result
