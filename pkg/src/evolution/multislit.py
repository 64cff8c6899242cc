"""
Multiple-Slit Driving System
Several trajectory slits grown together with prescribed capacity weights b_k
(sum b_k = 1), one driving value per slit and a shared set of marked points.
"""

import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.differentials.qdiff import FactorizedQD, as_fraction
from src.errors import (DomainError, InvalidDirectionError, LoewnerQDError, NonRealDriftError,
                        SingularStateError, StartupTooCoarseError)
from src.evolution.chordal import (BASE_MINUS, BASE_PLUS, BOUNDARY_OTHER, INTERIOR, MarkedPoint,
                                   base_exponents, check_launch_degree, departure_angles,
                                   moved_marks)
from src.evolution.run_config import RunConfig
from src.evolution.series import SeriesCoefficients, chordal_series
from src.evolution.trace_result import TraceResult, TraceSample
from src.maps.slitmaps import TiltedSlitMap

logger = logging.getLogger(__name__)

Weights = Union[Sequence[float], Callable[[float], Sequence[float]]]


@dataclass(frozen=True)
class SlitStart:
    xi0: float
    phi: float
    N: Fraction = Fraction(0)
    direction_index: int = 0


@dataclass(frozen=True)
class MultiState:
    t: float
    xis: Tuple[float, ...]
    weights: Tuple[float, ...]
    marks: Tuple[MarkedPoint, ...]
    sigma0: float
    Ns: Tuple[Fraction, ...]

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
class MultiDerivative:
    xi_dots: np.ndarray
    mark_dots: np.ndarray
    imag_residual: float


def weights_at(weights: Weights, t: float, n: int) -> Tuple[float, ...]:
    values = tuple(float(b) for b in (weights(t) if callable(weights) else weights))
    if len(values) != n:
        raise DomainError(f"expected {n} weights, got {len(values)}")
    if any(b <= 0 for b in values) or abs(sum(values) - 1.0) > 1e-12:
        raise DomainError(f"weights {values} must be positive and sum to 1")
    return values


def _series(state: MultiState, order: int, mode: str) -> SeriesCoefficients:
    return chordal_series(list(state.xis), state.positions, state.exponents,
                          list(state.weights), order, mode)


def _min_gap(state: MultiState) -> float:
    xis = np.array(state.xis)
    gap = math.inf
    if state.marks:
        gap = float(np.min(np.abs(state.positions[:, None] - xis[None, :])))
    if xis.size > 1:
        pair = np.abs(xis[:, None] - xis[None, :])
        gap = min(gap, float(np.min(pair[~np.eye(xis.size, dtype=bool)])))
    return gap


def multi_rhs(state: MultiState, mode: str = RunConfig.multi_mode,
              tol_collision: float = RunConfig.tol_collision) -> MultiDerivative:
    """Driver and mark velocities of the joint system"""
    if _min_gap(state) < tol_collision:
        raise SingularStateError(f"collision among drivers or marks at t={state.t}")
    series = _series(state, 1, mode)
    return MultiDerivative(series.xi_dots.copy(), series.mark_dots, series.imag_residual)


def multi_constraint(state: MultiState) -> float:
    """|2 sum xi_k + sum e P - Sigma0|"""
    total = 2.0 * sum(state.xis) + complex(np.sum(state.exponents * state.positions))
    return abs(total - state.sigma0)


def _pull(slit: TiltedSlitMap, points: Sequence[complex], tol: float) -> np.ndarray:
    if not len(points):
        return np.array([], dtype=complex)
    return np.atleast_1d(slit.invert(np.array(points, dtype=complex), tol=tol))


def _launch_all(qd: FactorizedQD, starts: Sequence[SlitStart], weights: Tuple[float, ...],
                cfg: RunConfig):
    """Place the slits one at a time, each with capacity 2 b_k s"""
    rest = qd
    for start in starts:
        rest = rest.without(start.xi0)
    base_marks = [MarkedPoint(loc, exp, BOUNDARY_OTHER if loc.imag == 0 else INTERIOR)
                  for loc, exp in rest.factors]
    sigma0 = sum(float(as_fraction(st.N)) * st.xi0 for st in starts) \
        + sum(float(exp) * loc for loc, exp in rest.factors).real

    plans = []
    for k, start in enumerate(starts):
        N = as_fraction(start.N)
        check_launch_degree(qd, start.xi0, N)
        angles = departure_angles(qd, start.xi0, N, start.phi)
        if not 0 <= start.direction_index < len(angles):
            raise InvalidDirectionError(
                f"slit {k}: direction_index {start.direction_index} not in 0..{len(angles) - 1}")
        plans.append((N, angles[start.direction_index]))

    s = cfg.s
    while True:
        marks = list(base_marks)
        launch_points = [float(st.xi0) for st in starts]
        xis: List[float] = []
        mismatch = 0.0
        for k, (N, q) in enumerate(plans):
            slit = TiltedSlitMap.make(float(q), launch_points[k], 2.0 * weights[k] * s)
            pulled = _pull(slit, [m.position for m in marks], cfg.tol_newton)
            marks = [m.moved(p.real + 0j if m.position.imag == 0 else p)
                     for m, p in zip(marks, pulled)]
            others = _pull(slit, xis + launch_points[k + 1:], cfg.tol_newton).real
            xis = list(others[:len(xis)])
            launch_points[k + 1:] = list(others[len(xis):])

            c_minus, zeta, c_plus = slit.landmarks()
            mu_minus, mu_plus = base_exponents(N, q)
            for pos, exp, role in ((c_minus, mu_minus, BASE_MINUS), (c_plus, mu_plus, BASE_PLUS)):
                if exp != 0:
                    marks.append(MarkedPoint(complex(pos), exp, role))

            if k < len(plans) - 1:
                xis.append(float(zeta))
                continue
            weighted = sum((float(m.exponent) * m.position for m in marks), 0j)
            xi = (sigma0 - weighted.real - 2.0 * sum(xis)) / 2.0
            mismatch = abs(xi - zeta) / (c_plus - c_minus)
            xis.append(xi)

        if mismatch <= cfg.tol_startup:
            logger.info("launched %d slits in order %s at s=%.3e", len(starts),
                        [st.xi0 for st in starts], s)
            return MultiState(t=s, xis=tuple(xis), weights=weights, marks=tuple(marks),
                              sigma0=sigma0, Ns=tuple(N for N, _ in plans))
        if s / 2.0 < cfg.startup_floor:
            raise StartupTooCoarseError(
                f"joint startup mismatch {mismatch:.3e} above {cfg.tol_startup}")
        s /= 2.0
        logger.debug("joint startup mismatch %.3e, halving s to %.3e", mismatch, s)


def _advance(state: MultiState, series: SeriesCoefficients, h: float) -> MultiState:
    xis, positions = series.evaluate_many((0.5 * h, h))
    marks = moved_marks(state.marks, positions[1], state.real_mask)
    return MultiState(t=state.t + h, xis=tuple(float(x) for x in xis[1]), weights=state.weights,
                      marks=marks, sigma0=state.sigma0, Ns=state.Ns)


def _sample(state: MultiState) -> TraceSample:
    return TraceSample(t=state.t, xis=state.xis, residual=multi_constraint(state),
                       marks=tuple((m.position, m.exponent) for m in state.marks),
                       xi_dots=tuple(float('nan') for _ in state.xis))


def multi_trace(qd: FactorizedQD, starts: Sequence[SlitStart], weights: Weights,
                capacity: float, cfg: Optional[RunConfig] = None) -> TraceResult:
    """Grow every slit until the total capacity time reaches capacity"""
    cfg = (cfg or RunConfig()).validate()
    starts = [st if isinstance(st, SlitStart) else SlitStart(**st) for st in starts]
    if not starts:
        raise DomainError("multi_trace needs at least one slit")
    result = TraceResult(kind='multi')
    result.append(TraceSample(t=0.0, xis=tuple(float(st.xi0) for st in starts)))

    state = None
    times: List[float] = []
    rates: List[float] = []
    mid = 0
    try:
        state = _launch_all(qd, starts, weights_at(weights, 0.0, len(starts)), cfg)
        result.add_square_root_rows(_sample(state), cfg.startup_rows)
        reason = 'capacity_reached'
        for _ in range(cfg.max_steps):
            if state.t >= capacity - 1e-14:
                break
            gap = _min_gap(state)
            if gap < cfg.tol_collision:
                reason = 'loop_detected'
                break
            state = replace(state, weights=weights_at(weights, state.t, len(starts)))
            series = _series(state, cfg.order, cfg.multi_mode)
            xi_dots = series.xi_dots
            result.samples[-1].xi_dots = tuple(float(x) for x in xi_dots)
            if series.imag_residual > cfg.tol_imag:
                raise NonRealDriftError(f"Im xi' = {series.imag_residual:.3e} at t={state.t}")

            fastest = float(np.max(np.abs(xi_dots)))
            times.append(state.t)
            rates.append(fastest)
            while mid + 1 < len(times) and times[mid + 1] <= 0.5 * state.t:
                mid += 1
            if fastest > cfg.rate_limit(rates[mid], state.t):
                logger.info("loop guard fired at t=%.6g with |xi'|=%.3e", state.t, fastest)
                reason = 'loop_detected'
                break

            rate = fastest + float(np.max(np.abs(series.mark_dots), initial=0.0))
            h = cfg.step_size(state.t, gap, rate, capacity - state.t)
            state = _advance(state, series, h)
            result.append(_sample(state))
        else:
            raise LoewnerQDError(f"multi trace did not finish within {cfg.max_steps} steps")
        result.finish(reason)
    except LoewnerQDError as exc:
        logger.info("multi trace stopped at t=%s: %s", state.t if state else 0.0, exc)
        result.finish('numerical_failure', str(exc))

    logger.info("multi trace finished (%s) with %d samples", result.stop_reason,
                len(result.samples))
    return result
