"""
Tilted Straight-Slit Maps
Explicit hydrodynamically normalized maps of the half-plane onto the half-plane
minus a straight slit, with Newton inversion and closed-form landmarks.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

import qd_config as config
from src.differentials.qdiff import branch_power
from src.errors import BranchError, DomainError, NoConvergenceError

logger = logging.getLogger(__name__)


def capacity_factor(p: float) -> float:
    """lambda(p) = p(1-p)/4: the slit has half-plane capacity 2 lambda(p) t_raw"""
    return p * (1.0 - p) / 4.0


def driving_constant(p: float) -> float:
    """c(p) with xi(t) = x + c(p) sqrt(t) for a straight slit at angle pi p"""
    return 2.0 * (1.0 - 2.0 * p) / math.sqrt(p * (1.0 - p))


@dataclass(frozen=True)
class TiltedSlitMap:
    """F(z) = (z-x-(1-p)s)^p (z-x+ps)^(1-p) + x with s = sqrt(t_raw)"""

    p: float
    x: float
    t_raw: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"slit angle fraction p={self.p} outside (0, 1)")
        if not self.t_raw > 0.0:
            raise DomainError(f"t_raw={self.t_raw} must be positive")

    @classmethod
    def make(cls, p: float, x: float, hcap: float) -> 'TiltedSlitMap':
        """Slit of angle pi p from x with half-plane capacity exactly hcap"""
        if not 0.0 < p < 1.0:
            raise DomainError(f"slit angle fraction p={p} outside (0, 1)")
        if not hcap > 0.0:
            raise DomainError(f"half-plane capacity {hcap} must be positive")
        return cls(float(p), float(x), hcap / (2.0 * capacity_factor(p)))

    @classmethod
    def through(cls, x: float, target: complex) -> 'TiltedSlitMap':
        """The straight slit from x whose tip is the point target"""
        d = complex(target) - x
        if d.imag <= 0.0:
            raise DomainError(f"slit tip {target} must lie in the open half-plane")
        p = cmath.phase(d) / math.pi
        unit_tip = p ** p * (1.0 - p) ** (1.0 - p)
        s = abs(d) / unit_tip
        return cls(p, float(x), s * s)

    @property
    def s(self) -> float:
        return math.sqrt(self.t_raw)

    @property
    def capacity(self) -> float:
        return 2.0 * capacity_factor(self.p) * self.t_raw

    @property
    def tip(self) -> complex:
        return complex(self.apply(self.landmarks()[1]))

    # Evaluation

    def apply(self, z):
        a = (1.0 - self.p) * self.s
        b = self.p * self.s
        u = z - self.x
        return branch_power(u - a, self.p) * branch_power(u + b, 1.0 - self.p) + self.x

    def derivative(self, z):
        a = (1.0 - self.p) * self.s
        b = self.p * self.s
        u = z - self.x
        return (branch_power(u - a, self.p - 1.0) * branch_power(u + b, -self.p)
                * (u - (1.0 - 2.0 * self.p) * self.s))

    def landmarks(self) -> Tuple[float, float, float]:
        """(c_minus, tip_preimage, c_plus): base preimages and critical point"""
        s = self.s
        return (self.x - self.p * s,
                self.x + (1.0 - 2.0 * self.p) * s,
                self.x + (1.0 - self.p) * s)

    # Inversion

    def initial_guess(self, w):
        """Hydrodynamic inverse far away, square-root chart near the tip"""
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        shifted = w - self.x
        safe = np.where(shifted == 0, 1.0, shifted)
        guess = np.where(shifted == 0, w + 1j * self.s, w + self.capacity / safe)

        _, zeta, _ = self.landmarks()
        tip = complex(self.apply(complex(zeta)))
        near_tip = np.abs(w - tip) < config.NEWTON['tip_chart_radius'] * self.s
        if np.any(near_tip):
            u = zeta - self.x
            second = (tip - self.x) * (-self.p / (u - (1 - self.p) * self.s) ** 2
                                       - (1 - self.p) / (u + self.p * self.s) ** 2)
            root = np.sqrt(2.0 * (w[near_tip] - tip) / second)
            root = np.where(root.imag < 0, -root, root)
            guess[near_tip] = zeta + root

        return np.where(guess.imag < 0, guess.real + 0j, guess)

    def invert(self, w, guess=None, tol: Optional[float] = None,
               max_iter: Optional[int] = None):
        """Newton inversion of apply, damped to stay in the closed half-plane"""
        tol = config.TOLERANCES['newton'] if tol is None else tol
        max_iter = config.NEWTON['max_iter'] if max_iter is None else max_iter
        scalar = np.ndim(w) == 0

        w = np.atleast_1d(np.asarray(w, dtype=complex))
        z = self.initial_guess(w) if guess is None \
            else np.atleast_1d(np.asarray(guess, dtype=complex)).copy()
        scale = np.maximum(1.0, np.abs(w))
        eps = 1e-14 * scale

        active = np.ones(w.shape, dtype=bool)
        for _ in range(max_iter):
            residual = self.apply(z[active]) - w[active]
            done = np.abs(residual) < tol * scale[active]
            idx = np.flatnonzero(active)
            active[idx[done]] = False
            if not active.any():
                break
            idx = idx[~done]
            step = residual[~done] / self.derivative(z[idx])
            candidate = z[idx] - step
            for _ in range(config.NEWTON['damping_halvings']):
                below = candidate.imag < -eps[idx]
                if not below.any():
                    break
                step = np.where(below, step / 2.0, step)
                candidate = np.where(below, z[idx] - step, candidate)
            candidate = np.where(candidate.imag < 0, candidate.real + 0j, candidate)
            z[idx] = candidate

        if active.any():
            residual = np.abs(self.apply(z[active]) - w[active])
            if np.any(residual >= 1e3 * tol * scale[active]):
                bad = w[active][np.argmax(residual)]
                raise NoConvergenceError(
                    f"Newton inversion of {self} failed near w={bad}")
            logger.debug("Newton accepted %d points at relaxed tolerance", active.sum())

        if np.any(z.imag < -eps):
            raise BranchError(f"inverse image left the half-plane: {z[z.imag < -eps]}")
        z = np.where(z.imag < 0, z.real + 0j, z)
        return complex(z[0]) if scalar else z


make = TiltedSlitMap.make
