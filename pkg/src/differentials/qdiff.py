"""
Factorized Quadratic Differentials
Product-form differentials R * prod (z - zeta_j)^lambda_j with exact exponents
and a branch convention that is continuous on the closed upper half-plane.
"""

import cmath
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple, Union

import numpy as np

from src.errors import DegeneratePointError, DomainError, PoleHitError

RationalLike = Union[Fraction, int, str, float]

# Angles within this distance of a small-denominator multiple of pi snap to it
_ANGLE_SNAP = 1e-10
_MAX_DENOMINATOR = 720


def as_fraction(value: RationalLike) -> Fraction:
    """Coerce ints, 'p/q' strings, Fractions and floats to an exact Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        snapped = Fraction(value).limit_denominator(_MAX_DENOMINATOR)
        if abs(float(snapped) - value) < _ANGLE_SNAP:
            return snapped
        return Fraction(value)
    return Fraction(value)


def rational_angle(angle: float) -> Fraction:
    """Express an angle as an exact multiple of pi when it is one"""
    return as_fraction(angle / math.pi)


def branch_log(z):
    """Logarithm with its cut along the downward vertical ray.

    The argument lies in [-pi/2, 3pi/2), so the closed upper half-plane
    never meets the cut. Works on scalars and numpy arrays.
    """
    if isinstance(z, np.ndarray):
        out = np.log(z.astype(complex))
        return np.where(out.imag < -math.pi / 2, out + 2j * math.pi, out)
    out = cmath.log(z)
    if out.imag < -math.pi / 2:
        out += 2j * math.pi
    return out


def branch_power(z, exponent):
    """(z)^exponent on the downward-cut branch"""
    return np.exp(float(exponent) * branch_log(z)) if isinstance(z, np.ndarray) \
        else cmath.exp(float(exponent) * branch_log(z))


@dataclass(frozen=True)
class FactorizedQD:
    """Quadratic differential R * prod (z - zeta_j)^lambda_j"""

    prefactor: complex
    factors: Tuple[Tuple[complex, Fraction], ...] = ()

    @classmethod
    def build(cls, prefactor: complex = 1.0,
              factors: Iterable[Tuple[complex, RationalLike]] = ()) -> 'FactorizedQD':
        """Merge duplicate locations, drop zero exponents and freeze"""
        prefactor = complex(prefactor)
        if prefactor == 0:
            raise DomainError("prefactor must be nonzero")

        merged: List[Tuple[complex, Fraction]] = []
        for loc, exp in factors:
            loc = complex(loc)
            exp = as_fraction(exp)
            for i, (other, other_exp) in enumerate(merged):
                if other == loc:
                    merged[i] = (other, other_exp + exp)
                    break
            else:
                merged.append((loc, exp))

        kept = tuple((loc, exp) for loc, exp in merged if exp != 0)
        return cls(prefactor, kept)

    # Evaluation

    def evaluate(self, z: complex) -> complex:
        """Direct evaluation of the product form"""
        z = complex(z)
        value = self.prefactor
        for loc, exp in self.factors:
            if z == loc:
                if exp < 0:
                    raise PoleHitError(f"pole of order {exp} hit at {loc}")
                return 0j
            value *= branch_power(z - loc, exp)
        return value

    def log_derivative(self, z: complex) -> complex:
        """Q'/Q = sum lambda_j / (z - zeta_j)"""
        z = complex(z)
        total = 0j
        for loc, exp in self.factors:
            if z == loc:
                raise ZeroDivisionError(f"log-derivative undefined at factor {loc}")
            total += float(exp) / (z - loc)
        return total

    def rotate(self, theta: float) -> 'FactorizedQD':
        """Turn theta-trajectories into 0-trajectories: R -> R e^{-2i theta}"""
        return FactorizedQD(self.prefactor * cmath.exp(-2j * theta), self.factors)

    def trajectory_tangents(self, z: complex, phi: float) -> Tuple[complex, complex]:
        """The two unit directions v with arg[Q(z) v^2] = 2 phi"""
        _, v = self.trajectory_frame(z, phi)
        return v, -v

    def trajectory_frame(self, z: complex, phi: float) -> Tuple[float, complex]:
        """|Q(z)| and one unit direction v with arg[Q(z) v^2] = 2 phi"""
        value = self._ordinary_value(z)
        return abs(value), cmath.exp(1j * (phi - cmath.phase(value) / 2))

    def exponent_sum(self) -> Fraction:
        """Sum of exponents; the degree at infinity is -(sum) - 4"""
        return sum((exp for _, exp in self.factors), Fraction(0))

    # Bookkeeping helpers

    def exponent_at(self, loc: complex) -> Fraction:
        for other, exp in self.factors:
            if other == complex(loc):
                return exp
        return Fraction(0)

    def without(self, loc: complex) -> 'FactorizedQD':
        """Drop the factor at loc (if any)"""
        return FactorizedQD(self.prefactor,
                            tuple(f for f in self.factors if f[0] != complex(loc)))

    def leading_coefficient(self, x: complex) -> complex:
        """Coefficient a_N of Q(w) ~ a_N (w - x)^N at x, approached from above"""
        return self.without(x).evaluate(x)

    def is_ordinary(self, z: complex) -> bool:
        try:
            self._ordinary_value(z)
        except DegeneratePointError:
            return False
        return True

    def _ordinary_value(self, z: complex) -> complex:
        try:
            value = self.evaluate(z)
        except PoleHitError as exc:
            raise DegeneratePointError(str(exc)) from exc
        if value == 0 or not cmath.isfinite(value):
            raise DegeneratePointError(f"{z} is a zero of the differential")
        return value

    # Serialization

    def to_dict(self) -> dict:
        return {
            'prefactor': [self.prefactor.real, self.prefactor.imag],
            'factors': [
                {'loc': [loc.real, loc.imag], 'exp': f"{exp.numerator}/{exp.denominator}"}
                for loc, exp in self.factors
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, payload: Optional[dict]) -> 'FactorizedQD':
        if not payload:
            return cls.build(1.0)
        re, im = payload.get('prefactor', [1.0, 0.0])
        factors = [(complex(f['loc'][0], f['loc'][1]), as_fraction(f['exp']))
                   for f in payload.get('factors', [])]
        return cls.build(complex(re, im), factors)

    @classmethod
    def from_json(cls, text: str) -> 'FactorizedQD':
        return cls.from_dict(json.loads(text))


def launch_form(xi0: float, N: RationalLike,
                factors: Iterable[Tuple[complex, RationalLike]] = (),
                prefactor: complex = 1.0) -> FactorizedQD:
    """Q(w) = R (w - xi0)^N prod (w - a_j)^alpha_j"""
    return FactorizedQD.build(prefactor, [(xi0, as_fraction(N)), *factors])
