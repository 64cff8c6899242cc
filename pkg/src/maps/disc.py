"""
Disc Slit Maps
Tilted half-plane slit maps transplanted to the unit disc by a Cayley map at
the launch point and renormalized so that 0 is fixed with positive derivative.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

import qd_config as config
from src.maps.slitmaps import TiltedSlitMap


def cayley(u: complex, z):
    """Half-plane to disc, 0 -> u, i -> 0"""
    return u * (1j - z) / (1j + z)


def cayley_inverse(u: complex, w):
    return 1j * (u - w) / (u + w)


@dataclass(frozen=True)
class DiscSlitMap:
    """f = T o F o T^-1 o M: disc onto disc minus a slit from u0, f(0)=0, f'(0)>0"""

    half: TiltedSlitMap
    u0: complex
    alpha: float
    c: complex
    radius: float

    @classmethod
    def normalized(cls, half: TiltedSlitMap, u0: complex) -> 'DiscSlitMap':
        z_m = half.invert(1j)
        m = cayley(u0, z_m)
        g_prime = u0 * u0 * half.derivative(z_m) / (u0 + m) ** 2
        alpha = -cmath.phase(g_prime)
        c = m * cmath.exp(-1j * alpha)
        radius = abs(g_prime) * (1.0 - abs(m) ** 2)
        return cls(half, complex(u0), alpha, complex(c), radius)

    @classmethod
    def make(cls, u0: complex, p: float, s: float) -> 'DiscSlitMap':
        """Slit at angle pi p from the counterclockwise tangent with f'(0) = e^-s"""
        hcap = s
        disc_map = cls.normalized(TiltedSlitMap.make(p, 0.0, hcap), u0)
        for _ in range(config.RADIAL['calibration_iter']):
            loss = disc_map.time
            if abs(loss - s) <= 1e-14 * s:
                break
            hcap *= s / loss
            disc_map = cls.normalized(TiltedSlitMap.make(p, 0.0, hcap), u0)
        return disc_map

    @classmethod
    def through(cls, u0: complex, target: complex) -> 'DiscSlitMap':
        """The conjugated straight slit from u0 whose tip is target"""
        half = TiltedSlitMap.through(0.0, cayley_inverse(u0, complex(target)))
        return cls.normalized(half, u0)

    @property
    def time(self) -> float:
        """Conformal-radius time -log f'(0)"""
        return -math.log(self.radius)

    @property
    def tip(self) -> complex:
        return complex(cayley(self.u0, self.half.tip))

    def _m_inverse(self, w):
        rot = np.exp(-1j * self.alpha) * w
        return (rot - self.c) / (1.0 - np.conj(self.c) * rot)

    def _m(self, z):
        return np.exp(1j * self.alpha) * (z + self.c) / (1.0 + np.conj(self.c) * z)

    def apply(self, z):
        return cayley(self.u0, self.half.apply(cayley_inverse(self.u0, self._m(z))))

    def boundary_preimage(self, x: float) -> complex:
        """Preimage on the circle of the half-plane boundary point x"""
        return complex(self._m_inverse(cayley(self.u0, x)))

    def landmarks(self):
        """(C-, tip preimage, C+) on the unit circle"""
        return tuple(self.boundary_preimage(x) for x in self.half.landmarks())

    def pullback(self, w):
        """f^-1 on the disc, extended to the exterior by reflection"""
        scalar = np.ndim(w) == 0
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        outside = np.abs(w) > 1.0
        src = np.where(outside, 1.0 / np.conj(np.where(w == 0, 1.0, w)), w)
        z = self._m_inverse(cayley(self.u0, self.half.invert(cayley_inverse(self.u0, src))))
        z = np.where(outside, 1.0 / np.conj(z), z)
        return complex(z[0]) if scalar else z
