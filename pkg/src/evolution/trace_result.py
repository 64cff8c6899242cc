"""
Trace Results
Sampled columns of one integration run and their CSV rendering.
"""

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np

MarkSnapshot = Tuple[Tuple[complex, Fraction], ...]

STOP_REASONS = ('capacity_reached', 'length_reached', 'loop_detected', 'path_exhausted',
                'numerical_failure')


@dataclass
class TraceSample:
    """One row of a trace"""

    t: float
    xis: Tuple[float, ...]
    tip: complex = complex('nan')
    arclength: float = float('nan')
    residual: float = 0.0
    marks: MarkSnapshot = ()
    xi_dots: Tuple[float, ...] = ()
    velocity: complex = complex('nan')
    phi: float = float('nan')
    extras: Tuple[float, ...] = ()

    @property
    def xi(self) -> float:
        return self.xis[0]


@dataclass
class TraceResult:
    """Samples of one run plus the reason it stopped"""

    samples: List[TraceSample] = field(default_factory=list)
    stop_reason: str = 'capacity_reached'
    message: str = ''
    kind: str = 'chordal'
    corners: List[float] = field(default_factory=list)
    extra_columns: Tuple[str, ...] = ()

    def append(self, sample: TraceSample):
        if self.samples and sample.t <= self.samples[-1].t:
            raise ValueError(f"sample times must increase ({sample.t} after {self.samples[-1].t})")
        self.samples.append(sample)

    def finish(self, reason: str, message: str = ''):
        if reason not in STOP_REASONS:
            raise ValueError(f"unknown stop reason {reason!r}")
        self.stop_reason = reason
        self.message = message

    def add_square_root_rows(self, end: TraceSample, count: int):
        """count - 1 rows of a straight-slit stretch, then its end sample.

        Over a straight slit the driver is x0 + c sqrt(t - t0), so rows sit at
        t0 + (t1 - t0) f^2 with the driver, tip and arclength linear in f.
        """
        first = self.samples[-1]
        span = end.t - first.t
        for j in range(1, count):
            f = j / count
            self.append(TraceSample(
                t=first.t + span * f * f,
                xis=tuple(a + (b - a) * f for a, b in zip(first.xis, end.xis)),
                tip=first.tip + (end.tip - first.tip) * f,
                arclength=first.arclength + (end.arclength - first.arclength) * f,
                residual=end.residual, phi=end.phi, extras=end.extras,
                xi_dots=tuple(float('nan') for _ in end.xis)))
        self.append(end)

    @property
    def partial(self) -> bool:
        return self.stop_reason in ('loop_detected', 'numerical_failure')

    # Columns

    @property
    def t(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def xi(self) -> np.ndarray:
        return np.array([s.xis[0] for s in self.samples])

    def xi_column(self, index: int) -> np.ndarray:
        return np.array([s.xis[index] for s in self.samples])

    @property
    def tips(self) -> np.ndarray:
        return np.array([s.tip for s in self.samples])

    @property
    def arclength(self) -> np.ndarray:
        return np.array([s.arclength for s in self.samples])

    @property
    def residuals(self) -> np.ndarray:
        return np.array([s.residual for s in self.samples])

    @property
    def xi_dots(self) -> np.ndarray:
        return np.array([s.xi_dots[0] if s.xi_dots else np.nan for s in self.samples])

    # CSV

    def header(self) -> List[str]:
        n_xi = len(self.samples[0].xis) if self.samples else 1
        n_marks = max((len(s.marks) for s in self.samples), default=0)
        if self.kind == 'multi':
            cols = ['t'] + [f'xi{i + 1}' for i in range(n_xi)] + ['residual']
        elif self.kind == 'radial':
            cols = ['t', 'xi', 'tip_re', 'tip_im', 'residual_printed', 'modulus_defect']
        else:
            cols = ['t', 'xi', 'gamma_re', 'gamma_im', 'arclength', 'residual']
        cols += list(self.extra_columns)
        for i in range(n_marks):
            cols += [f'mark{i}_re', f'mark{i}_im', f'mark{i}_exp']
        return cols + ['stop_reason']

    def _row(self, sample: TraceSample, n_marks: int, last: bool) -> List[str]:
        if self.kind == 'multi':
            values = [sample.t, *sample.xis, sample.residual]
        elif self.kind == 'radial':
            values = [sample.t, sample.xi, sample.tip.real, sample.tip.imag, *sample.extras[:2]]
        else:
            values = [sample.t, sample.xi, sample.tip.real, sample.tip.imag,
                      sample.arclength, sample.residual]
        if self.kind == 'radial':
            values += list(sample.extras[2:2 + len(self.extra_columns)])
        else:
            values += list(sample.extras[:len(self.extra_columns)])
        row = [repr(float(v)) for v in values]
        for i in range(n_marks):
            if i < len(sample.marks):
                pos, exp = sample.marks[i]
                row += [repr(float(pos.real)), repr(float(pos.imag)), str(exp)]
            else:
                row += ['', '', '']
        row.append(self.stop_reason if last else '')
        return row

    def to_csv(self, handle: Optional[io.TextIOBase] = None) -> str:
        """Header row plus one row per sample; floats as shortest round-trip repr"""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(self.header())
        n_marks = max((len(s.marks) for s in self.samples), default=0)
        for i, sample in enumerate(self.samples):
            writer.writerow(self._row(sample, n_marks, i == len(self.samples) - 1))
        text = buffer.getvalue()
        if handle is not None:
            handle.write(text)
        return text

