"""
Run Configuration
Numerical knobs of one run, seeded from qd_config and overridable per job.
"""

import math
from dataclasses import dataclass, field, fields
from typing import Any, Dict, Optional

import qd_config as config
from src.errors import DomainError


@dataclass
class RunConfig:
    """Step, order, startup and tolerance settings for a trace"""

    h: float = config.STEPPER['h']
    order: int = config.STEPPER['order']
    s: float = config.STEPPER['startup_s']
    grading: float = config.STEPPER['grading']
    grading_window: float = config.STEPPER['grading_window']
    startup_rows: int = config.STEPPER['startup_rows']
    max_steps: int = config.STEPPER['max_steps']
    tol_constraint: float = config.TOLERANCES['constraint']
    tol_newton: float = config.TOLERANCES['newton']
    tol_collision: float = config.TOLERANCES['collision']
    tol_startup: float = config.TOLERANCES['startup']
    startup_floor: float = config.TOLERANCES['startup_floor']
    tol_imag: float = config.TOLERANCES['imaginary_drift']
    loop_threshold: float = config.TOLERANCES['loop_threshold']
    loop_ratio: float = config.TOLERANCES['loop_ratio']
    multi_mode: str = config.MULTI['mode']
    radial_mode: str = config.RADIAL['mode']
    n_subdiv: int = config.ORACLE['n_subdiv']
    oracle_refine: int = config.ORACLE['refine']
    csv_path: Optional[str] = None
    svg_path: Optional[str] = None
    png_path: Optional[str] = None
    plot: bool = False
    extra: Dict[str, Any] = field(default_factory=dict)

    def validate(self) -> 'RunConfig':
        for name in ('h', 's', 'grading', 'grading_window', 'tol_constraint', 'tol_newton',
                     'tol_collision', 'tol_startup', 'startup_floor', 'tol_imag',
                     'loop_threshold', 'loop_ratio'):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)}")
        if not 1 <= self.order <= config.STEPPER['max_order']:
            raise DomainError(f"order must be in 1..{config.STEPPER['max_order']}, got {self.order}")
        for name in ('n_subdiv', 'oracle_refine', 'startup_rows', 'max_steps'):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be at least 1, got {getattr(self, name)}")
        if self.multi_mode not in ('derived', 'printed'):
            raise DomainError(f"unknown multi mode {self.multi_mode!r}")
        if self.radial_mode not in ('residue', 'origin', 'printed'):
            raise DomainError(f"unknown radial mode {self.radial_mode!r}")
        return self

    @property
    def graded_ratio(self) -> float:
        """Step-to-elapsed-time ratio after a launch; proportional to h"""
        return min(self.grading, self.h / self.grading_window, 0.0999)

    def step_size(self, elapsed: float, gap: float, rate: float,
                  remaining: float = float('inf')) -> float:
        """h, shrunk near a launch and near collisions, never past remaining"""
        ratio = self.graded_ratio
        h = min(self.h, ratio * elapsed, remaining)
        if rate > 0:
            h = min(h, ratio * gap / rate)
        return h

    def rate_limit(self, reference: float, elapsed: float) -> float:
        """Largest |xi'| accepted elapsed time after a launch, given the rate halfway there"""
        if elapsed <= 0:
            return self.loop_threshold
        return min(self.loop_threshold, self.loop_ratio * max(reference, 1.0 / math.sqrt(elapsed)))

    def updated(self, overrides: Optional[Dict[str, Any]]) -> 'RunConfig':
        """Copy with the known keys of overrides applied"""
        known = {f.name for f in fields(self)}
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        for key, value in (overrides or {}).items():
            if value is None:
                continue
            if key in known:
                values[key] = value
            else:
                values['extra'] = {**values['extra'], key: value}
        return RunConfig(**values).validate()
