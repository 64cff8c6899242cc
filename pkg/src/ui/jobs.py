"""
Job Files
JSON job descriptions for every command: the differential, the launch data,
segments or paths, multi-slit and radial blocks, and configuration overrides.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.differentials.qdiff import FactorizedQD, as_fraction
from src.errors import JobError, LoewnerQDError
from src.evolution.chordal import Segment, Start, parse_segments
from src.evolution.multislit import SlitStart
from src.evolution.radial import RadialStart
from src.lattice.paths import LatticePathSpec, build_path, to_headed_segments
from src.oracle.zipper import HALF_PLANE, Polyline


@dataclass
class Job:
    """One parsed job file"""

    raw: Dict[str, Any]
    source: str = '<memory>'
    overrides: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: Dict[str, Any], source: str = '<memory>') -> 'Job':
        if not isinstance(raw, dict):
            raise JobError(f"{source}: a job must be a JSON object")
        overrides = raw.get('config') or {}
        if not isinstance(overrides, dict):
            raise JobError(f"{source}: 'config' must be an object")
        return cls(raw, source, dict(overrides))

    @classmethod
    def load(cls, filename: str) -> 'Job':
        try:
            with open(filename, 'r', encoding='utf-8') as handle:
                raw = json.load(handle)
        except OSError as exc:
            raise JobError(f"cannot read {filename}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise JobError(f"{filename}: invalid JSON ({exc})") from exc
        return cls.from_dict(raw, filename)

    def _fail(self, what: str, exc: Exception) -> JobError:
        return JobError(f"{self.source}: bad {what}: {exc}")

    # Shared pieces

    @property
    def qd(self) -> FactorizedQD:
        try:
            return FactorizedQD.from_dict(self.raw.get('qd'))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise self._fail('qd', exc) from exc

    @property
    def tolerance(self) -> float:
        return float(self.raw.get('tolerance', 1e-3))

    def polyline(self) -> Optional[Polyline]:
        """The job's path, from a lattice spec or explicit vertices"""
        try:
            if 'lattice' in self.raw:
                return build_path(LatticePathSpec.from_dict(self.raw['lattice']))
            if 'path' in self.raw:
                vertices = tuple(complex(re, im) for re, im in self.raw['path'])
                return Polyline(vertices, self.raw.get('domain', HALF_PLANE))
        except LoewnerQDError as exc:
            raise JobError(f"{self.source}: {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise self._fail('path', exc) from exc
        return None

    # Per-command inputs

    def chordal_inputs(self) -> Tuple[FactorizedQD, Start, List[Segment], Optional[Polyline]]:
        path = self.polyline()
        start_raw = self.raw.get('start') or {}
        try:
            if 'segments' in self.raw:
                segments = parse_segments(self.raw['segments'])
            elif path is not None and path.domain == HALF_PLANE:
                segments = [Segment(phi, 'arclength', length, heading)
                            for phi, length, heading in to_headed_segments(path)]
            else:
                raise JobError(f"{self.source}: needs 'segments', 'lattice' or 'path'")
            xi0 = float(start_raw.get('xi0', path.vertices[0].real if path else 0.0))
            start = Start(xi0, as_fraction(start_raw.get('N', 0)),
                          int(start_raw.get('direction_index', 0)))
        except JobError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise self._fail('segments or start', exc) from exc
        return self.qd, start, segments, path

    def multi_inputs(self) -> Tuple[FactorizedQD, List[SlitStart], Sequence[float], float]:
        block = self.raw.get('multi')
        if not isinstance(block, dict):
            raise JobError(f"{self.source}: needs a 'multi' object")
        try:
            starts = [SlitStart(float(st['xi0']), float(st.get('phi', math.pi / 2)),
                                as_fraction(st.get('N', 0)), int(st.get('direction_index', 0)))
                      for st in block['starts']]
            weights = [float(b) for b in block.get('weights', [1.0 / len(starts)] * len(starts))]
            capacity = float(block['capacity'])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise self._fail('multi block', exc) from exc
        return self.qd, starts, weights, capacity

    def radial_inputs(self) -> Tuple[FactorizedQD, RadialStart, float]:
        block = self.raw.get('radial')
        if not isinstance(block, dict):
            raise JobError(f"{self.source}: needs a 'radial' object")
        try:
            start = RadialStart(float(block.get('xi0', 0.0)), float(block.get('phi', math.pi / 2)),
                                as_fraction(block.get('N', 0)),
                                int(block.get('direction_index', 0)))
            capacity = float(block['capacity'])
            K = int(block.get('K', -2))
        except (KeyError, TypeError, ValueError) as exc:
            raise self._fail('radial block', exc) from exc
        if 'qd' in self.raw:
            qd = self.qd
        else:
            # -w^-2 has the radii as trajectories
            qd = FactorizedQD.build(-1.0, [(0j, K)])
        return qd, start, capacity


def polyline_for_oracle(job: Job) -> Polyline:
    path = job.polyline()
    if path is None:
        raise JobError(f"{job.source}: the oracle needs a 'lattice' or 'path'")
    return path
