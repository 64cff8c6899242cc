"""
Error Types
Exception hierarchy shared by every part of the Loewner driving-function toolkit.
"""


class LoewnerQDError(Exception):
    """Base class for all library errors"""


class PoleHitError(LoewnerQDError, ZeroDivisionError):
    """Evaluation landed exactly on a pole of a quadratic differential"""


class DegeneratePointError(LoewnerQDError):
    """A zero or pole was given where an ordinary point is required"""


class DomainError(LoewnerQDError, ValueError):
    """A parameter is outside its admissible range"""


class NoConvergenceError(LoewnerQDError):
    """Newton inversion did not converge"""


class BranchError(LoewnerQDError):
    """An inverse image landed outside the closed upper half-plane"""


class SingularStateError(LoewnerQDError):
    """A marked point collided with the driving value"""


class StepTooLargeError(LoewnerQDError):
    """A Taylor step would cross the collision horizon"""


class StartupTooCoarseError(LoewnerQDError):
    """The straight-slit startup did not reproduce the constraint"""


class InvalidDirectionError(LoewnerQDError, IndexError):
    """No admissible departure direction with the requested index"""


class CornerAtSingularityError(LoewnerQDError):
    """A corner was requested at a zero or pole of the differential"""


class NonRealDriftError(LoewnerQDError):
    """The driving velocity acquired a non-negligible imaginary part"""


class PathError(LoewnerQDError, ValueError):
    """A polyline is degenerate, leaves the half-plane or self-intersects"""


class EmptyOverlapError(LoewnerQDError, ValueError):
    """Two traces share no common time range"""


class JobError(LoewnerQDError, ValueError):
    """A job file could not be parsed"""
