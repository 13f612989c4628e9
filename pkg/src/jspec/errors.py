"""Exception hierarchy for jspec.

Every error raised deliberately by the library derives from JspecError, so
callers (and the CLI) can distinguish mathematical failure modes from plain
bugs.  Each class carries a short machine-readable ``kind`` used in reports.
"""


class JspecError(Exception):
    """Base class for all jspec errors."""

    kind = "error"

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context


class ConfigError(JspecError):
    """Invalid operator description, parameters, or file input."""

    kind = "config"


class PoleHit(JspecError):
    """Evaluation requested exactly at a pole of the plain characteristic function."""

    kind = "pole_hit"


class NearSpectrum(JspecError):
    """Resolvent requested at a point indistinguishable from the spectrum."""

    kind = "near_spectrum"


class ZeroArgument(JspecError):
    """z = 0 where the regularized function is undefined."""

    kind = "zero_argument"


class NoTailBound(JspecError):
    """Operation needs a certified tail bound the operator cannot provide."""

    kind = "no_tail_bound"


class Budget(JspecError):
    """Window or node budget exhausted before reaching the tolerance."""

    kind = "budget"


class TooLong(JspecError):
    """Brute-force evaluator asked for a sequence beyond its hard cap."""

    kind = "too_long"


class NegativeInput(JspecError):
    """Tail-bound helper fed a negative or non-finite partial sum."""

    kind = "negative_input"


class PoleAtBase(JspecError):
    """Jet expansion requested at a base point sitting on a pole."""

    kind = "pole_at_base"


class AmbiguousMatch(JspecError):
    """Two unequal diagonal values both match z within the pole tolerance."""

    kind = "ambiguous_match"


class OnContourZero(JspecError):
    """A contour node landed on (numerically) a zero of the function."""

    kind = "on_contour_zero"


class ContourDeadlock(JspecError):
    """Contour jittering failed repeatedly; zero search cannot proceed."""

    kind = "contour_deadlock"


class NonConvergent(JspecError):
    """Winding number failed to stabilize to an integer."""

    kind = "non_convergent"


class DepthExceeded(JspecError):
    """Subdivision recursion exceeded the maximum depth."""

    kind = "depth_exceeded"


class Inconsistent(JspecError):
    """Two independent computations of the same quantity disagree."""

    kind = "inconsistent"


class WindowTooSmall(JspecError):
    """A slice or window is too short for the requested diagnostic."""

    kind = "window_too_small"


class ZeroVector(JspecError):
    """A vector that must be nonzero is numerically zero."""

    kind = "zero_vector"


class PoleArgument(JspecError):
    """Special function evaluated at one of its poles."""

    kind = "pole_argument"
