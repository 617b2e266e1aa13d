"""Exception hierarchy shared by every stage of the pipeline."""


class YieldSurvError(Exception):
    """Base class for all errors raised by yieldsurv."""


# --- ingest -----------------------------------------------------------------

class ParseError(YieldSurvError, ValueError):
    """Malformed trajectory or geometry input."""


class MissingColumnError(ParseError):
    def __init__(self, name, path=None):
        self.name = name
        self.path = path
        where = f" in {path}" if path else ""
        super().__init__(f"missing required column {name!r}{where}")


class FrameGapError(ParseError):
    def __init__(self, track_id, frame):
        self.track_id = track_id
        self.frame = frame
        super().__init__(f"track {track_id}: non-consecutive frame {frame}")


class ClassUnknownError(ParseError):
    def __init__(self, value, track_id=None):
        self.value = value
        self.track_id = track_id
        super().__init__(f"track {track_id}: unknown road user class {value!r}")


class GeometryError(ParseError):
    """Invalid site geometry (non-simple polygon, bad heading interval)."""


# --- scenario extraction ----------------------------------------------------

class ExclusionError(YieldSurvError):
    """A track cannot yield a scenario record; it is excluded, not fatal."""

    reason = "excluded"


class NoCrossingReachedError(ExclusionError):
    reason = "no_crossing_reached"

    def __init__(self, track_id):
        self.track_id = track_id
        super().__init__(f"track {track_id} never reaches the crossing entry line")


class EmptyWindowError(ExclusionError):
    reason = "empty_window"


class NoDecelerationError(ExclusionError):
    reason = "no_deceleration"


class DegenerateDistanceError(ExclusionError, ValueError):
    reason = "degenerate_distance"


class NoConflictZoneTransitError(ExclusionError):
    reason = "no_conflict_zone_transit"


class NoArmMatchError(ExclusionError):
    reason = "no_arm_match"


# --- statistics -------------------------------------------------------------

class InsufficientDataError(YieldSurvError, ValueError):
    pass


class NonConvergenceError(YieldSurvError, RuntimeError):
    def __init__(self, iterations, gradient_norm, trace=None):
        self.iterations = iterations
        self.gradient_norm = gradient_norm
        self.trace = trace if trace is not None else []
        super().__init__(
            f"no convergence after {iterations} iterations "
            f"(gradient max-norm {gradient_norm:.3g})"
        )


class SingularHessianError(YieldSurvError, RuntimeError):
    pass


class NonFiniteError(YieldSurvError, FloatingPointError):
    pass


class UnknownLevelError(YieldSurvError, ValueError):
    pass


class RankDeficientError(YieldSurvError, ValueError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"design matrix is rank deficient at column {column!r}")


class NotNestedError(YieldSurvError, ValueError):
    pass


class ZeroVarianceError(YieldSurvError, ValueError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"column {column!r} has zero variance")


class UnknownCoefficientError(YieldSurvError, KeyError):
    pass


class TooFewPointsError(YieldSurvError, ValueError):
    pass
