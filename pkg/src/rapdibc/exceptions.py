"""Exception hierarchy for the RAP-DIBC solver."""


class RapError(Exception):
    """Base class for all errors raised by this package."""


class InstanceError(RapError, ValueError):
    """Problem data is inconsistent or unusable."""


class LengthMismatchError(InstanceError):
    pass


class MalformedIntervalError(InstanceError):
    pass


class NotCanonicalError(InstanceError):
    """The shift vector is not sorted non-increasingly."""


class NotAdmissibleError(InstanceError):
    """Neither first-interval case or neither last-interval case holds."""

    def __init__(self, flags):
        self.flags = flags
        super().__init__(f"instance is not admissible: {flags}")


class NonIntegralDataError(InstanceError):
    pass


class GapError(RapError, ValueError):
    """A value lies outside every interval of a variable."""


class CapExceededError(RapError):
    """An exhaustive oracle would exceed its enumeration cap."""


class NotCoveredError(RapError):
    """The greedy feasibility construction does not apply to this instance.

    This is not a proof of infeasibility; the full solver may still find a point.
    """


class GenerationFailedError(RapError):
    pass


class InfeasibleDemandError(RapError, ValueError):
    pass
