"""Exception types shared across the analysis modules."""


class AnalysisError(Exception):
    """Base class for every error raised by this package."""


class InputError(AnalysisError):
    """Malformed input: bad JSON document, schema violation, invalid value."""


class UnknownStateError(AnalysisError):
    """A state id was referenced that the relevant map or carrier lacks."""


class ContainerMismatchError(AnalysisError):
    """Two objects that must share a shape functor do not."""


class NameClashError(AnalysisError):
    """New state names collide with an existing carrier."""


class DanglingRefError(AnalysisError):
    """An extension structure references a state outside the old carrier."""


class NotWellFoundedError(AnalysisError):
    """An operation requiring a well-founded system was given one that is not."""


class CycleError(AnalysisError):
    """The recursion solver hit a state lying on a transition cycle.

    This does not prove the system has no recursion solution; it only means
    the structural solver cannot bottom out.  See the integer-ladder system
    in :mod:`coalg.wellfounded` for a system where every algebra still has
    a (constant) solution despite every state lying on an infinite path.
    """

    def __init__(self, state):
        super().__init__(f"state {state!r} lies on a transition cycle")
        self.state = state


class ZeroStateError(AnalysisError):
    """State 0 was queried on the integer-ladder system (0 is not a state)."""


class UnknownLabelError(AnalysisError):
    """A control label is not declared by the transition-system spec."""


class VerificationFailedError(AnalysisError):
    """An internal re-check of a computed result failed (indicates a bug)."""


class FoundInfinitePathEvidence(AnalysisError):
    """Closure extraction found proof that the input is not well-founded.

    The extracted finite restriction contains a reachable cycle, so the
    queried state has an infinite outgoing path.
    """

    def __init__(self, state, report):
        super().__init__(
            f"state {state!r} reaches a cycle inside its successor closure"
        )
        self.state = state
        self.report = report
