"""Errors raised by the engine. All of them are ``ValueError`` so callers can catch one type."""


class EngineError(ValueError):
    message = "engine error"

    def __init__(self, detail: str | None = None) -> None:
        super().__init__(f"{self.message}: {detail}" if detail else self.message)


class NotLaurentError(EngineError):
    message = "not a Laurent polynomial"


class UnderConvergedError(NotLaurentError):
    message = "under-converged diagram"


class NotStabilizedError(EngineError):
    message = "not stabilized"


class EmptyRayLocusError(EngineError):
    message = "empty ray locus"


class NoStableObjectsError(EngineError):
    message = "no stable objects"


class HypothesisError(EngineError):
    message = "order hypothesis violated"


class SingularProbeError(EngineError):
    message = "probe on singular point"


class NoWallError(EngineError):
    message = "no wall"


class NonNilpotentError(EngineError):
    message = "non-nilpotent argument"


class NotUnipotentError(EngineError):
    message = "constant term is not 1"


class ConsistencyError(EngineError):
    message = "internal consistency failure"
