"""Exception hierarchy shared by every module in the package."""


class TdlcError(Exception):
    """Base class for all errors raised by tdlc."""


class ModelMismatch(TdlcError):
    pass


class PrecisionExhausted(TdlcError):
    pass


class NoStabilization(TdlcError):
    def __init__(self, max_depth, what="intersections"):
        super().__init__(f"{what} did not stabilize within max_depth={max_depth}")
        self.max_depth = max_depth


class KComputationFailed(TdlcError):
    pass


class OracleDisagreement(TdlcError):
    """Correctness tripwire: two independent routes to the same value differ."""


class NotFlat(TdlcError):
    def __init__(self, witness, message=""):
        super().__init__(message or f"not flat, witness word {witness!r}")
        self.witness = witness


class RefinementBudgetExceeded(TdlcError):
    pass


class KNotStable(TdlcError):
    pass


class DivisionByZero(TdlcError, ZeroDivisionError):
    pass


class NonIntegralExponent(TdlcError):
    pass


class SupportOverflow(TdlcError):
    pass


class WindowTooSmall(TdlcError):
    pass


class OrbitNotSaturated(TdlcError):
    def __init__(self, radius):
        super().__init__(f"orbit not saturated at radius {radius}; increase the radius")
        self.radius = radius


class NormalFormFailure(TdlcError):
    pass


class NotTransversal(TdlcError):
    pass


class NotHomomorphism(TdlcError):
    pass


class ConfigInvalid(TdlcError):
    pass
