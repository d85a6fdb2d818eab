"""Exception hierarchy shared across the package."""

from __future__ import annotations

import enum


class RecoveryError(Exception):
    """Base class for every error raised by this package."""


class SpectrumError(RecoveryError, ValueError):
    """Raised when raw input cannot be turned into a Schmidt spectrum."""


class EmptySpectrum(SpectrumError):
    pass


class NotNormalized(SpectrumError):
    pass


class NegativeEntry(SpectrumError):
    pass


class DimensionMismatch(RecoveryError, ValueError):
    pass


class NotConvertibleError(RecoveryError):
    """The source spectrum is not majorized by the target spectrum."""


class NotARecoveryReason(str, enum.Enum):
    MAJORIZATION_FAILED = "MajorizationFailed"
    NO_ENTROPY_GAIN = "NoEntropyGain"


class NotARecovery(RecoveryError):
    """A candidate auxiliary pair fails to witness a recovery."""

    def __init__(self, which: NotARecoveryReason, detail: str = ""):
        self.which = which
        msg = which.value if not detail else f"{which.value}: {detail}"
        super().__init__(msg)


class NotApplicable(RecoveryError):
    """A construction was invoked on a pair outside its hypotheses."""


class NotFeasibleAtZero(RecoveryError):
    """Tensor majorization already fails before any transfer is made."""


class SearchExhausted(RecoveryError):
    """A guaranteed construction found no witness; indicates a tolerance or code issue."""


class EmptyRegion(RecoveryError):
    pass


class BudgetExceeded(RecoveryError):
    pass


class InvalidTransfer(RecoveryError, ValueError):
    pass


class UniformInput(RecoveryError, ValueError):
    pass


class PatternInfeasible(RecoveryError):
    pass
