"""Shared exception types. The CLI maps these onto process exit codes:
precondition/plan/missing-data problems exit 2, budget overruns exit 3,
malformed files exit 4.
"""


class LxrayError(Exception):
    """Base class for all library errors."""


class PreconditionError(LxrayError):
    """An operation was invoked outside its stated domain."""


class PlanError(LxrayError):
    """A reconstruction plan is internally inconsistent."""


class MissingDataError(LxrayError):
    """A required sinogram entry is absent (never imputed as zero)."""


class ZeroWeightError(PreconditionError):
    """A weight evaluated to zero at a queried point."""


class BudgetError(LxrayError):
    """A counting or enumeration job exceeds the configured budget."""


class FileFormatError(LxrayError):
    """A JSON input file does not match the documented schema."""
