class QLinkError(Exception):
    """Base class for simulator errors."""


class BudgetExceeded(QLinkError):
    """A dense or sparse dimension budget would be exceeded."""


class BasisMismatch(QLinkError, ValueError):
    """Operands live on different bases."""


class GaugeCheckError(QLinkError):
    """An operator that was required to be gauge invariant is not."""


class AmbiguousKernel(QLinkError):
    """Eigenvalues sit too close to the kernel threshold to decide the kernel."""


class ErrorAbsorbed(QLinkError):
    """An error operator annihilated the state (truncation edge)."""


class StateError(QLinkError, ValueError):
    """Invalid state preparation request."""
