#!/usr/bin/env python3
"""
Error types for the discretization toolkit.

Precondition and domain failures derive from ValueError so plain
``except ValueError`` callers keep working. A failed inequality check is an
InequalityViolation, which the CLI maps to exit code 1.
"""

from typing import Dict, List, Optional


class MZError(ValueError):
    """Base class for precondition and domain failures"""


class InsufficientPointsError(MZError):
    """Operation needs more points than the set holds"""


class HypothesisViolatedError(MZError):
    """A parameter hypothesis of a bound or inequality does not hold"""


class MultiplicityExceededError(MZError):
    """No bin of disjoint cubes can accept the cube at ``index``"""

    def __init__(self, index: int, n_bound: int):
        self.index = index
        self.n_bound = n_bound
        super().__init__(
            f"multiplicity exceeded: cube {index} meets a cube in every one of the {n_bound + 1} bins"
        )


class PointBudgetExceededError(MZError):
    """Lattice generation would exceed the configured point budget"""


class DomainError(MZError):
    """Argument outside the domain of the operation"""


class UnderResolvedQuadratureError(MZError):
    """Too few quadrature nodes for the requested degree"""


class RateNotNegativeError(MZError):
    """Oversampling ratio at or below gamma0, so the error rate does not decay"""


class NormDivergesError(MZError):
    """The model is not in L_q for the requested q"""


class DeltaSigmaTooLargeError(MZError):
    """delta*sigma is too large for the lower constant to be positive"""


class NotCoveringError(MZError):
    """The net could not be certified as a delta-covering of the window"""


class NotDisjointError(MZError):
    """Cubes expected to have disjoint interiors overlap"""


class InequalityViolation(AssertionError):
    """A measured quantity broke the inequality it was checked against"""

    def __init__(self, message: str, details: Optional[Dict] = None):
        self.details = details or {}
        super().__init__(message)


class TrialFailedError(RuntimeError):
    """One or more orchestrated trials failed"""

    def __init__(self, experiment: str, failures: List[Dict]):
        self.experiment = experiment
        self.failures = failures
        indices = ", ".join(str(f['trial_index']) for f in failures)
        super().__init__(f"{len(failures)} trial(s) of '{experiment}' failed: {indices}")
