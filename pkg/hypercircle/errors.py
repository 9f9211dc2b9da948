from typing import Any, Dict, Optional


class HypercircleError(Exception):
    """Base error; `details` carries the certificate or slack report."""

    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            'type': type(self).__name__,
            'message': str(self),
            'details': self.details,
        }


class InputError(HypercircleError):
    """Malformed input document or data outside the supported scope."""

    exit_code = 2


# --- cellcomplex ---

class ComplexError(InputError):
    pass


class BadCycle(ComplexError):
    pass


class NonManifoldEdge(ComplexError):
    pass


class StrongRegularityViolation(ComplexError):
    pass


class InconsistentOrientation(ComplexError):
    pass


# --- hypkernel ---

class KernelError(HypercircleError):
    pass


class DomainError(KernelError):
    pass


class NotInER(KernelError):
    pass


# --- delaunay ---

class DelaunayError(InputError):
    pass


class DegenerateInput(DelaunayError):
    pass


class DuplicatePoint(DelaunayError):
    pass


class Disjoint(DelaunayError):
    pass


class NonConvergence(HypercircleError):
    pass


# --- branchcover ---

class CoverError(InputError):
    pass


class DisconnectedCover(CoverError):
    pass


class MonodromyProductNotIdentity(CoverError):
    pass


class BranchPointNotVertex(CoverError):
    pass


class OddBranchCount(CoverError):
    pass


# --- energy ---

class EnergyError(HypercircleError):
    pass


class InvalidInput(EnergyError):
    exit_code = 2


# --- optimizer ---

class SolveError(HypercircleError):
    pass


class GenusTooLow(SolveError):
    pass


class MaxIterExceeded(SolveError):
    def __init__(self, message: str, result: Any = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        self.result = result


class LineSearchFailure(SolveError):
    def __init__(self, message: str, result: Any = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        self.result = result


class InitFailure(SolveError):
    pass


# --- layout ---

class LayoutError(HypercircleError):
    pass


class NumericalDrift(LayoutError):
    pass


class PairingMismatch(LayoutError):
    pass


class OrthocircleFailure(LayoutError):
    pass


# --- validator ---

class ValidatorError(HypercircleError):
    pass


class CapExceeded(ValidatorError):
    pass


# --- spherepipeline ---

class SphereError(HypercircleError):
    pass


class KInfNotV1(SphereError):
    exit_code = 2


class NotSphere(SphereError):
    exit_code = 2


class SymmetryResidualTooLarge(SphereError):
    pass
