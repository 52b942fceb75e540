"""Exception types shared across the package.

Every error raised on bad input derives from :class:`InputError`; the CLI maps
those to exit status 2.
"""

from __future__ import annotations


class HKFlopError(Exception):
    """Base class for all package errors."""


class InputError(HKFlopError, ValueError):
    """Malformed or out-of-contract input."""


# exactpoly
class PolySyntaxError(InputError):
    pass


class NotHomogeneous(InputError):
    pass


class ZeroPolynomial(InputError):
    pass


class DimensionMismatch(InputError):
    pass


# symplin
class DependentVectors(InputError):
    pass


class DependentHyperplanes(InputError):
    pass


class BadExponent(InputError):
    pass


class NotCoisotropic(InputError):
    pass


class NotLagrangian(InputError):
    pass


# legendre
class DegreeOne(InputError):
    pass


class NoConvergence(HKFlopError):
    """Newton inversion exhausted every restart without meeting tolerance."""

    def __init__(self, message: str, best_residual: float = float("inf")):
        super().__init__(message)
        self.best_residual = best_residual


# dualcurve
class NonReduced(InputError):
    pass


class DegreeTooLarge(InputError):
    pass


class DegreeTooSmall(InputError):
    pass


class EliminationCollapse(HKFlopError):
    pass


class InconsistentDualDegree(InputError):
    pass


# hkquotient
class ComplexMomentNonzero(InputError):
    pass


class Unnormalizable(InputError):
    pass


class ZeroSection(InputError):
    pass


class NumericBreakdown(HKFlopError):
    pass


class SingularSample(HKFlopError):
    pass


# lagclass
class InconsistentTable(InputError):
    pass


class MissingClass(InputError):
    pass


class NotMinusTwo(InputError):
    pass


class DegenerateProjection(InputError):
    pass


class AllNull(InputError):
    pass


# charclass
class TruncationTooLarge(InputError):
    pass


class BadConstantTerm(InputError):
    pass
