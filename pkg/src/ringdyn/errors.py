"""Exception hierarchy shared by all ringdyn modules."""
from __future__ import annotations


class RingDynError(Exception):
    """Base class for every error raised by this package."""


# ring
class NotMonic(RingDynError):
    pass


class NotIrreducible(RingDynError):
    pass


class FieldMismatch(RingDynError):
    pass


class ZeroInput(RingDynError):
    pass


class ZeroDivisor(RingDynError):
    pass


# intpoly
class DegreeLimit(RingDynError):
    pass


class TooManyPolynomials(RingDynError):
    pass


class ZeroModulus(RingDynError):
    pass


class PreconditionFailed(RingDynError):
    pass


# torus
class NonCommuting(RingDynError):
    pass


NotCommuting = NonCommuting


class NotUnipotent(RingDynError):
    pass


class EmptyBox(RingDynError):
    pass


# dynsim / popdiff
class EmptyRange(RingDynError):
    pass


class DegenerateShifts(RingDynError):
    pass


class FamilyRefused(RingDynError):
    """A family failed joint intersectivity at a requested modulus."""


# cli
class ScenarioError(RingDynError):
    pass


class ParseError(ScenarioError):
    pass


class ValidationError(ScenarioError):
    pass


class TaskError(ScenarioError):
    pass
