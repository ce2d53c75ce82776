"""Exception hierarchy.

Two families matter to callers: bad input (:class:`ConfigError`) and
parameters that leave the Cantor-circle regime or otherwise break the
numerics (:class:`RegimeError`).  The CLI maps them to distinct exit codes.
"""

from __future__ import annotations


class McDimError(Exception):
    """Base class for all package errors."""


class ConfigError(McDimError, ValueError):
    """Invalid arguments or configuration."""


class RegimeError(McDimError, ArithmeticError):
    """A numeric routine left its supported regime."""


class PoleError(RegimeError):
    """Evaluation at the pole z = 0 of a map with p != 0."""


class BranchPointError(RegimeError):
    """Inverse branch requested at a critical value (w**2 == 4p)."""


class AmbiguousRootError(RegimeError):
    """Two Q-th roots are equally close to the branch hint."""


class ConvergenceError(RegimeError):
    """An iteration hit its cap without meeting the tolerance."""


class BracketError(RegimeError):
    """The root of a monotone equation is not inside the search bracket."""


class DuplicatePointError(RegimeError):
    """Two located periodic points collapsed onto each other."""


class DegenerateFitError(RegimeError):
    """A least-squares fit has no usable signal."""
