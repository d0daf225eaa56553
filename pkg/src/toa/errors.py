"""Exception types raised by the toa package."""

from __future__ import annotations


class ToaError(Exception):
    """Base class for all package errors."""


class NotNormalized(ToaError, ValueError):
    """A momentum-space state does not integrate to one on its grid."""


class GridTooNarrow(ToaError, ValueError):
    """The momentum grid does not cover enough of a packet's support."""


class WrongHalfLine(ToaError, ValueError):
    """A momentum lies on the wrong side of k = 0 for the requested branch."""


class CoincidentEigenvalues(ToaError, ValueError):
    """Two eigenvalues that must differ are equal."""


class PhaseUnderresolved(ToaError, ValueError):
    """The momentum grid is too coarse for the oscillating kernel."""


class NonpositiveMomentum(ToaError, ValueError):
    """A strictly positive momentum was required."""


class UnsupportedState(ToaError, ValueError):
    """The state is outside the domain where an identity holds."""


class SeriesDivergence(ToaError, ArithmeticError):
    """A series expansion did not reach its tolerance within the term budget."""


class NoConvergence(ToaError, ArithmeticError):
    """An iterative refinement failed to certify convergence."""
