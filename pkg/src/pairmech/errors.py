"""Exception hierarchy shared across the package."""


class PairmechError(Exception):
    """Base class for all package errors."""


class InputError(PairmechError):
    """Rejected input: unknown name, bad dimensions, malformed file."""


class DomainError(PairmechError):
    """A value lies outside the domain where an operation is defined."""


class AbsoluteContinuityError(DomainError):
    """Divergence requested between measures violating P << Q."""


class UnsupportedError(PairmechError):
    """A valid but unsupported combination of inputs (e.g. generator/prior pair)."""


class DegenerateInputError(PairmechError):
    """An input is structurally degenerate (zero marginal, empty sample)."""


class SolverError(PairmechError):
    """Optimization failed (non-finite objective, divergence)."""
