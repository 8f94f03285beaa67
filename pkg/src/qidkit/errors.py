"""Exception types shared across the toolkit."""


class QidkitError(Exception):
    """Base class for all toolkit errors."""


class SpecError(QidkitError):
    """Raised when a distribution spec fails validation."""


class GridError(QidkitError):
    """Raised when a grid is malformed or does not cover what it must."""


class ScanError(QidkitError):
    """Raised when a zero scan cannot produce a trustworthy verdict."""


class IndeterminateZeroError(ScanError):
    """A refined modulus landed inside the indeterminate band.

    The scan found a dip that is too deep to certify as nonvanishing and
    too shallow to certify as a zero at the configured thresholds.
    """

    def __init__(self, location: float, modulus: float):
        self.location = float(location)
        self.modulus = float(modulus)
        super().__init__(
            f"indeterminate: |charfn| = {modulus:.3e} at z = {location:.12g} "
            f"falls inside the indeterminate band; refine thresholds or grids"
        )


class UnwrapError(QidkitError):
    """Raised when the continuous logarithm cannot be tracked safely."""


class ExtractionError(QidkitError):
    """Raised when triplet extraction fails one of its hard checks."""


class UnsupportedFormError(QidkitError):
    """Raised when a distribution's structure is outside the supported forms."""
