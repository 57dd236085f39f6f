"""Exception types shared across the package.

Everything derives from DecostyleError so callers can catch the whole
family at a pipeline or service boundary.
"""


class DecostyleError(Exception):
    """Base class for all errors raised by this package."""


# --- sample statistics / moment transfer ---

class DegenerateSample(DecostyleError):
    """Sample variance is (numerically) zero; standardization impossible."""


class TargetUnreachable(DecostyleError):
    """A requested feature value lies outside the achievable range."""


class PoleCollision(DecostyleError):
    """A rational point-wise map would cross a denominator zero."""


class RankDeficient(DecostyleError):
    """The constraint directions are numerically dependent."""


class StepFailure(DecostyleError):
    """Adaptive ODE stepping underflowed without reaching the target."""


class OrderGap(DecostyleError):
    """Requested moment orders are not a prefix {1..k}."""


# --- spectral matching ---

class FitDivergence(DecostyleError):
    """The band-energy fit stalled above tolerance."""


class DimensionMismatch(DecostyleError):
    """Image dimensions do not match the filter bank / kernel grid."""


# --- color pipeline ---

class BlackImage(DecostyleError):
    """A channel mean is too close to zero to estimate an illuminant."""


class NegativeInput(DecostyleError):
    """Negative values fed to a stage that forbids them."""


# --- LUT / recipes ---

class RecipeIncomplete(DecostyleError):
    """A transfer recipe is missing frozen scalars needed for replay."""


class CubeParseError(DecostyleError):
    """Malformed .cube text; carries the offending line number."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SizeMismatch(DecostyleError):
    """Declared LUT size disagrees with the number of data rows."""


# --- image I/O ---

class UnsupportedFormat(DecostyleError):
    """Unknown or unhandled raster file format."""


class CorruptFile(DecostyleError):
    """File is truncated or violates its format."""


class OutOfBounds(DecostyleError):
    """A crop rectangle leaves the image bounds or is too small."""
