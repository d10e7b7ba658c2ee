"""Exception hierarchy shared across the package."""


class PhyswmError(Exception):
    """Base class for all package-specific errors."""


class InvalidStateError(PhyswmError):
    """A physical state vector is malformed (wrong length, non-finite, out of domain)."""


class InvalidActionError(PhyswmError):
    """An action is outside the environment's admissible set."""


class TransformOutOfBoundsError(PhyswmError):
    """A state transform would leave the valid state box.

    Carries ``feasible_range``, the (lo, hi) interval of magnitudes that
    would have kept the transformed state inside the box, so callers can
    resample instead of guessing.
    """

    def __init__(self, message, feasible_range):
        super().__init__(message)
        self.feasible_range = feasible_range


class ShapeError(PhyswmError):
    """Array arguments have incompatible shapes."""


class ConfigError(PhyswmError):
    """An experiment or supervision configuration is invalid."""


class DatasetError(PhyswmError):
    """Base class for dataset storage problems."""


class DatasetCorruptError(DatasetError):
    """A dataset directory is unreadable or internally inconsistent."""


class DatasetVersionError(DatasetError):
    """On-disk format version differs from the supported one.

    Names both versions so the message is actionable.
    """

    def __init__(self, found, supported):
        super().__init__(
            f"dataset format version {found!r} is not supported "
            f"(this build reads version {supported!r})"
        )
        self.found = found
        self.supported = supported


class TrainingDivergedError(PhyswmError):
    """Training hit a non-finite loss; carries the last finite record."""

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


class UnsupportedStageError(PhyswmError):
    """Interval bound propagation reached a layer type it cannot bound."""


class MissingRunsError(PhyswmError):
    """A report was requested over run directories that do not exist."""

    def __init__(self, missing):
        super().__init__("missing runs: " + ", ".join(sorted(missing)))
        self.missing = tuple(missing)
