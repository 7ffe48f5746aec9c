"""Exception types shared across the library."""


class KerndepError(Exception):
    """Base class for every library-specific failure."""


class InvalidSampleMatrix(KerndepError):
    """Sample data is not a finite n x d matrix with n >= 2."""


class AllPointsIdentical(KerndepError):
    """Median pairwise distance is zero, so no RBF bandwidth exists."""


class DimensionMismatch(KerndepError):
    """Paired inputs disagree on sample count or feature width."""


class DegenerateInput(KerndepError):
    """A centered Gram matrix is numerically zero (constant variable)."""


class EstimateOutOfRange(KerndepError):
    """A normalized statistic left [0, 1] by more than float tolerance."""


class InstanceTooLarge(KerndepError):
    """Input exceeds the size cap of a deliberately slow reference path."""


class SingularSystem(KerndepError):
    """A regularized linear system is too ill-conditioned to solve."""


class HorizonOutOfRange(KerndepError):
    """A prediction horizon leaves some split with no (input, target) pair."""


class DegenerateLabels(KerndepError):
    """Probe labels cannot support a stratified train/test split."""


class NonMonotonicEpoch(KerndepError):
    """Trace records must arrive with consecutive epoch numbers."""


class SchemaMismatch(KerndepError):
    """A serialized file does not match the schema this version writes."""


class ConfigError(KerndepError):
    """A configuration mapping has unknown, missing, or invalid entries."""


class EmptyTrace(KerndepError):
    """A plot was requested for a trace with no records."""


class MissingSeries(KerndepError):
    """A plot was requested for a series with no numeric values."""


class OutputExists(KerndepError):
    """An output directory already exists and --force was not given."""
