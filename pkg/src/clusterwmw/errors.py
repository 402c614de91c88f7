"""Exception hierarchy shared by all modules."""


class ClusterWMWError(Exception):
    """Base class for every error raised by the package."""


class DataError(ClusterWMWError, ValueError):
    """Malformed or unusable input data."""


class NoComparisonsError(ClusterWMWError):
    """No between-group comparison is possible (zero expected pair count)."""


class DegenerateResampleError(ClusterWMWError):
    """A within-cluster resample lacks enough members of one group."""


class InsufficientDrawsError(DegenerateResampleError):
    """Too few usable resamples in a Monte Carlo loop."""


class DegenerateVarianceError(ClusterWMWError):
    """A variance estimate is exactly zero, so no statistic can be formed."""


class NegativeVarianceError(ClusterWMWError):
    """A Monte Carlo variance estimate came out nonpositive.

    The difference-of-pieces estimators can go negative on some datasets;
    the test result is then unavailable.
    """

    def __init__(self, message, value=None, components=None):
        super().__init__(message)
        self.value = value
        self.components = components


class EnumerationCapError(ClusterWMWError):
    """The exact resample enumeration would exceed the configured cap."""


class NotPositiveDefiniteError(ClusterWMWError, ValueError):
    """An assembled covariance/scale matrix is not positive definite."""
