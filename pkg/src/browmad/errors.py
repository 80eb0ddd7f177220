"""Exception types raised across the toolkit."""


class BrowmadError(Exception):
    """Base class for all toolkit errors."""


class MalformedFile(BrowmadError):
    """A landmark file does not follow its declared format."""


class WrongPointCount(BrowmadError):
    """A landmark file does not carry exactly 68 points."""


class DegenerateRegion(BrowmadError):
    """The clamped eyebrow rectangle is below the minimum analyzable size."""


class OutOfBounds(BrowmadError):
    """A crop rectangle extends outside its source image."""


class EmptyInput(BrowmadError):
    """An operation that needs at least one image received none."""


class EmptyScores(BrowmadError):
    """A rate or threshold computation received an empty score list."""


class DimensionMismatch(BrowmadError):
    """Two images that must share dimensions do not."""


class DegenerateAlignment(BrowmadError):
    """Landmark sets are collinear; no similarity transform can be fitted."""


class MalformedManifest(BrowmadError):
    """A manifest CSV is structurally invalid."""


class MissingFile(BrowmadError):
    """A file referenced by a manifest entry does not exist."""


class SingleClassGroup(BrowmadError):
    """An evaluation group does not contain both bonafide and morph scores."""


class InsufficientData(BrowmadError):
    """A train/test split would leave a side with too few of one class."""
