"""Exception types shared across the toolkit."""


class SliceScoutError(Exception):
    """Base class for all toolkit-specific failures."""


class FormatError(SliceScoutError):
    """File does not look like the expected format (bad magic or header field)."""


class UnsupportedDataError(SliceScoutError):
    """Well-formed file uses a feature outside the supported subset."""


class CorruptFileError(SliceScoutError):
    """File is recognized but its payload is truncated or inconsistent."""


class NoForegroundError(SliceScoutError):
    """Segmentation found no foreground anywhere in a volume."""
