"""Exception types shared across the toolkit."""


class StegolabError(Exception):
    """Base class for all toolkit errors."""


class FormatError(StegolabError):
    """Malformed, truncated, or unsupported file/container bytes."""


class CapacityError(StegolabError):
    """Payload or mark does not fit in the cover."""


class NoFrameError(StegolabError):
    """No embedded frame found: wrong key, wrong parameters, or nothing hidden."""


class CorruptFrameError(NoFrameError):
    """Frame header parsed but its contents are inconsistent with the cover."""
