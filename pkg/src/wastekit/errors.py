"""Exception types shared across the toolkit."""


class WastekitError(Exception):
    """Base class for domain errors (bad rules, bad traces, bad stores).

    The CLI maps these to exit code 1; usage errors stay exit code 2.
    """


class RuleSetError(WastekitError):
    """Rules config is malformed or fails validation."""


class TraceError(WastekitError):
    """A trace file (landfill ops or scheduler workload) is malformed."""


class ObjectNotFoundError(WastekitError):
    """Requested object id is not present in the chunk store."""


class ChunkCorruptionError(WastekitError):
    """A stored chunk is missing or fails digest verification."""
