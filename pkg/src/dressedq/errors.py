"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid configuration: sizes, shapes, or limits violated."""


class DataFormatError(ValueError):
    """Malformed dataset file; message names the offending line."""


class SyncError(RuntimeError):
    """Worker replicas or gradient shapes diverged during a reduction."""


class TrainingError(RuntimeError):
    """Training aborted: non-finite gradients or a failed worker."""
