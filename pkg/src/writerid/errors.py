"""Exception hierarchy shared across the pipeline."""


class WriterIdError(Exception):
    """Base class for every error raised by this package."""


class DataError(WriterIdError):
    """Problem with the input data (images, manifests, caches)."""


class ConfigError(WriterIdError):
    """Invalid configuration value or combination."""


class InvalidImage(DataError):
    pass


class ConstantImage(DataError):
    """Image has a single intensity level, so no threshold separates it."""


class BlankDocument(DataError):
    pass


class InsufficientText(DataError):
    def __init__(self, possible, required):
        super().__init__(f"image yields {possible} blocks, {required} required")
        self.possible = possible
        self.required = required


class BlockTooSmall(DataError):
    pass


class ShapeError(WriterIdError, ValueError):
    pass


class DegenerateLabels(WriterIdError, ValueError):
    pass


class StratificationError(WriterIdError, ValueError):
    pass


class NoEvidence(WriterIdError, ValueError):
    pass


class ClassSetMismatch(WriterIdError, ValueError):
    pass


class ManifestError(DataError):
    pass


class EmptySubset(DataError):
    pass


class PlanError(DataError):
    pass


class FeatureCacheMiss(DataError):
    pass
