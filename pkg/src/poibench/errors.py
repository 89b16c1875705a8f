"""Exception hierarchy shared across the package."""


class PoibenchError(Exception):
    """Base class for all package errors."""


class DatasetError(PoibenchError):
    """Problems with dataset files or their contents."""


class DatasetIncompleteError(DatasetError):
    """A required dataset file is missing."""


class DatasetParseError(DatasetError):
    """A dataset file line could not be parsed."""


class DatasetValidationError(DatasetError):
    """Dataset contents violate a declared invariant."""


class ColdUserError(PoibenchError):
    """The user has no history to fit a model on."""


class ConfigurationError(PoibenchError):
    """Invalid configuration value or metric/model selection."""


class ContextUnavailableError(PoibenchError):
    """A model requires a context the dataset does not provide."""


class PlanningError(PoibenchError):
    """The experiment plan cannot be built from the configuration."""
