"""Custom exceptions for dpcausal."""


class DPCausalError(Exception):
    """Base exception for dpcausal errors."""

    exit_code = 1


class ConfigError(DPCausalError):
    """Invalid run configuration or argument."""

    exit_code = 2


class InvalidFoldCountError(ConfigError):
    """Requested number of folds is outside [2, n]."""

    pass


class DataError(DPCausalError):
    """Dataset could not be read or violates the data contract."""

    exit_code = 3


class DatasetValidationError(DataError):
    """Dataset failed validation (non-binary treatment, non-finite values)."""

    pass


class PrivacyContractError(DPCausalError):
    """A private release was requested without a usable privacy budget."""

    exit_code = 4


class NonPrivateModeError(PrivacyContractError):
    """Zero budget passed where noise calibration needs mu > 0."""

    pass


class EstimationError(DPCausalError):
    """Error during nuisance aggregation or estimation."""

    pass


class FitError(EstimationError):
    """A nuisance learner could not be fitted."""

    pass
