"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
NumericError -> 4.
"""


class FbanditError(Exception):
    pass


class ConfigError(FbanditError, ValueError):
    """Malformed configuration or spec string."""


class DataError(FbanditError, ValueError):
    """Invalid observations: out-of-support values, empty samples, bad files."""


class NumericError(FbanditError, ValueError):
    """Parameter outside its admissible numeric range."""
