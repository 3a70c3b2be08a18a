# utils/error_handling.py
"""Exception root shared by all conditional-BO modules.

Modules define their own subclasses next to the code that raises them.
"""


class ConditionalBOError(Exception):
    """Base exception for the conditional Bayesian-optimization toolkit."""
    pass


class ConfigError(ConditionalBOError):
    """Exception raised when a configuration file cannot be loaded or validated."""
    pass
