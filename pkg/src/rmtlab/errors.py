"""Structured errors shared across the package."""


class ResourceGuardError(RuntimeError):
    """An enumeration or experiment exceeded its declared resource cap.

    Guards are explicit numeric limits; nothing is silently truncated. The
    message names the cap and the offending request so callers (and the CLI,
    which maps this to exit code 3) can report it.
    """


class ConfigError(ValueError):
    """An experiment configuration failed validation.

    Collects every offending field so a malformed config is reported in one
    pass rather than one field at a time.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ConvergenceError(RuntimeError):
    """An iterative numeric routine did not reach its tolerance.

    Carries the best error estimate achieved so callers can decide whether
    the partial result is still useful.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved
