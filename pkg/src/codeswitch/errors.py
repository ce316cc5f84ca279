"""Exception types shared across the toolkit."""


class CodeswitchError(Exception):
    """Base class for all toolkit errors."""


class DataError(CodeswitchError):
    """Malformed or inconsistent input data: TSV rows, lexicons, alignments."""


class ConfigError(CodeswitchError):
    """Invalid run configuration: bad language pairing, missing resources."""


class TransportError(CodeswitchError):
    """External scorer unreachable, or the remote side reported an error."""

    def __init__(self, endpoint: str, message: str):
        super().__init__(f"scorer at {endpoint}: {message}")
        self.endpoint = endpoint


class ScorerContractError(CodeswitchError):
    """A scorer violated its contract, e.g. returned misaligned predictions."""
