"""Exception types shared across the simulator.

Plain ``ValueError`` / ``KeyError`` are used for garden-variety bad inputs;
the classes here exist where callers need to tell failure modes apart
(config loading, trace parsing, degenerate elections, reward pools).
"""


class SimulationError(Exception):
    """Base class for simulator-specific failures."""


class ConfigError(SimulationError):
    """Invalid scenario configuration. Carries the offending field path."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config field '{field}': {message}")


class TraceError(SimulationError):
    """Malformed block-trace file. Carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"trace line {line_no}: {message}")


class DegenerateElectionError(SimulationError):
    """No probability mass to elect a proposer from."""


class RewardPoolError(SimulationError):
    """Reward pool cannot cover the base stipend of the active set."""
