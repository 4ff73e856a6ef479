"""
Exception hierarchy for the simulator.

ConfigError subclasses map to CLI exit code 1, ModelError subclasses to exit code 2.
"""


class SimulationError(Exception):
    """Base class for every error raised by imc_sim."""


class ConfigError(SimulationError):
    """Invalid or unreadable configuration."""

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        location = ""
        if key is not None:
            location += f" [key {key}]"
        if line is not None:
            location += f" [line {line}]"
        super().__init__(f"{message}{location}")


class UnknownQualityLevel(ConfigError, ValueError):
    """A quality level id that is not in the catalog."""


class UnknownMcu(ConfigError, ValueError):
    """An MCU name that is not in the catalog."""


class UnknownBenchmark(ConfigError, ValueError):
    """A benchmark name that is not registered."""


class ModelError(SimulationError):
    """Runtime or model-level failure."""


class LengthMismatch(ModelError, ValueError):
    """Two sequences that must have equal length do not."""


class EmptyInput(ModelError, ValueError):
    """A metric was asked to summarize an empty sequence."""


class AllExcluded(ModelError, ValueError):
    """Every golden element fell below the relative-error epsilon."""


class UnknownBuffer(ModelError, KeyError):
    """A buffer name with no segment binding."""


class InconsistentCost(ModelError, ValueError):
    """bits_written does not equal mem_accesses times the access width."""


class ZeroBaseline(ModelError, ValueError):
    """The Q0 baseline energy is zero."""


class InvalidVoltages(ModelError, ValueError):
    """Capacitor thresholds violate v_on > v_off > 0."""


class NonTerminating(ModelError):
    """A task can never complete on its assigned capacitor."""


class NeverCharges(ModelError):
    """Harvested power never exceeds leakage."""


class MemoryFit(ModelError):
    """A benchmark does not fit the MCU's main memory."""


class MissingBaseline(ModelError):
    """An aggregate cell has no Q0 counterpart."""
