"""
Microcontroller profiles.
"""
from dataclasses import dataclass, field

from imc_sim.errors import ConfigError, UnknownMcu


@dataclass(frozen=True)
class McuProfile:
    """One MCU: clock, main memory, active power and per-workload ISA factors."""
    name: str
    clock_MHz: float
    main_memory_KiB: float
    active_power_uW_per_MHz: float
    cycles_per_mem_access: float = 1.0   # k
    access_width_bits: int = 8           # w
    isa_factors: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for key in ("clock_MHz", "main_memory_KiB", "active_power_uW_per_MHz"):
            if not getattr(self, key) > 0:
                raise ConfigError(f"{key} must be > 0", key=f"mcu.{self.name}.{key}")
        if self.cycles_per_mem_access < 0:
            raise ConfigError("must be >= 0", key=f"mcu.{self.name}.cycles_per_mem_access")
        if self.access_width_bits <= 0:
            raise ConfigError("must be > 0", key=f"mcu.{self.name}.access_width_bits")
        for workload, factor in self.isa_factors.items():
            if not factor > 0:
                raise ConfigError("must be > 0", key=f"mcu.{self.name}.isa_factor.{workload}")

    def isa_cycle_factor(self, workload: str) -> float:
        return self.isa_factors.get(str(workload), 1.0)

    @property
    def main_memory_bytes(self) -> int:
        return int(self.main_memory_KiB * 1024)


_NN_FACTORS_M0 = {"nn_quant": 20.0, "nn_float": 20.0}
_NN_FACTORS_M4 = {"nn_quant": 1.4, "nn_float": 1.4}

DEFAULT_MCUS: tuple[McuProfile, ...] = (
    McuProfile("MSP430G", 16, 0.512, 503),
    McuProfile("MSP430L", 4, 2, 58.5),
    McuProfile("MSP430S", 16, 8, 28.3),
    McuProfile("M0", 40, 32, 12.5, isa_factors=_NN_FACTORS_M0),
    McuProfile("M33", 160, 768, 12.0),
    McuProfile("M4", 80, 128, 32.82, isa_factors=_NN_FACTORS_M4),
    McuProfile("M7", 480, 1024, 58.5),
)


class McuCatalog:
    def __init__(self, profiles=DEFAULT_MCUS):
        self._profiles = {p.name: p for p in profiles}
        if not self._profiles:
            raise ConfigError("MCU catalog is empty", key="mcu")

    def __iter__(self):
        return iter(self._profiles.values())

    def __contains__(self, name: str) -> bool:
        return name in self._profiles

    def get(self, name: str) -> McuProfile:
        try:
            return self._profiles[name]
        except KeyError:
            raise UnknownMcu(f"unknown MCU '{name}'") from None


def energy_per_cycle(mcu: McuProfile) -> float:
    """pJ per cycle: µW/MHz equals pJ/cycle at one cycle per clock tick."""
    return mcu.active_power_uW_per_MHz
