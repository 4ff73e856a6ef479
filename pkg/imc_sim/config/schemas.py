from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from imc_sim.nvm.injection import InjectionMode
from imc_sim.runtime.executor import DrainMode, RechargePolicy


def _split_list(value):
    """Comma-separated text -> list of stripped, non-empty items."""
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


def _blank_to_none(value):
    if isinstance(value, str) and not value.strip():
        return None
    return value


class _Section(BaseModel):
    """Config sections reject keys they do not know."""
    model_config = ConfigDict(extra="forbid")


class QualityLevelConfig(_Section):
    """One row of the quality-level catalog."""
    wer: float = Field(ge=0.0, le=1.0)
    set_current_uA: float = Field(gt=0.0)
    write_energy_pJ: float = Field(ge=0.0)  # per bit


class SegmentConfig(_Section):
    """A memory segment and the buffers bound to it."""
    ql: str
    protected: bool = False
    buffers: list[str] = Field(default_factory=list)  # names or shell patterns

    @field_validator("buffers", mode="before")
    @classmethod
    def split_buffers(cls, value):
        return _split_list(value)


class McuConfig(_Section):
    clock_MHz: float = Field(gt=0.0)
    active_power_uW_per_MHz: float = Field(gt=0.0)
    memory_KiB: float = Field(gt=0.0)
    cycles_per_mem_access: float = Field(default=1.0, ge=0.0)  # k
    access_width_bits: int = Field(default=8, gt=0)            # w
    isa_factor: dict[str, float] = Field(default_factory=dict)  # workload class -> multiplier


class NvmConfig(_Section):
    injection_mode: InjectionMode = InjectionMode.FLIP_NEW
    literal_baseline_wer: bool = False  # inject Q0's nominal WER instead of zero
    read_energy_pJ: float = Field(default=0.0, ge=0.0)


class CapacitorConfig(_Section):
    v_on: float = 3.0
    v_off: float = 2.2
    margin: float = Field(default=1.1, ge=1.0)
    leak_pW_per_uF: float = Field(default=25.0, ge=0.0)

    @model_validator(mode="after")
    def check_voltages(self):
        if not self.v_on > self.v_off > 0:
            raise ValueError(f"need v_on > v_off > 0, got v_on={self.v_on}, v_off={self.v_off}")
        return self


class HarvestConfig(_Section):
    mode: Literal["constant", "trace"] = "constant"
    power_uW: float = Field(default=1000.0, ge=0.0)
    trace: str | None = None  # file of `time_us, power_pW` lines

    @field_validator("trace", mode="before")
    @classmethod
    def blank_trace(cls, value):
        return _blank_to_none(value)

    @model_validator(mode="after")
    def trace_needs_file(self):
        if self.mode == "trace" and not self.trace:
            raise ValueError("harvest mode 'trace' needs a trace file")
        return self


class RuntimeConfig(_Section):
    drain_mode: DrainMode = DrainMode.UPFRONT
    recharge: RechargePolicy = RechargePolicy.ATTEMPT
    failure_schedule: str | None = None

    @field_validator("failure_schedule", mode="before")
    @classmethod
    def blank_schedule(cls, value):
        return _blank_to_none(value)


class BenchmarkSettings(_Section):
    """Size parameters; each benchmark reads the ones it needs."""
    n: int = Field(default=256, ge=2)
    width: int = Field(default=64, gt=0)
    height: int = Field(default=64, gt=0)
    threshold: int = Field(default=16, ge=0)
    batch: int = Field(default=16, ge=1)
    slices: int = Field(default=8, ge=1)
    n_bytes: int = Field(default=4096, gt=0)
    weights_dir: str | None = None

    @field_validator("weights_dir", mode="before")
    @classmethod
    def blank_weights_dir(cls, value):
        return _blank_to_none(value)


class CampaignConfig(_Section):
    """Which cells to sweep and how many runs per cell."""
    benchmarks: list[str] = Field(default_factory=list)
    qls: list[str] = Field(default_factory=lambda: ["Q0", "Q1", "Q2", "Q3", "Q4"])
    runs: int = Field(default=200, ge=1)
    seed: int = Field(default=2024, ge=0)
    workers: int = Field(default=1, ge=1)
    out: str = "results"
    injection_mode: InjectionMode | None = None  # overrides [nvm] for the campaign
    mcus: dict[str, list[str]] = Field(default_factory=dict)  # benchmark -> MCU names
    thresholds: dict[str, float] = Field(default_factory=dict)  # metric -> unusable bound

    @field_validator("benchmarks", "qls", mode="before")
    @classmethod
    def split_names(cls, value):
        return _split_list(value)

    @field_validator("injection_mode", mode="before")
    @classmethod
    def blank_mode(cls, value):
        return _blank_to_none(value)

    @field_validator("mcus", mode="before")
    @classmethod
    def split_mcus(cls, value):
        if isinstance(value, dict):
            return {k: _split_list(v) for k, v in value.items()}
        return value


class SimConfig(BaseModel):
    """Complete simulator configuration, one field per config section family."""
    model_config = ConfigDict(extra="forbid")

    ql: dict[str, QualityLevelConfig] = Field(default_factory=dict)
    segments: dict[str, SegmentConfig] = Field(default_factory=dict)
    mcus: dict[str, McuConfig] = Field(default_factory=dict)
    nvm: NvmConfig = Field(default_factory=NvmConfig)
    cost: dict[str, float] = Field(default_factory=dict)  # cycles per abstract op
    capacitor: CapacitorConfig = Field(default_factory=CapacitorConfig)
    harvest: HarvestConfig = Field(default_factory=HarvestConfig)
    runtime: RuntimeConfig = Field(default_factory=RuntimeConfig)
    benchmarks: dict[str, BenchmarkSettings] = Field(default_factory=dict)
    campaign: CampaignConfig = Field(default_factory=CampaignConfig)

    def benchmark_settings(self, name: str) -> BenchmarkSettings:
        return self.benchmarks.get(name) or BenchmarkSettings()

    @property
    def injection_mode(self) -> InjectionMode:
        return self.campaign.injection_mode or self.nvm.injection_mode


class CliOverrides(BaseModel):
    """Command-line overrides; anything left as None keeps the file value."""
    ql: list[str] | None = None
    mcu: list[str] | None = None
    benchmark: list[str] | None = None
    runs: int | None = Field(default=None, ge=1)
    seed: int | None = Field(default=None, ge=0)
    mode: InjectionMode | None = None
    out: str | None = None
    workers: int | None = Field(default=None, ge=1)
