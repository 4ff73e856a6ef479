"""
Builders turning a validated SimConfig into model objects.
"""
from pathlib import Path

from imc_sim.config.schemas import SimConfig
from imc_sim.energy.mcu import McuCatalog, McuProfile
from imc_sim.energy.model import CostModel
from imc_sim.errors import ConfigError, UnknownBenchmark, UnknownQualityLevel
from imc_sim.metrics.qor import Metric
from imc_sim.nvm.quality import QualityCatalog, QualityLevel, QualityLevelId
from imc_sim.nvm.segments import MemorySegment, SegmentCatalog
from imc_sim.runtime.harvest import ConstantHarvest, FailureSchedule, HarvestModel, TraceHarvest


def _ql_id(name: str, key: str) -> QualityLevelId:
    try:
        return QualityLevelId(name)
    except ValueError:
        raise UnknownQualityLevel(f"unknown quality level '{name}'", key=key) from None


def quality_catalog(cfg: SimConfig) -> QualityCatalog:
    """Quality levels from [ql.*]; the built-in table when none are configured."""
    if not cfg.ql:
        return QualityCatalog()
    levels = [
        QualityLevel(
            id=_ql_id(name, f"ql.{name}"),
            wer=section.wer,
            set_current_uA=section.set_current_uA,
            write_energy_per_bit_pJ=section.write_energy_pJ,
        )
        for name, section in cfg.ql.items()
    ]
    return QualityCatalog(levels)


def segment_catalog(cfg: SimConfig, ql: str | QualityLevelId | None = None) -> SegmentCatalog:
    """
    Segments from [segment.*].

    When `ql` is given, every approximate segment is moved to it (one campaign cell).
    """
    qualities = quality_catalog(cfg)
    segments = [
        MemorySegment(
            id=name,
            quality=qualities.get(_ql_id(section.ql, f"segment.{name}.ql")),
            protected=section.protected,
            buffers=tuple(section.buffers),
        )
        for name, section in cfg.segments.items()
    ]
    catalog = SegmentCatalog(segments)
    if ql is not None:
        catalog = catalog.with_quality(qualities.get(_ql_id(str(getattr(ql, "value", ql)), "ql")))
    return catalog


def mcu_catalog(cfg: SimConfig) -> McuCatalog:
    if not cfg.mcus:
        return McuCatalog()
    return McuCatalog([
        McuProfile(
            name=name,
            clock_MHz=section.clock_MHz,
            main_memory_KiB=section.memory_KiB,
            active_power_uW_per_MHz=section.active_power_uW_per_MHz,
            cycles_per_mem_access=section.cycles_per_mem_access,
            access_width_bits=section.access_width_bits,
            isa_factors=dict(section.isa_factor),
        )
        for name, section in cfg.mcus.items()
    ])


def cost_model(cfg: SimConfig) -> CostModel:
    return CostModel(cfg.cost)


def harvest_model(cfg: SimConfig) -> HarvestModel:
    if cfg.harvest.mode == "trace":
        return TraceHarvest.from_file(Path(cfg.harvest.trace))
    return ConstantHarvest(cfg.harvest.power_uW * 1e6)  # µW -> pW


def failure_schedule(cfg: SimConfig) -> FailureSchedule | None:
    if cfg.runtime.failure_schedule is None:
        return None
    return FailureSchedule.from_file(cfg.runtime.failure_schedule)


def validate_catalogs(cfg: SimConfig) -> None:
    """
    Build every catalog once so invariant violations surface as ConfigError.

    Also checks that campaign selections name known QLs, MCUs and benchmarks, and
    that every benchmark accepts its configured sizes.
    """
    quality_catalog(cfg)
    if not cfg.segments:
        raise ConfigError("no [segment.*] sections configured", key="segment")
    segment_catalog(cfg)
    mcus = mcu_catalog(cfg)

    for name in cfg.campaign.qls:
        _ql_id(name, "campaign.qls")

    from imc_sim.benchmarks import BENCHMARKS
    for name in list(cfg.campaign.benchmarks) + list(cfg.benchmarks):
        if name not in BENCHMARKS:
            raise UnknownBenchmark(f"unknown benchmark '{name}'", key=f"benchmark.{name}")
    for bench, names in cfg.campaign.mcus.items():
        if bench not in BENCHMARKS:
            raise UnknownBenchmark(f"unknown benchmark '{bench}'", key=f"campaign.mcus.{bench}")
        for name in names:
            mcus.get(name)

    for metric in cfg.campaign.thresholds:
        try:
            Metric(metric)
        except ValueError:
            raise ConfigError(
                f"unknown metric '{metric}'", key=f"campaign.thresholds.{metric}"
            ) from None

    from imc_sim.benchmarks import create_benchmark
    for name in dict.fromkeys(list(cfg.campaign.benchmarks) + list(cfg.benchmarks)):
        try:
            create_benchmark(name, cfg.benchmark_settings(name))
        except ValueError as exc:
            raise ConfigError(str(exc), key=f"benchmark.{name}") from None
