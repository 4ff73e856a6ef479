from imc_sim.config.catalogs import (
    cost_model,
    failure_schedule,
    harvest_model,
    mcu_catalog,
    quality_catalog,
    segment_catalog,
    validate_catalogs,
)
from imc_sim.config.loader import (
    DEFAULTS_PATH,
    get_config,
    load_config,
    merge_config,
    parse_config,
)
from imc_sim.config.schemas import BenchmarkSettings, CliOverrides, SimConfig

__all__ = [
    "BenchmarkSettings",
    "CliOverrides",
    "DEFAULTS_PATH",
    "SimConfig",
    "cost_model",
    "failure_schedule",
    "get_config",
    "harvest_model",
    "load_config",
    "mcu_catalog",
    "merge_config",
    "parse_config",
    "quality_catalog",
    "segment_catalog",
    "validate_catalogs",
]
