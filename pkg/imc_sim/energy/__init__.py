from imc_sim.energy.mcu import DEFAULT_MCUS, McuCatalog, McuProfile, energy_per_cycle
from imc_sim.energy.model import (
    CostModel,
    CostReport,
    EnergyBreakdown,
    attempt_duration_s,
    savings_vs_baseline,
    total_energy,
)
from imc_sim.energy.capacitor import (
    CAPACITOR_SIZES,
    Capacitor,
    CapacitorPlan,
    capacitor_sizing_plan,
    recharge_time_s,
    size_capacitor,
)

__all__ = [
    "DEFAULT_MCUS",
    "McuCatalog",
    "McuProfile",
    "energy_per_cycle",
    "CostModel",
    "CostReport",
    "EnergyBreakdown",
    "attempt_duration_s",
    "savings_vs_baseline",
    "total_energy",
    "CAPACITOR_SIZES",
    "Capacitor",
    "CapacitorPlan",
    "capacitor_sizing_plan",
    "recharge_time_s",
    "size_capacitor",
]
