"""
Energy accounting: total = MCU compute + MCU persistence + STT-MRAM storage.
"""
import math
from collections.abc import Mapping
from dataclasses import dataclass, field

from imc_sim.energy.mcu import McuProfile, energy_per_cycle
from imc_sim.errors import InconsistentCost, ZeroBaseline
from imc_sim.nvm.quality import QualityLevel


@dataclass(frozen=True)
class CostReport:
    """Abstract execution cost of a task or a whole run."""
    cycles: int = 0
    mem_accesses: int = 0
    bits_written: int = 0

    def __post_init__(self):
        if self.cycles < 0 or self.mem_accesses < 0 or self.bits_written < 0:
            raise ValueError(f"cost counters must be >= 0: {self}")

    def __add__(self, other: "CostReport") -> "CostReport":
        return CostReport(
            self.cycles + other.cycles,
            self.mem_accesses + other.mem_accesses,
            self.bits_written + other.bits_written,
        )


@dataclass(frozen=True)
class EnergyBreakdown:
    """Energies in pJ. The total is derived, never passed in."""
    e_mcu_compute_pJ: float = 0.0
    e_mcu_persist_pJ: float = 0.0
    e_storage_pJ: float = 0.0
    e_total_pJ: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "e_total_pJ", self.e_mcu_compute_pJ + self.e_mcu_persist_pJ + self.e_storage_pJ
        )

    @classmethod
    def zero(cls) -> "EnergyBreakdown":
        return cls()

    def __add__(self, other: "EnergyBreakdown") -> "EnergyBreakdown":
        return EnergyBreakdown(
            self.e_mcu_compute_pJ + other.e_mcu_compute_pJ,
            self.e_mcu_persist_pJ + other.e_mcu_persist_pJ,
            self.e_storage_pJ + other.e_storage_pJ,
        )

    def scaled(self, fraction: float) -> "EnergyBreakdown":
        return EnergyBreakdown(
            self.e_mcu_compute_pJ * fraction,
            self.e_mcu_persist_pJ * fraction,
            self.e_storage_pJ * fraction,
        )


def total_energy(cost: CostReport, mcu: McuProfile, ql: QualityLevel) -> EnergyBreakdown:
    """
    Energy of `cost` executed on `mcu` with every persisted bit written at `ql`.

    compute = E_cycle * cycles
    persist = k * E_cycle * mem_accesses
    storage = w * E_bit(ql) * mem_accesses
    """
    w = mcu.access_width_bits
    if cost.bits_written != cost.mem_accesses * w:
        raise InconsistentCost(
            f"bits_written {cost.bits_written} != mem_accesses {cost.mem_accesses} x {w}"
        )
    e_cycle = energy_per_cycle(mcu)
    return EnergyBreakdown(
        e_mcu_compute_pJ=e_cycle * cost.cycles,
        e_mcu_persist_pJ=mcu.cycles_per_mem_access * e_cycle * cost.mem_accesses,
        e_storage_pJ=w * ql.write_energy_per_bit_pJ * cost.mem_accesses,
    )


def savings_vs_baseline(e: EnergyBreakdown, e_q0: EnergyBreakdown) -> float:
    """Fraction of the Q0 total saved by `e`."""
    if not e_q0.e_total_pJ > 0:
        raise ZeroBaseline("baseline energy is zero")
    return 1.0 - e.e_total_pJ / e_q0.e_total_pJ


class CostModel:
    """
    Turns abstract operation counts and output sizes into a CostReport.

    Args:
        coefficients: Cycles per abstract operation; operations not listed cost 1 cycle.
    """

    def __init__(self, coefficients: Mapping[str, float] | None = None):
        self.coefficients = dict(coefficients or {})

    def coefficient(self, op: str) -> float:
        return self.coefficients.get(op, 1.0)

    def cycles(self, ops: Mapping[str, int], mcu: McuProfile, workload: str) -> int:
        base = sum(count * self.coefficient(op) for op, count in ops.items())
        return int(round(base * mcu.isa_cycle_factor(workload)))

    @staticmethod
    def accesses(n_bits: int, mcu: McuProfile) -> int:
        return math.ceil(n_bits / mcu.access_width_bits)

    def report(
        self, ops: Mapping[str, int], output_bits: list[int], mcu: McuProfile, workload: str
    ) -> CostReport:
        accesses = sum(self.accesses(bits, mcu) for bits in output_bits)
        return CostReport(
            cycles=self.cycles(ops, mcu, workload),
            mem_accesses=accesses,
            bits_written=accesses * mcu.access_width_bits,
        )


def attempt_duration_s(cost: CostReport, mcu: McuProfile) -> float:
    """Wall time of one attempt: compute cycles plus k cycles per access."""
    total_cycles = cost.cycles + mcu.cycles_per_mem_access * cost.mem_accesses
    return total_cycles / (mcu.clock_MHz * 1e6)
