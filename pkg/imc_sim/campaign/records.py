import math

from pydantic import BaseModel, model_validator

from imc_sim.energy.model import CostReport, EnergyBreakdown
from imc_sim.metrics.qor import Metric, QorValue

# Column order of the records CSV.
CSV_COLUMNS = (
    "benchmark",
    "mcu",
    "ql",
    "seed",
    "run",
    "energy_total_pJ",
    "energy_compute_pJ",
    "energy_persist_pJ",
    "energy_storage_pJ",
    "cycles",
    "mem_accesses",
    "bits_written",
    "failures",
    "recharges",
    "metric",
    "qor_value",
    "qor_value2",
)


class RunRecord(BaseModel):
    """Outcome of one pipeline run in one campaign cell."""
    benchmark: str
    mcu: str
    ql: str
    seed: int  # input seed
    run: int
    energy_total_pJ: float
    energy_compute_pJ: float
    energy_persist_pJ: float
    energy_storage_pJ: float
    cycles: int
    mem_accesses: int
    bits_written: int
    failures: int = 0
    recharges: int = 0
    metric: str = ""  # empty for benchmarks without a QoR metric
    qor_value: float | None = None
    qor_value2: float | None = None
    sim_time_s: float = 0.0
    corrupted_bits: int = 0

    @model_validator(mode="after")
    def check_energy_sum(self):
        parts = self.energy_compute_pJ + self.energy_persist_pJ + self.energy_storage_pJ
        if not math.isclose(self.energy_total_pJ, parts, rel_tol=1e-9, abs_tol=1e-9):
            raise ValueError(f"energy_total_pJ {self.energy_total_pJ} != sum of parts {parts}")
        return self

    @classmethod
    def build(
        cls,
        benchmark: str,
        mcu: str,
        ql: str,
        seed: int,
        run: int,
        energy: EnergyBreakdown,
        cost: CostReport,
        qor: QorValue | None,
        **extra,
    ) -> "RunRecord":
        return cls(
            benchmark=benchmark,
            mcu=mcu,
            ql=ql,
            seed=seed,
            run=run,
            energy_total_pJ=energy.e_total_pJ,
            energy_compute_pJ=energy.e_mcu_compute_pJ,
            energy_persist_pJ=energy.e_mcu_persist_pJ,
            energy_storage_pJ=energy.e_storage_pJ,
            cycles=cost.cycles,
            mem_accesses=cost.mem_accesses,
            bits_written=cost.bits_written,
            metric=qor.metric.value if qor is not None else "",
            qor_value=qor.value if qor is not None else None,
            qor_value2=qor.value2 if qor is not None else None,
            **extra,
        )

    @property
    def energy(self) -> EnergyBreakdown:
        return EnergyBreakdown(
            self.energy_compute_pJ, self.energy_persist_pJ, self.energy_storage_pJ
        )

    @property
    def qor(self) -> QorValue | None:
        if not self.metric or self.qor_value is None:
            return None
        return QorValue(Metric(self.metric), self.qor_value, self.qor_value2)

    def sort_key(self) -> tuple:
        return (self.benchmark, self.mcu, self.ql, self.run)

    def csv_row(self) -> dict:
        return {column: getattr(self, column) for column in CSV_COLUMNS}
