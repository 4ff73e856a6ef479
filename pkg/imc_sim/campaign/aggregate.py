"""
Per-cell statistics over run records.
"""
from collections import defaultdict
from collections.abc import Iterable, Mapping

import numpy as np
from pydantic import BaseModel

from imc_sim.campaign.records import RunRecord
from imc_sim.energy.model import EnergyBreakdown, savings_vs_baseline
from imc_sim.errors import EmptyInput, MissingBaseline
from imc_sim.metrics.qor import Metric, beyond_threshold, degradation

BASELINE_QL = "Q0"


class CellSummary(BaseModel):
    """Statistics of one (benchmark, mcu, ql) cell."""
    benchmark: str
    mcu: str
    ql: str
    runs: int
    energy_mean_pJ: float
    energy_std_pJ: float
    energy_p5_pJ: float
    energy_p95_pJ: float
    energy_compute_mean_pJ: float
    energy_persist_mean_pJ: float
    energy_storage_mean_pJ: float
    saving_pct: float
    failures_mean: float
    recharges_mean: float
    metric: str = ""
    qor_mean: float | None = None
    qor_std: float | None = None
    qor_p5: float | None = None
    qor_p95: float | None = None
    qor2_mean: float | None = None
    degradation_mean: float | None = None
    threshold: float | None = None
    beyond_threshold_frac: float | None = None

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.benchmark, self.mcu, self.ql)


def percentile(values, q: float) -> float:
    """Nearest-rank percentile."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise EmptyInput("percentile of an empty sequence")
    return float(np.percentile(values, q, method="inverted_cdf"))


def _stats(values) -> tuple[float, float, float, float]:
    """(mean, population std, p5, p95)"""
    values = np.asarray(values, dtype=np.float64)
    return (
        float(np.mean(values)),
        float(np.std(values)),
        percentile(values, 5),
        percentile(values, 95),
    )


def group_cells(records: Iterable[RunRecord]) -> dict[tuple[str, str, str], list[RunRecord]]:
    cells: dict[tuple[str, str, str], list[RunRecord]] = defaultdict(list)
    for record in records:
        cells[(record.benchmark, record.mcu, record.ql)].append(record)
    return dict(cells)


def _mean_energy(records: list[RunRecord]) -> EnergyBreakdown:
    return EnergyBreakdown(
        float(np.mean([r.energy_compute_pJ for r in records])),
        float(np.mean([r.energy_persist_pJ for r in records])),
        float(np.mean([r.energy_storage_pJ for r in records])),
    )


def aggregate(
    records: Iterable[RunRecord], thresholds: Mapping[str, float] | None = None
) -> list[CellSummary]:
    """
    Summarize every cell and its saving against the Q0 cell of the same
    (benchmark, mcu).

    Raises:
        MissingBaseline: a cell has no Q0 counterpart.

    Returns:
        Summaries sorted by (benchmark, mcu, ql).
    """
    thresholds = dict(thresholds or {})
    cells = group_cells(records)
    summaries = []
    for key in sorted(cells):
        bench, mcu, ql = key
        cell = sorted(cells[key], key=lambda r: r.run)
        baseline = cells.get((bench, mcu, BASELINE_QL))
        if baseline is None:
            raise MissingBaseline(f"no {BASELINE_QL} cell for {bench}/{mcu}")

        mean_energy = _mean_energy(cell)
        e_mean, e_std, e_p5, e_p95 = _stats([r.energy_total_pJ for r in cell])
        summary = dict(
            benchmark=bench,
            mcu=mcu,
            ql=ql,
            runs=len(cell),
            energy_mean_pJ=e_mean,
            energy_std_pJ=e_std,
            energy_p5_pJ=e_p5,
            energy_p95_pJ=e_p95,
            energy_compute_mean_pJ=mean_energy.e_mcu_compute_pJ,
            energy_persist_mean_pJ=mean_energy.e_mcu_persist_pJ,
            energy_storage_mean_pJ=mean_energy.e_storage_pJ,
            saving_pct=100.0 * savings_vs_baseline(mean_energy, _mean_energy(baseline)),
            failures_mean=float(np.mean([r.failures for r in cell])),
            recharges_mean=float(np.mean([r.recharges for r in cell])),
        )

        qors = [r.qor for r in cell if r.qor is not None]
        if qors:
            metric = qors[0].metric
            q_mean, q_std, q_p5, q_p95 = _stats([q.value for q in qors])
            summary.update(
                metric=metric.value,
                qor_mean=q_mean,
                qor_std=q_std,
                qor_p5=q_p5,
                qor_p95=q_p95,
                degradation_mean=float(np.mean([degradation(q) for q in qors])),
            )
            if metric is Metric.PRECISION_RECALL:
                summary["qor2_mean"] = float(np.mean([q.value2 for q in qors]))
            if metric.value in thresholds:
                t = thresholds[metric.value]
                summary["threshold"] = t
                summary["beyond_threshold_frac"] = (
                    sum(beyond_threshold(q, t) for q in qors) / len(qors)
                )
        summaries.append(CellSummary(**summary))
    return summaries
