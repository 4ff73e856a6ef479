"""
Energy-saving vs QoR trade-off tables and their plot-data CSVs.
"""
import csv
import io
from collections import defaultdict
from collections.abc import Iterable
from dataclasses import dataclass

from imc_sim.campaign.aggregate import CellSummary
from imc_sim.storage.outputs import ArtifactStore

PLOT_COLUMNS = ("ql", "saving_pct", "qor_mean", "qor_p5", "qor_p95")


@dataclass(frozen=True)
class TradeoffRow:
    benchmark: str
    mcu: str
    ql: str
    saving_pct: float
    metric: str
    qor_mean: float | None
    qor_p5: float | None
    qor_p95: float | None
    beyond_threshold_frac: float | None


def tradeoff_table(summaries: Iterable[CellSummary]) -> list[TradeoffRow]:
    """One row per (benchmark, mcu, ql), sorted in that order."""
    rows = [
        TradeoffRow(
            benchmark=s.benchmark,
            mcu=s.mcu,
            ql=s.ql,
            saving_pct=s.saving_pct,
            metric=s.metric,
            qor_mean=s.qor_mean,
            qor_p5=s.qor_p5,
            qor_p95=s.qor_p95,
            beyond_threshold_frac=s.beyond_threshold_frac,
        )
        for s in summaries
    ]
    return sorted(rows, key=lambda r: (r.benchmark, r.mcu, r.ql))


def _cell(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def plot_data_csv(rows: list[TradeoffRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(PLOT_COLUMNS)
    for row in rows:
        writer.writerow([
            row.ql, _cell(row.saving_pct), _cell(row.qor_mean), _cell(row.qor_p5), _cell(row.qor_p95)
        ])
    return buf.getvalue()


def emit_plot_data(rows: Iterable[TradeoffRow], store: ArtifactStore) -> list[str]:
    """
    Write one `tradeoff_<benchmark>_<mcu>.csv` per (benchmark, mcu).

    Returns:
        Names of the written files, sorted.
    """
    groups: dict[tuple[str, str], list[TradeoffRow]] = defaultdict(list)
    for row in rows:
        groups[(row.benchmark, row.mcu)].append(row)
    names = []
    for (bench, mcu), group in sorted(groups.items()):
        name = f"tradeoff_{bench}_{mcu}.csv"
        store.save_text(name, plot_data_csv(sorted(group, key=lambda r: r.ql)))
        names.append(name)
    return names


def _fmt(value: float | None, spec: str) -> str:
    return "-" if value is None else format(value, spec)


def format_table(rows: Iterable[TradeoffRow]) -> str:
    """Fixed-width text rendering for the terminal."""
    header = (
        f"{'benchmark':<12} {'mcu':<8} {'ql':<3} {'saving%':>8} "
        f"{'metric':<16} {'qor_mean':>10} {'qor_p5':>10} {'qor_p95':>10} {'unusable':>8}"
    )
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.benchmark:<12} {r.mcu:<8} {r.ql:<3} {r.saving_pct:>8.2f} "
            f"{r.metric or '-':<16} {_fmt(r.qor_mean, '>10.4g')} {_fmt(r.qor_p5, '>10.4g')} "
            f"{_fmt(r.qor_p95, '>10.4g')} {_fmt(r.beyond_threshold_frac, '>8.3f')}"
        )
    return "\n".join(lines) + "\n"
