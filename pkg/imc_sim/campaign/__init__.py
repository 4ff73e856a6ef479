from imc_sim.campaign.records import CSV_COLUMNS, RunRecord
from imc_sim.campaign.runner import (
    Simulator,
    campaign_cells,
    check_memory_fit,
    input_seed,
    run_campaign,
    run_once,
)
from imc_sim.campaign.aggregate import CellSummary, aggregate, percentile
from imc_sim.campaign.tradeoff import TradeoffRow, emit_plot_data, format_table, tradeoff_table
from imc_sim.campaign.properties import degradation_not_decreasing, degradations, paired_not_worse
from imc_sim.campaign.output import (
    read_records_csv,
    records_csv,
    write_records_csv,
    write_summaries_csv,
    write_summaries_json,
)

__all__ = [
    "CSV_COLUMNS",
    "CellSummary",
    "RunRecord",
    "Simulator",
    "TradeoffRow",
    "aggregate",
    "campaign_cells",
    "check_memory_fit",
    "degradation_not_decreasing",
    "degradations",
    "emit_plot_data",
    "format_table",
    "input_seed",
    "paired_not_worse",
    "percentile",
    "read_records_csv",
    "records_csv",
    "run_campaign",
    "run_once",
    "tradeoff_table",
    "write_records_csv",
    "write_summaries_csv",
    "write_summaries_json",
]
