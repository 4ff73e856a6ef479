"""
CSV and JSON serialization of records and summaries.
"""
import csv
import io
import json
from collections.abc import Iterable
from pathlib import Path

from pydantic import ValidationError

from imc_sim.campaign.aggregate import CellSummary
from imc_sim.campaign.records import CSV_COLUMNS, RunRecord
from imc_sim.errors import ConfigError
from imc_sim.storage.outputs import ArtifactStore

SUMMARY_COLUMNS = tuple(CellSummary.model_fields)


def _value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv_text(columns: tuple[str, ...], rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_value(row[c]) for c in columns])
    return buf.getvalue()


def records_csv(records: Iterable[RunRecord]) -> str:
    return _csv_text(CSV_COLUMNS, (r.csv_row() for r in records))


def write_records_csv(records: Iterable[RunRecord], store: ArtifactStore, name: str = "records.csv") -> Path:
    return store.save_text(name, records_csv(records))


def read_records_csv(path: str | Path) -> list[RunRecord]:
    """Read a records CSV back; blank cells become None."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"records file not found: {path}")
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ConfigError(f"{path} does not have the records CSV header")
        records = []
        for lineno, row in enumerate(reader, start=2):
            data = {k: (v if v != "" else None) for k, v in row.items()}
            if data["metric"] is None:
                data["metric"] = ""
            try:
                records.append(RunRecord.model_validate(data))
            except ValidationError as e:
                raise ConfigError(f"bad record in {path}: {e.errors()[0]['msg']}", line=lineno) from None
    return records


def write_summaries_csv(
    summaries: Iterable[CellSummary], store: ArtifactStore, name: str = "summary.csv"
) -> Path:
    return store.save_text(name, _csv_text(SUMMARY_COLUMNS, (s.model_dump() for s in summaries)))


def write_summaries_json(
    summaries: Iterable[CellSummary], store: ArtifactStore, name: str = "summary.json"
) -> Path:
    data = [s.model_dump() for s in summaries]
    return store.save_text(name, json.dumps(data, indent=2) + "\n")
