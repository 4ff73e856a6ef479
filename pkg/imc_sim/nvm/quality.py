"""
STT-MRAM quality levels: write-error rate, set current and per-bit write energy.
"""
from dataclasses import dataclass
from enum import Enum

from imc_sim.errors import ConfigError, UnknownQualityLevel


class QualityLevelId(str, Enum):
    Q0 = "Q0"
    Q1 = "Q1"
    Q2 = "Q2"
    Q3 = "Q3"
    Q4 = "Q4"

    @property
    def index(self) -> int:
        return int(self.value[1:])


@dataclass(frozen=True)
class QualityLevel:
    """One write-current setting of the STT-MRAM chip."""
    id: QualityLevelId
    wer: float                      # per-bit write error probability
    set_current_uA: float
    write_energy_per_bit_pJ: float

    def __post_init__(self):
        if not 0.0 <= self.wer <= 1.0:
            raise ConfigError(f"WER {self.wer} outside [0, 1]", key=f"ql.{self.id.value}.wer")
        if self.write_energy_per_bit_pJ < 0 or self.set_current_uA < 0:
            raise ConfigError("negative current or energy", key=f"ql.{self.id.value}")

    @property
    def is_baseline(self) -> bool:
        return self.id is QualityLevelId.Q0


# (id, wer, set current uA, write energy pJ/bit)
DEFAULT_QUALITY_LEVELS: tuple[QualityLevel, ...] = (
    QualityLevel(QualityLevelId.Q0, 1e-8, 1153.0, 167.0),
    QualityLevel(QualityLevelId.Q1, 1e-6, 865.0, 94.0),
    QualityLevel(QualityLevelId.Q2, 1e-5, 769.0, 74.0),
    QualityLevel(QualityLevelId.Q3, 1e-4, 673.0, 57.0),
    QualityLevel(QualityLevelId.Q4, 1e-3, 577.0, 43.0),
)


class QualityCatalog:
    """Ordered, validated set of quality levels."""

    def __init__(self, levels: tuple[QualityLevel, ...] | list[QualityLevel] = DEFAULT_QUALITY_LEVELS):
        ordered = sorted(levels, key=lambda ql: ql.id.index)
        if [ql.id for ql in ordered] != list(QualityLevelId):
            raise ConfigError("catalog must define exactly Q0..Q4", key="ql")
        for lower, higher in zip(ordered, ordered[1:]):
            if not higher.wer > lower.wer:
                raise ConfigError(
                    f"WER must strictly increase from {lower.id.value} to {higher.id.value}",
                    key=f"ql.{higher.id.value}.wer",
                )
            if not higher.write_energy_per_bit_pJ < lower.write_energy_per_bit_pJ:
                raise ConfigError(
                    f"write energy must strictly decrease from {lower.id.value} to {higher.id.value}",
                    key=f"ql.{higher.id.value}.write_energy_pJ",
                )
            if not higher.set_current_uA < lower.set_current_uA:
                raise ConfigError(
                    f"set current must strictly decrease from {lower.id.value} to {higher.id.value}",
                    key=f"ql.{higher.id.value}.set_current_uA",
                )
        self._levels = {ql.id: ql for ql in ordered}

    def __iter__(self):
        return iter(self._levels.values())

    def __len__(self) -> int:
        return len(self._levels)

    def get(self, ql_id: "str | QualityLevelId") -> QualityLevel:
        """Look up a level by id ("Q3" or QualityLevelId.Q3)."""
        try:
            key = QualityLevelId(ql_id)
        except ValueError:
            raise UnknownQualityLevel(f"unknown quality level '{ql_id}'") from None
        return self._levels[key]

    @property
    def baseline(self) -> QualityLevel:
        return self._levels[QualityLevelId.Q0]

    def consumption_ratio(self, ql: QualityLevel) -> float:
        """Per-bit write energy of `ql` relative to Q0."""
        return ql.write_energy_per_bit_pJ / self.baseline.write_energy_per_bit_pJ


def write_energy(ql: QualityLevel, n_bits: int) -> float:
    """Energy in pJ to write `n_bits` at quality level `ql`."""
    if n_bits < 0:
        raise ValueError(f"n_bits must be >= 0, got {n_bits}")
    return n_bits * ql.write_energy_per_bit_pJ


def read_energy(n_bits: int, read_energy_pJ: float = 0.0) -> float:
    """Reads are error-free; their energy per bit is configurable and 0 by default."""
    if n_bits < 0:
        raise ValueError(f"n_bits must be >= 0, got {n_bits}")
    return n_bits * read_energy_pJ


def injection_wer(ql: QualityLevel, literal_baseline: bool = False) -> float:
    """Error rate actually injected: Q0 counts as error-free unless the literal flag is set."""
    if ql.is_baseline and not literal_baseline:
        return 0.0
    return ql.wer
