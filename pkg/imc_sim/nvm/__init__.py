from imc_sim.nvm.quality import (
    DEFAULT_QUALITY_LEVELS,
    QualityCatalog,
    QualityLevel,
    QualityLevelId,
    injection_wer,
    read_energy,
    write_energy,
)
from imc_sim.nvm.segments import MemorySegment, SegmentCatalog, segment_lookup
from imc_sim.nvm.injection import (
    InjectionMode,
    WriteStream,
    error_positions,
    from_bits,
    inject_write,
    to_bits,
    write_buffer,
)

__all__ = [
    "DEFAULT_QUALITY_LEVELS",
    "QualityCatalog",
    "QualityLevel",
    "QualityLevelId",
    "injection_wer",
    "read_energy",
    "write_energy",
    "MemorySegment",
    "SegmentCatalog",
    "segment_lookup",
    "InjectionMode",
    "WriteStream",
    "error_positions",
    "from_bits",
    "inject_write",
    "to_bits",
    "write_buffer",
]
