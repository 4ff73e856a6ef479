"""
Memory segments of the STT-MRAM chip, each written at its own quality level.
"""
from dataclasses import dataclass, field, replace
from fnmatch import fnmatchcase

from imc_sim.errors import ConfigError, UnknownBuffer
from imc_sim.nvm.quality import QualityLevel, QualityLevelId

# Buffers that always belong to the protected segment.
CONTROL_BUFFERS = ("task_control_block",)


@dataclass(frozen=True)
class MemorySegment:
    """A region of NVM sharing one write current."""
    id: str
    quality: QualityLevel
    protected: bool = False
    buffers: tuple[str, ...] = field(default_factory=tuple)  # names or shell patterns

    def __post_init__(self):
        if self.protected and self.quality.id is not QualityLevelId.Q0:
            raise ConfigError(
                f"protected segment '{self.id}' must be at Q0, got {self.quality.id.value}",
                key=f"segment.{self.id}.ql",
            )

    def binds(self, buffer_id: str) -> bool:
        return any(fnmatchcase(buffer_id, pattern) for pattern in self.buffers)


class SegmentCatalog:
    """Ordered segment list; protected segments are consulted first."""

    def __init__(self, segments: list[MemorySegment]):
        if not segments:
            raise ConfigError("segment catalog is empty", key="segment")
        if sum(1 for s in segments if s.protected) > 1:
            raise ConfigError("at most one protected segment is supported", key="segment")
        self.segments = sorted(segments, key=lambda s: not s.protected)

    def __iter__(self):
        return iter(self.segments)

    @property
    def protected(self) -> MemorySegment | None:
        return next((s for s in self.segments if s.protected), None)

    def with_quality(self, ql: QualityLevel) -> "SegmentCatalog":
        """Copy with every approximate segment moved to `ql` (one campaign cell)."""
        return SegmentCatalog([
            s if s.protected else replace(s, quality=ql) for s in self.segments
        ])

    def lookup(self, buffer_id: str) -> MemorySegment:
        return segment_lookup(self.segments, buffer_id)


def segment_lookup(catalog: list[MemorySegment] | SegmentCatalog, buffer_id: str) -> MemorySegment:
    """Return the unique segment bound to `buffer_id`."""
    segments = list(catalog)
    if not segments:
        raise ConfigError("segment catalog is empty", key="segment")

    if buffer_id in CONTROL_BUFFERS:
        protected = next((s for s in segments if s.protected), None)
        if protected is not None:
            return protected

    matches = [s for s in segments if s.binds(buffer_id)]
    if not matches:
        raise UnknownBuffer(f"no segment binds buffer '{buffer_id}'")
    # Protected bindings win over approximate ones.
    matches.sort(key=lambda s: not s.protected)
    return matches[0]
