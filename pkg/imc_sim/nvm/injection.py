"""
Stochastic write-error injection for STT-MRAM commits.

Bits are handled as uint8 arrays of 0/1. Error positions are drawn with geometric
skip-ahead so that low error rates over large buffers stay cheap.
"""
import zlib
from enum import Enum

import numpy as np

from imc_sim.errors import LengthMismatch
from imc_sim.nvm.quality import QualityLevel, injection_wer
from imc_sim.nvm.segments import MemorySegment


class InjectionMode(str, Enum):
    FLIP_NEW = "FlipNew"      # every written bit may invert
    RETAIN_OLD = "RetainOld"  # a switching bit may keep its previous value


class WriteStream:
    """
    Per-run owner of the random streams used for injection.

    Every write gets its own Philox generator keyed by
    (campaign seed, run key, write index), so results do not depend on which
    process executes the run or in what order runs complete.
    """

    def __init__(self, seed: int, *key: int | str):
        if seed < 0:
            raise ValueError(f"seed must be >= 0, got {seed}")
        self.seed = int(seed)
        self.key = tuple(_key_word(part) for part in key)
        self.write_index = 0

    def next_generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(
            entropy=self.seed, spawn_key=self.key + (self.write_index,)
        )
        self.write_index += 1
        return np.random.Generator(np.random.Philox(sequence))


def _key_word(part: int | str) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    return int(part)


def error_positions(n: int, wer: float, rng: np.random.Generator) -> np.ndarray:
    """
    Sorted indices in [0, n) hit by an independent Bernoulli(wer) error.

    Gaps between consecutive errors are geometric, so only O(n * wer) draws are made.
    """
    if n <= 0 or wer <= 0.0:
        return np.empty(0, dtype=np.int64)
    if wer >= 1.0:
        return np.arange(n, dtype=np.int64)

    expected = n * wer
    batch = int(expected + 6.0 * np.sqrt(expected)) + 16
    chunks = []
    last = -1
    while True:
        steps = last + np.cumsum(rng.geometric(wer, size=batch))
        inside = steps[steps < n]
        chunks.append(inside)
        if inside.size < steps.size:
            break
        last = int(steps[-1])
    return np.concatenate(chunks).astype(np.int64, copy=False)


def inject_write(
    new_bits,
    old_bits,
    ql: QualityLevel | float,
    mode: InjectionMode,
    rng: np.random.Generator,
    *,
    literal_baseline: bool = False,
) -> np.ndarray:
    """
    Return the bits actually stored when `new_bits` is written over `old_bits`.

    Args:
        new_bits: Bits being written (0/1 values).
        old_bits: Bits currently stored; required in RetainOld mode.
        ql: Quality level of the target segment, or a raw error rate.
        mode: FlipNew or RetainOld.
        rng: Generator for this write.
        literal_baseline: Inject Q0's nominal rate instead of treating it as error-free.

    Returns:
        uint8 array of stored bits, same length as `new_bits`.
    """
    new = np.asarray(new_bits, dtype=np.uint8).reshape(-1)
    wer = ql if isinstance(ql, float | int) else injection_wer(ql, literal_baseline)
    mode = InjectionMode(mode)

    old = None
    if mode is InjectionMode.RETAIN_OLD:
        if old_bits is None:
            raise LengthMismatch("RetainOld needs the previously stored bits")
        old = np.asarray(old_bits, dtype=np.uint8).reshape(-1)
        if old.size != new.size:
            raise LengthMismatch(f"old has {old.size} bits, new has {new.size}")

    stored = new.copy()
    if wer <= 0.0:
        return stored

    if mode is InjectionMode.FLIP_NEW:
        hits = error_positions(new.size, wer, rng)
        stored[hits] ^= 1
    else:
        switching = np.flatnonzero(new != old)
        hits = switching[error_positions(switching.size, wer, rng)]
        stored[hits] = old[hits]
    return stored


def _little_endian(array: np.ndarray) -> np.ndarray:
    data = np.ascontiguousarray(array)
    return data.astype(data.dtype.newbyteorder("<"), copy=False)


def to_bits(array: np.ndarray) -> np.ndarray:
    """Bit image of an array's little-endian bytes, least significant bit first."""
    return np.unpackbits(_little_endian(array).view(np.uint8).reshape(-1), bitorder="little")


def from_bits(bits: np.ndarray, like: np.ndarray) -> np.ndarray:
    """Inverse of `to_bits` for an array shaped and typed like `like`."""
    le = _little_endian(like)
    raw = np.packbits(bits, bitorder="little")
    return raw.view(le.dtype).reshape(like.shape).astype(like.dtype)


def write_buffer(
    array: np.ndarray,
    old: np.ndarray | None,
    segment: MemorySegment,
    mode: InjectionMode,
    stream: WriteStream,
    *,
    literal_baseline: bool = False,
) -> tuple[np.ndarray, int]:
    """
    Commit one buffer through `segment` and return (stored array, corrupted bit count).

    Protected segments bypass injection. Every call consumes one write index of
    `stream`, whatever the segment, so later writes keep their streams.
    """
    rng = stream.next_generator()
    data = np.ascontiguousarray(array)
    if segment.protected:
        return data.copy(), 0

    wer = injection_wer(segment.quality, literal_baseline)
    if wer <= 0.0:
        return data.copy(), 0

    new_bits = to_bits(data)
    old_bits = None
    if InjectionMode(mode) is InjectionMode.RETAIN_OLD:
        previous = np.zeros_like(data) if old is None else np.asarray(old, dtype=data.dtype)
        if previous.shape != data.shape:
            raise LengthMismatch(
                f"stored buffer shape {previous.shape} differs from write shape {data.shape}"
            )
        old_bits = to_bits(previous)

    stored_bits = inject_write(new_bits, old_bits, float(wer), mode, rng)
    corrupted = int(np.count_nonzero(stored_bits != new_bits))
    return from_bits(stored_bits, data), corrupted
