import numpy as np
import pytest

from imc_sim.errors import ConfigError, LengthMismatch, UnknownBuffer, UnknownQualityLevel
from imc_sim.nvm import (
    InjectionMode,
    MemorySegment,
    QualityCatalog,
    QualityLevel,
    QualityLevelId,
    SegmentCatalog,
    WriteStream,
    error_positions,
    from_bits,
    inject_write,
    injection_wer,
    read_energy,
    segment_lookup,
    to_bits,
    write_buffer,
    write_energy,
)


class TestQualityCatalog:
    def setup_method(self):
        self.catalog = QualityCatalog()

    def test_consumption_ratios(self):
        ratios = [round(self.catalog.consumption_ratio(ql), 3) for ql in self.catalog]
        assert ratios == [1.0, 0.563, 0.443, 0.341, 0.257]

    def test_write_energy(self):
        assert write_energy(self.catalog.get("Q0"), 8) == 1336
        assert write_energy(self.catalog.get("Q4"), 8) == 344
        assert write_energy(self.catalog.get("Q2"), 0) == 0

    def test_write_energy_is_linear_in_bits(self):
        for ql in self.catalog:
            one = write_energy(ql, 1)
            assert one == pytest.approx(ql.write_energy_per_bit_pJ)
            assert write_energy(ql, 4096) == pytest.approx(4096 * one)
            assert write_energy(ql, 96) == pytest.approx(write_energy(ql, 32) + write_energy(ql, 64))

    def test_unknown_level(self):
        with pytest.raises(UnknownQualityLevel):
            self.catalog.get("Q9")

    def test_baseline_is_q0(self):
        assert self.catalog.baseline.id is QualityLevelId.Q0
        assert self.catalog.baseline.is_baseline

    def test_non_monotone_catalog_rejected(self):
        levels = list(self.catalog)
        levels[2] = QualityLevel(QualityLevelId.Q2, 1e-7, 769.0, 74.0)
        with pytest.raises(ConfigError):
            QualityCatalog(levels)

    def test_missing_level_rejected(self):
        with pytest.raises(ConfigError):
            QualityCatalog(list(self.catalog)[:4])

    def test_read_energy_defaults_to_zero(self):
        assert read_energy(1024) == 0.0
        assert read_energy(10, 0.5) == 5.0

    def test_q0_injects_nothing_unless_literal(self):
        q0 = self.catalog.baseline
        assert injection_wer(q0) == 0.0
        assert injection_wer(q0, literal_baseline=True) == 1e-8
        assert injection_wer(self.catalog.get("Q3")) == 1e-4


class TestSegments:
    def setup_method(self):
        catalog = QualityCatalog()
        self.q0 = catalog.get("Q0")
        self.q3 = catalog.get("Q3")
        self.segments = SegmentCatalog([
            MemorySegment("approx", self.q3, buffers=("*",)),
            MemorySegment("control", self.q0, protected=True, buffers=("task_control_block",)),
        ])

    def test_control_block_resolves_to_protected(self):
        segment = segment_lookup(self.segments, "task_control_block")
        assert segment.protected
        assert segment.quality.id is QualityLevelId.Q0

    def test_application_buffer_resolves_to_approx(self):
        segment = segment_lookup(self.segments, "fft_output")
        assert segment.id == "approx"
        assert segment.quality.id is QualityLevelId.Q3

    def test_unbound_buffer(self):
        segments = SegmentCatalog([MemorySegment("fft", self.q3, buffers=("fft_*",))])
        with pytest.raises(UnknownBuffer):
            segments.lookup("codec_output")

    def test_protected_must_be_q0(self):
        with pytest.raises(ConfigError):
            MemorySegment("control", self.q3, protected=True)

    def test_with_quality_keeps_protected_segment(self):
        moved = self.segments.with_quality(QualityCatalog().get("Q4"))
        assert moved.lookup("fft_output").quality.id is QualityLevelId.Q4
        assert moved.lookup("task_control_block").quality.id is QualityLevelId.Q0


class TestInjection:
    def test_zero_wer_returns_input(self):
        rng = np.random.default_rng(0)
        bits = rng.integers(0, 2, size=256).astype(np.uint8)
        stored = inject_write(bits, None, 0.0, InjectionMode.FLIP_NEW, rng)
        assert np.array_equal(stored, bits)

    def test_wer_one_flips_everything(self):
        bits = np.array([1, 0, 1, 1], dtype=np.uint8)
        stored = inject_write(bits, None, 1.0, InjectionMode.FLIP_NEW, np.random.default_rng(0))
        assert stored.tolist() == [0, 1, 0, 0]

    def test_retain_old_keeps_old_bits(self):
        new = np.array([1, 1, 1, 1], dtype=np.uint8)
        old = np.array([0, 0, 0, 0], dtype=np.uint8)
        stored = inject_write(new, old, 1.0, InjectionMode.RETAIN_OLD, np.random.default_rng(0))
        assert stored.tolist() == [0, 0, 0, 0]

    def test_retain_old_never_touches_equal_bits(self):
        rng = np.random.default_rng(1)
        new = rng.integers(0, 2, size=4096).astype(np.uint8)
        old = new.copy()
        old[::2] ^= 1
        stored = inject_write(new, old, 0.5, InjectionMode.RETAIN_OLD, rng)
        assert np.array_equal(stored[1::2], new[1::2])

    def test_retain_old_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            inject_write(
                np.zeros(8, dtype=np.uint8),
                np.zeros(7, dtype=np.uint8),
                0.1,
                InjectionMode.RETAIN_OLD,
                np.random.default_rng(0),
            )

    @pytest.mark.parametrize("ql_id", ["Q1", "Q2", "Q3", "Q4"])
    def test_flip_rate_within_binomial_bounds(self, ql_id):
        ql = QualityCatalog().get(ql_id)
        n = 10_000_000
        stream = WriteStream(2024, "flip-rate", ql_id)
        bits = np.zeros(n, dtype=np.uint8)
        flips = int(inject_write(bits, None, ql, InjectionMode.FLIP_NEW, stream.next_generator()).sum())
        sigma = np.sqrt(n * ql.wer * (1 - ql.wer))
        assert abs(flips - n * ql.wer) <= 4 * sigma

    def test_error_positions_sorted_and_in_range(self):
        positions = error_positions(100_000, 1e-2, np.random.default_rng(3))
        assert np.all(np.diff(positions) > 0)
        assert positions.min() >= 0 and positions.max() < 100_000


class TestWriteBuffer:
    def setup_method(self):
        catalog = QualityCatalog()
        self.approx = MemorySegment("approx", catalog.get("Q4"), buffers=("*",))
        self.control = MemorySegment("control", catalog.get("Q0"), protected=True)

    def test_bit_image_round_trip(self):
        data = np.array([[1.5, -2.25], [1e-3, 7.0]], dtype=np.float32)
        assert np.array_equal(from_bits(to_bits(data), data), data)

    def test_bit_order_is_little_endian(self):
        assert to_bits(np.array([1], dtype=np.uint16)).tolist() == [1] + [0] * 15

    def test_protected_segment_never_corrupts(self):
        stream = WriteStream(7, "protected")
        data = np.arange(4096, dtype=np.int32)
        for _ in range(50):
            stored, corrupted = write_buffer(data, None, self.control, InjectionMode.FLIP_NEW, stream)
            assert corrupted == 0
            assert np.array_equal(stored, data)

    def test_corrupted_count_matches_difference(self):
        stream = WriteStream(11, "count")
        data = np.zeros(8192, dtype=np.uint8)
        stored, corrupted = write_buffer(data, None, self.approx, InjectionMode.FLIP_NEW, stream)
        assert stored.dtype == data.dtype and stored.shape == data.shape
        assert corrupted == int(np.unpackbits(stored).sum())
        assert corrupted > 0

    def test_stream_is_deterministic(self):
        data = np.arange(2048, dtype=np.int16)
        a = write_buffer(data, None, self.approx, InjectionMode.FLIP_NEW, WriteStream(5, "fft", 3))[0]
        b = write_buffer(data, None, self.approx, InjectionMode.FLIP_NEW, WriteStream(5, "fft", 3))[0]
        c = write_buffer(data, None, self.approx, InjectionMode.FLIP_NEW, WriteStream(5, "fft", 4))[0]
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_every_write_consumes_an_index(self):
        stream = WriteStream(1, "idx")
        write_buffer(np.zeros(4, dtype=np.uint8), None, self.control, InjectionMode.FLIP_NEW, stream)
        write_buffer(np.zeros(4, dtype=np.uint8), None, self.approx, InjectionMode.FLIP_NEW, stream)
        assert stream.write_index == 2

    def test_retain_old_without_previous_uses_zeros(self):
        stream = WriteStream(2, "retain")
        data = np.zeros(1024, dtype=np.uint8)
        stored, corrupted = write_buffer(data, None, self.approx, InjectionMode.RETAIN_OLD, stream)
        # nothing switches from an all-zero previous image
        assert corrupted == 0
        assert np.array_equal(stored, data)
