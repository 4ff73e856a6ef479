"""
Baseline block codec: 8x8 integer DCT, quantization, dequantization, inverse DCT.
"""
import numpy as np

from imc_sim.benchmarks.base import Benchmark, WorkloadClass, input_rng
from imc_sim.metrics.qor import Metric, QorValue, evaluate
from imc_sim.runtime.tasks import Task

# Luminance table at quality 50.
QUANT_50 = np.array([
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
], dtype=np.int64)

BASIS_BITS = 14
COEF_FRAC_BITS = 4   # coefficients are kept in 1/16 units


def dct_basis() -> np.ndarray:
    """Orthonormal 8-point DCT-II matrix scaled by 2^14 and rounded."""
    k = np.arange(8)[:, None]
    n = np.arange(8)[None, :]
    alpha = np.where(k == 0, np.sqrt(1 / 8), np.sqrt(2 / 8))
    basis = alpha * np.cos((2 * n + 1) * k * np.pi / 16)
    return np.round(basis * (1 << BASIS_BITS)).astype(np.int64)


_C = dct_basis()


def _round_shift(x: np.ndarray, shift: int) -> np.ndarray:
    return (x + (1 << (shift - 1))) >> shift


def _round_div(a: np.ndarray, d: np.ndarray) -> np.ndarray:
    # round half away from zero, like the reference encoder's round(a / q)
    q = (np.abs(a) * 2 + d) // (2 * d)
    return np.sign(a) * q


def to_blocks(image: np.ndarray) -> np.ndarray:
    h, w = image.shape
    return image.reshape(h // 8, 8, w // 8, 8).swapaxes(1, 2).reshape(-1, 8, 8)


def from_blocks(blocks: np.ndarray, h: int, w: int) -> np.ndarray:
    return blocks.reshape(h // 8, w // 8, 8, 8).swapaxes(1, 2).reshape(h, w)


def forward_dct(blocks: np.ndarray) -> np.ndarray:
    """Level-shifted pixel blocks -> DCT coefficients in Q4."""
    x = blocks.astype(np.int64)
    coef = _C @ x @ _C.T
    return _round_shift(coef, 2 * BASIS_BITS - COEF_FRAC_BITS)


def inverse_dct(coef_q4: np.ndarray) -> np.ndarray:
    x = _C.T @ coef_q4.astype(np.int64) @ _C
    return _round_shift(x, 2 * BASIS_BITS + COEF_FRAC_BITS)


def codec_roundtrip(image: np.ndarray, quantize: bool = True) -> tuple[np.ndarray, dict[str, int]]:
    """
    Encode and decode a grayscale image.

    Returns:
        (reconstructed uint8 image, op counts)
    """
    img = np.asarray(image)
    h, w = img.shape
    if h % 8 or w % 8:
        raise ValueError(f"image sides must be multiples of 8, got {h}x{w}")
    blocks = to_blocks(img.astype(np.int64) - 128)
    coef = forward_dct(blocks)
    n_blocks = blocks.shape[0]
    ops = {"dct_mac": 2 * 2 * 8 * 8 * 8 * n_blocks}
    if quantize:
        step = QUANT_50 << COEF_FRAC_BITS
        coef = _round_div(coef, step) * step
        ops["quant_op"] = 2 * 64 * n_blocks
    pixels = inverse_dct(coef) + 128
    recon = np.clip(from_blocks(pixels, h, w), 0, 255).astype(np.uint8)
    return recon, ops


class CodecBenchmark(Benchmark):
    """Single-task image codec over a seeded textured scene."""

    name = "codec"
    workload = WorkloadClass.IMAGE_CODEC
    metric = Metric.RMSE

    def __init__(self, width: int = 64, height: int = 64):
        if width % 8 or height % 8:
            raise ValueError(f"image sides must be multiples of 8, got {width}x{height}")
        self.width = width
        self.height = height

    def generate_input(self, seed: int) -> dict[str, np.ndarray]:
        rng = input_rng(seed)
        yy, xx = np.mgrid[0:self.height, 0:self.width].astype(np.float64)
        fx, fy = rng.uniform(0.02, 0.15, size=2)
        image = 128 + 50 * np.sin(2 * np.pi * fx * xx + rng.uniform(0, 6.3)) \
            * np.cos(2 * np.pi * fy * yy + rng.uniform(0, 6.3))
        for _ in range(int(rng.integers(2, 5))):
            cy, cx = rng.uniform(0, self.height), rng.uniform(0, self.width)
            radius = rng.uniform(4, 16)
            image = image + rng.uniform(-60, 60) * np.exp(
                -((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * radius**2)
            )
        image = image + rng.normal(0, 4, size=image.shape)
        return {"codec_input": np.clip(np.round(image), 0, 255).astype(np.uint8)}

    def tasks(self) -> list[Task]:
        def compute(inputs):
            recon, ops = codec_roundtrip(inputs["codec_input"])
            return {"codec_output": recon}, ops

        return [Task("codec", compute, ("codec_input",), ("codec_output",))]

    @property
    def footprint_bytes(self) -> int:
        # images stay in NVM; only one pixel block, its int16 coefficients and the
        # decoded block are volatile
        return 64 + 128 + 64

    @property
    def output_buffer(self) -> str:
        return "codec_output"

    def evaluate(self, approx, golden) -> QorValue:
        return evaluate(self.metric, approx[self.output_buffer], golden[self.output_buffer])

    def dumps(self, buffers):
        return {
            "codec_input": ("pgm", buffers["codec_input"]),
            "codec_output": ("pgm", buffers["codec_output"]),
        }
