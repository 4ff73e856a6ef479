"""
Dense classifier, int8-quantized or float32, split into slice tasks.

Every layer accumulates over `slices` column ranges of its input. Each range is
one task: all but the last commit the running partial sums (int32 or float32)
to NVM, the last one commits the layer's activations. A power failure loses at
most one slice of work, and every committed partial sum passes through the
approximate segment.
"""
import math
from functools import lru_cache

import numpy as np

from imc_sim.benchmarks.base import Benchmark, WorkloadClass, input_rng
from imc_sim.benchmarks.weights import (
    CALIBRATION_INPUTS,
    HIDDEN_SIZES,
    INPUT_SCALE,
    INPUT_ZERO_POINT,
    N_CLASSES,
    PIXEL_OFFSET,
    WEIGHT_SEED,
    DenseLayer,
    generate_weights,
    load_weights,
)
from imc_sim.metrics.qor import Metric, QorValue, evaluate
from imc_sim.runtime.tasks import Task

INT8_MIN, INT8_MAX = -128, 127
HIDDEN_ZERO_POINT = -128
DEFAULT_SLICES = 8


def quantize_multiplier(real: float) -> tuple[int, int]:
    """
    Express a positive real multiplier as (m, s) with real ~= m / 2^s, m in [2^30, 2^31).
    """
    if not real > 0:
        raise ValueError(f"multiplier must be > 0, got {real}")
    mantissa, exponent = math.frexp(real)          # real = mantissa * 2^exponent
    m = int(round(mantissa * (1 << 31)))
    shift = 31 - exponent
    if m == 1 << 31:
        m //= 2
        shift -= 1
    if not 1 <= shift <= 62:
        raise ValueError(f"multiplier {real} out of range")
    return m, shift


def requantize(acc: np.ndarray, multiplier: int, shift: int, zero_point: int) -> np.ndarray:
    """Rounded (acc * m) >> s plus zero point, saturated to int8."""
    scaled = (acc.astype(np.int64) * multiplier + (1 << (shift - 1))) >> shift
    return np.clip(scaled + zero_point, INT8_MIN, INT8_MAX).astype(np.int8)


def quantize_input(pixels: np.ndarray) -> np.ndarray:
    """uint8 pixels to centered int8 network inputs."""
    return (pixels.astype(np.int16) - PIXEL_OFFSET).astype(np.int8)


def float_input(pixels: np.ndarray) -> np.ndarray:
    return pixels.astype(np.float32) - np.float32(PIXEL_OFFSET)


def dense_int8(
    x: np.ndarray,
    in_zero_point: int,
    layer: DenseLayer,
    in_scale: float,
    out_zero_point: int,
) -> np.ndarray:
    """One int8 layer; clipping at the -128 zero point doubles as ReLU."""
    acc = (x.astype(np.int64) - in_zero_point) @ layer.weights.astype(np.int64).T
    acc = acc + layer.bias.astype(np.int64)
    m, s = quantize_multiplier(in_scale * layer.weight_scale / layer.output_scale)
    return requantize(acc, m, s, out_zero_point)


def quantized_forward(layers: list[DenseLayer], pixels: np.ndarray) -> list[np.ndarray]:
    """Full int8 forward pass; returns every layer's committed activations."""
    x = quantize_input(pixels)
    zp, scale = INPUT_ZERO_POINT, INPUT_SCALE
    outs = []
    for i, layer in enumerate(layers):
        out_zp = HIDDEN_ZERO_POINT if i < len(layers) - 1 else 0
        x = dense_int8(x, zp, layer, scale, out_zp)
        outs.append(x)
        zp, scale = out_zp, layer.output_scale
    return outs


def calibration_images(input_side: int, seed: int = WEIGHT_SEED) -> np.ndarray:
    """Centered float calibration inputs for the output scales."""
    return float_input(make_images(input_side, CALIBRATION_INPUTS, input_rng(seed + 1)))


def slice_bounds(cols: int, slices: int) -> list[int]:
    """Column boundaries of min(slices, cols) near-equal ranges."""
    n = min(slices, cols)
    return [cols * i // n for i in range(n + 1)]


@lru_cache(maxsize=8)
def network_weights(input_side: int, quantized: bool, weights_dir: str | None = None) -> list[DenseLayer]:
    """Frozen blob from `weights_dir` when given, generated weights otherwise."""
    if weights_dir is not None:
        return load_weights(weights_dir, input_side, quantized)
    calibration = calibration_images(input_side) if quantized else None
    return generate_weights(input_side, quantized, calibration)


def make_images(input_side: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Smooth blob-like grayscale images, flattened to (count, side*side) uint8."""
    coarse = rng.uniform(0, 255, size=(count, 4, 4))
    factor = input_side // 4
    images = np.kron(coarse, np.ones((factor, factor)))
    images = images + rng.normal(0, 8, size=images.shape)
    return np.clip(np.round(images), 0, 255).astype(np.uint8).reshape(count, -1)


class NnBenchmark(Benchmark):
    """
    side*side -> 128 -> 64 -> 10, each layer split into `slices` tasks.

    Each run classifies a batch of images; QoR is agreement of the top-1 classes
    with the golden run. Weights do not depend on the campaign seed.
    """

    metric = Metric.AGREEMENT

    def __init__(
        self,
        input_side: int = 16,
        quantized: bool = True,
        batch: int = 16,
        slices: int = DEFAULT_SLICES,
        weights_dir=None,
    ):
        if input_side not in (16, 32):
            raise ValueError(f"input_side must be 16 or 32, got {input_side}")
        if batch < 1:
            raise ValueError(f"batch must be >= 1, got {batch}")
        if slices < 1:
            raise ValueError(f"slices must be >= 1, got {slices}")
        self.input_side = input_side
        self.quantized = quantized
        self.batch = batch
        self.slices = slices
        self.name = f"nn_{'q' if quantized else 'f'}{input_side}"
        self.workload = WorkloadClass.NN_QUANT if quantized else WorkloadClass.NN_FLOAT
        self.layers = network_weights(
            input_side, quantized, None if weights_dir is None else str(weights_dir)
        )

    def generate_input(self, seed: int) -> dict[str, np.ndarray]:
        pixels = make_images(self.input_side, self.batch, input_rng(seed))
        if self.quantized:
            return {"nn_input": quantize_input(pixels)}
        return {"nn_input": float_input(pixels)}

    def _slice_task(self, index: int, part: int, bounds: list[int], source: str, target: str) -> Task:
        layer = self.layers[index]
        rows = layer.shape[0]
        c0, c1 = bounds[part], bounds[part + 1]
        first, final = part == 0, part == len(bounds) - 2
        last_layer = index == len(self.layers) - 1
        partial = f"nn_acc{index + 1}"
        weights = layer.weights[:, c0:c1]
        if self.quantized:
            in_zp = INPUT_ZERO_POINT if index == 0 else HIDDEN_ZERO_POINT
            in_scale = INPUT_SCALE if index == 0 else self.layers[index - 1].output_scale
            out_zp = 0 if last_layer else HIDDEN_ZERO_POINT
            m, s = quantize_multiplier(in_scale * layer.weight_scale / layer.output_scale)

        def compute(inputs):
            x = inputs[source][:, c0:c1]
            macs = x.shape[0] * rows * (c1 - c0)
            if self.quantized:
                start = layer.bias if first else inputs[partial]
                acc = (x.astype(np.int64) - in_zp) @ weights.astype(np.int64).T
                # 32-bit accumulator: wraps like the MCU's
                acc = (acc + start.astype(np.int64)).astype(np.int32)
                if not final:
                    return {partial: acc}, {"mac": macs}
                return {target: requantize(acc, m, s, out_zp)}, {"mac": macs, "requant": x.shape[0] * rows}

            start = layer.bias if first else inputs[partial]
            with np.errstate(over="ignore", invalid="ignore"):
                acc = (start + x @ weights.T).astype(np.float32)
                if final and not last_layer:
                    acc = np.maximum(acc, np.float32(0.0))
            return {target if final else partial: acc}, {"mac_float": macs}

        inputs = (source,) if first else (source, partial)
        return Task(f"dense{index + 1}.{part}", compute, inputs, (target if final else partial,))

    def tasks(self) -> list[Task]:
        names = ["nn_input", "nn_act1", "nn_act2", "nn_logits"]
        tasks = []
        for i, layer in enumerate(self.layers):
            bounds = slice_bounds(layer.shape[1], self.slices)
            tasks += [self._slice_task(i, p, bounds, names[i], names[i + 1]) for p in range(len(bounds) - 1)]
        return tasks

    @property
    def footprint_bytes(self) -> int:
        """One input vector plus a row of 32-bit accumulators, for the widest layer."""
        elt = 1 if self.quantized else 4
        widths = (self.input_side**2,) + HIDDEN_SIZES + (N_CLASSES,)
        return max(elt * cols + 4 * rows for cols, rows in zip(widths, widths[1:]))

    @property
    def output_buffer(self) -> str:
        return "nn_logits"

    def predictions(self, buffers: dict[str, np.ndarray]) -> np.ndarray:
        logits = np.asarray(buffers[self.output_buffer])
        if not self.quantized:
            # NaN from corrupted exponents never wins
            logits = np.nan_to_num(logits.astype(np.float64), nan=-np.inf)
        return np.argmax(logits, axis=1)

    def evaluate(self, approx, golden) -> QorValue:
        return evaluate(self.metric, self.predictions(approx), self.predictions(golden))

    def dumps(self, buffers):
        return {"nn_labels": ("text", self.predictions(buffers))}
