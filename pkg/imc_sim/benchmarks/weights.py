"""
Frozen dense-network weights and their binary blob format.

Weights are a pure function of WEIGHT_SEED. freeze_weights writes them as blobs;
load_weights reads a blob back and never writes.

Blob layout (little-endian):

    header, 16 bytes:  magic b"IMCW" | version u16 | layer count u16 | dtype tag u8 | 7 pad bytes
    per layer:         rows u32 | cols u32 | weight scale f32 | output scale f32
                       weights rows*cols (int8 or float32) | bias rows (int32 or float32)

Dtype tag 0 stores int8 weights with int32 bias, tag 1 stores float32 for both.
Scales are 0 in float blobs.
"""
import logging
import os
import struct
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from imc_sim.errors import ConfigError

logger = logging.getLogger(__name__)

MAGIC = b"IMCW"
VERSION = 1
HEADER = struct.Struct("<4sHHB7x")
LAYER_HEADER = struct.Struct("<IIff")
DTYPE_INT8 = 0
DTYPE_FLOAT32 = 1

HIDDEN_SIZES = (128, 64)
N_CLASSES = 10
PIXEL_OFFSET = 128           # network inputs are pixel - 128, in [-128, 127]
INPUT_ZERO_POINT = 0
INPUT_SCALE = 1.0
CALIBRATION_INPUTS = 64

# Weights depend on this constant only, never on a campaign seed.
WEIGHT_SEED = 7919


@dataclass
class DenseLayer:
    weights: np.ndarray       # (rows, cols)
    bias: np.ndarray          # (rows,)
    weight_scale: float = 0.0
    output_scale: float = 0.0

    @property
    def shape(self) -> tuple[int, int]:
        return self.weights.shape


def write_weight_blob(path: str | Path, layers: list[DenseLayer], quantized: bool) -> None:
    """Write atomically so concurrent readers never see a partial blob."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tag = DTYPE_INT8 if quantized else DTYPE_FLOAT32
    w_dtype, b_dtype = ("<i1", "<i4") if quantized else ("<f4", "<f4")
    chunks = [HEADER.pack(MAGIC, VERSION, len(layers), tag)]
    for layer in layers:
        rows, cols = layer.shape
        chunks.append(LAYER_HEADER.pack(rows, cols, layer.weight_scale, layer.output_scale))
        chunks.append(np.ascontiguousarray(layer.weights, dtype=w_dtype).tobytes())
        chunks.append(np.ascontiguousarray(layer.bias, dtype=b_dtype).tobytes())

    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    with os.fdopen(fd, "wb") as f:
        f.write(b"".join(chunks))
    os.replace(tmp, path)


def read_weight_blob(path: str | Path) -> tuple[list[DenseLayer], bool]:
    """
    Parse a weight blob.

    Returns:
        (layers, quantized flag)
    """
    data = Path(path).read_bytes()
    if len(data) < HEADER.size:
        raise ConfigError(f"weight blob {path} is truncated")
    magic, version, n_layers, tag = HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise ConfigError(f"weight blob {path} has bad magic {magic!r}")
    if version != VERSION:
        raise ConfigError(f"weight blob {path} has unsupported version {version}")
    if tag not in (DTYPE_INT8, DTYPE_FLOAT32):
        raise ConfigError(f"weight blob {path} has unknown dtype tag {tag}")
    quantized = tag == DTYPE_INT8
    w_dtype, b_dtype = (np.dtype("<i1"), np.dtype("<i4")) if quantized else (np.dtype("<f4"),) * 2

    offset = HEADER.size
    layers = []
    for _ in range(n_layers):
        rows, cols, w_scale, out_scale = LAYER_HEADER.unpack_from(data, offset)
        offset += LAYER_HEADER.size
        n_w = rows * cols * w_dtype.itemsize
        weights = np.frombuffer(data, dtype=w_dtype, count=rows * cols, offset=offset)
        offset += n_w
        bias = np.frombuffer(data, dtype=b_dtype, count=rows, offset=offset)
        offset += rows * b_dtype.itemsize
        layers.append(DenseLayer(
            weights.reshape(rows, cols).astype(w_dtype.newbyteorder("=")),
            bias.astype(b_dtype.newbyteorder("=")),
            float(w_scale),
            float(out_scale),
        ))
    if offset != len(data):
        raise ConfigError(f"weight blob {path} has {len(data) - offset} trailing bytes")
    return layers, quantized


def float_layers(input_side: int, seed: int = WEIGHT_SEED) -> list[DenseLayer]:
    """
    Untrained dense weights, He-scaled.

    The first layer is drawn from (seed, input side); the hidden layers from the
    seed alone, so networks of different input sizes share them.
    """
    first = np.random.default_rng(np.random.SeedSequence([int(seed), input_side]))
    hidden = np.random.default_rng(np.random.SeedSequence([int(seed)]))
    sizes = (input_side * input_side,) + HIDDEN_SIZES + (N_CLASSES,)
    layers = []
    for i, (fan_in, fan_out) in enumerate(zip(sizes, sizes[1:])):
        rng = first if i == 0 else hidden
        weights = rng.normal(0.0, np.sqrt(2.0 / fan_in), size=(fan_out, fan_in))
        bias = rng.normal(0.0, 0.05, size=fan_out)
        layers.append(DenseLayer(weights.astype(np.float32), bias.astype(np.float32)))
    return layers


def float_forward(layers: list[DenseLayer], x: np.ndarray) -> list[np.ndarray]:
    """Activations of every layer for centered float inputs; ReLU on hidden layers."""
    activations = []
    h = x.astype(np.float32)
    for i, layer in enumerate(layers):
        h = h @ layer.weights.T + layer.bias
        if i < len(layers) - 1:
            h = np.maximum(h, 0.0)
        h = h.astype(np.float32)
        activations.append(h)
    return activations


def quantize_layers(
    layers: list[DenseLayer], calibration: np.ndarray, input_scale: float = INPUT_SCALE
) -> list[DenseLayer]:
    """
    Symmetric per-tensor int8 weights, int32 bias, and calibrated output scales.

    Hidden outputs use an asymmetric scale with zero point -128 covering [0, max];
    logits use a symmetric scale with zero point 0.
    """
    acts = float_forward(layers, calibration)
    in_scale = input_scale
    out = []
    for i, (layer, act) in enumerate(zip(layers, acts)):
        w_scale = float(np.max(np.abs(layer.weights))) / 127.0
        q_w = np.clip(np.round(layer.weights / w_scale), -127, 127).astype(np.int8)
        q_b = np.round(layer.bias / (in_scale * w_scale)).astype(np.int32)
        if i < len(layers) - 1:
            out_scale = max(float(np.max(act)), 1e-6) / 255.0
        else:
            out_scale = max(float(np.max(np.abs(act))), 1e-6) / 127.0
        out.append(DenseLayer(q_w, q_b, w_scale, out_scale))
        in_scale = out_scale
    return out


def blob_path(data_dir: str | Path, input_side: int, quantized: bool) -> Path:
    kind = "q" if quantized else "f"
    return Path(data_dir) / f"nn_{kind}{input_side}.bin"


def generate_weights(
    input_side: int, quantized: bool, calibration: np.ndarray | None = None
) -> list[DenseLayer]:
    """The frozen weights of one network variant, built from WEIGHT_SEED."""
    layers = float_layers(input_side)
    if quantized:
        if calibration is None:
            raise ValueError("quantized weights need calibration inputs")
        layers = quantize_layers(layers, calibration)
    return layers


def freeze_weights(
    data_dir: str | Path, input_side: int, quantized: bool, calibration: np.ndarray | None = None
) -> Path:
    """Write the generated weights of one variant as a blob under `data_dir`."""
    path = blob_path(data_dir, input_side, quantized)
    write_weight_blob(path, generate_weights(input_side, quantized, calibration), quantized)
    logger.info("froze %s weights to %s", "int8" if quantized else "float32", path)
    return path


def load_weights(data_dir: str | Path, input_side: int, quantized: bool) -> list[DenseLayer]:
    """Read a frozen blob; never writes."""
    path = blob_path(data_dir, input_side, quantized)
    if not path.is_file():
        raise ConfigError(f"weight blob {path} not found", key="weights_dir")
    layers, stored_quantized = read_weight_blob(path)
    if stored_quantized != quantized:
        raise ConfigError(f"weight blob {path} has the wrong dtype", key="weights_dir")
    expected = (input_side * input_side,) + HIDDEN_SIZES + (N_CLASSES,)
    shapes = [layer.shape for layer in layers]
    if shapes != [(b, a) for a, b in zip(expected, expected[1:])]:
        raise ConfigError(f"weight blob {path} has layer shapes {shapes}", key="weights_dir")
    return layers
