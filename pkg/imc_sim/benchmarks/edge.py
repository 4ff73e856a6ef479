"""
Three-task edge detector: smoothing, gradient, threshold with non-maximum thinning.

Every stage commits its image, so an error committed by one stage is what the
next stage reads.
"""
import numpy as np

from imc_sim.benchmarks.base import Benchmark, WorkloadClass, input_rng
from imc_sim.metrics.qor import Metric, QorValue, evaluate
from imc_sim.runtime.tasks import Task

DEFAULT_THRESHOLD = 16


def _shifted(padded: np.ndarray, dy: int, dx: int, h: int, w: int) -> np.ndarray:
    return padded[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]


def smooth(image: np.ndarray) -> np.ndarray:
    """[1 2 1] x [1 2 1] / 16 with rounding and replicated borders."""
    img = np.asarray(image, dtype=np.int32)
    h, w = img.shape
    p = np.pad(img, 1, mode="edge")
    acc = np.zeros((h, w), dtype=np.int32)
    for dy, wy in ((-1, 1), (0, 2), (1, 1)):
        for dx, wx in ((-1, 1), (0, 2), (1, 1)):
            acc += wy * wx * _shifted(p, dy, dx, h, w)
    return ((acc + 8) >> 4).astype(np.uint8)


def gradient(image: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Sobel magnitude (|gx| + |gy|) / 8 as uint8, and the dominant axis
    (0 = horizontal gradient, 1 = vertical gradient).
    """
    img = np.asarray(image, dtype=np.int32)
    h, w = img.shape
    p = np.pad(img, 1, mode="edge")

    def s(dy, dx):
        return _shifted(p, dy, dx, h, w)

    gx = (s(-1, 1) + 2 * s(0, 1) + s(1, 1)) - (s(-1, -1) + 2 * s(0, -1) + s(1, -1))
    gy = (s(1, -1) + 2 * s(1, 0) + s(1, 1)) - (s(-1, -1) + 2 * s(-1, 0) + s(-1, 1))
    magnitude = np.clip((np.abs(gx) + np.abs(gy)) >> 3, 0, 255).astype(np.uint8)
    direction = (np.abs(gy) > np.abs(gx)).astype(np.uint8)
    return magnitude, direction


def thin(magnitude: np.ndarray, direction: np.ndarray, threshold: int) -> np.ndarray:
    """Keep pixels at or above `threshold` that peak along their gradient axis."""
    mag = np.asarray(magnitude, dtype=np.int32)
    h, w = mag.shape
    p = np.pad(mag, 1, mode="constant")
    left, right = _shifted(p, 0, -1, h, w), _shifted(p, 0, 1, h, w)
    up, down = _shifted(p, -1, 0, h, w), _shifted(p, 1, 0, h, w)
    vertical = np.asarray(direction) != 0
    peak = np.where(vertical, (mag > up) & (mag >= down), (mag > left) & (mag >= right))
    return ((mag >= threshold) & peak).astype(np.uint8)


def draw_scene(height: int, width: int, rng: np.random.Generator, shapes: int) -> np.ndarray:
    yy, xx = np.mgrid[0:height, 0:width]
    image = np.full((height, width), int(rng.integers(20, 60)), dtype=np.int32)
    for _ in range(shapes):
        level = int(rng.integers(110, 230))
        if rng.random() < 0.5:
            y0, x0 = int(rng.integers(2, height - 12)), int(rng.integers(2, width - 12))
            y1 = int(rng.integers(y0 + 6, min(y0 + 30, height - 2)))
            x1 = int(rng.integers(x0 + 6, min(x0 + 30, width - 2)))
            image[y0:y1, x0:x1] = level
        else:
            cy, cx = rng.uniform(8, height - 8), rng.uniform(8, width - 8)
            r = rng.uniform(3, 10)
            image[(yy - cy) ** 2 + (xx - cx) ** 2 <= r * r] = level
    return image.astype(np.uint8)


class EdgeBenchmark(Benchmark):
    name = "edge"
    workload = WorkloadClass.EDGE
    metric = Metric.PRECISION_RECALL

    def __init__(self, width: int = 64, height: int = 64, threshold: int = DEFAULT_THRESHOLD,
                 shapes: int = 4):
        if width < 24 or height < 24:
            raise ValueError(f"scene must be at least 24x24, got {width}x{height}")
        self.width = width
        self.height = height
        self.threshold = threshold
        self.shapes = shapes

    def generate_input(self, seed: int) -> dict[str, np.ndarray]:
        scene = draw_scene(self.height, self.width, input_rng(seed), self.shapes)
        return {"edge_input": scene}

    def tasks(self) -> list[Task]:
        def smooth_task(inputs):
            h, w = inputs["edge_input"].shape
            return {"edge_smooth": smooth(inputs["edge_input"])}, {"pixel_op": 9 * h * w}

        def gradient_task(inputs):
            h, w = inputs["edge_smooth"].shape
            magnitude, direction = gradient(inputs["edge_smooth"])
            return (
                {"edge_gradient": magnitude, "edge_direction": direction},
                {"pixel_op": 12 * h * w},
            )

        def thin_task(inputs):
            h, w = inputs["edge_gradient"].shape
            edges = thin(inputs["edge_gradient"], inputs["edge_direction"], self.threshold)
            return {"edge_map": edges}, {"pixel_op": 4 * h * w}

        return [
            Task("smooth", smooth_task, ("edge_input",), ("edge_smooth",)),
            Task("gradient", gradient_task, ("edge_smooth",), ("edge_gradient", "edge_direction")),
            Task("thin", thin_task, ("edge_gradient", "edge_direction"), ("edge_map",)),
        ]

    @property
    def footprint_bytes(self) -> int:
        # images stay in NVM; three-row windows of two input planes plus one output row
        return 7 * self.width

    @property
    def output_buffer(self) -> str:
        return "edge_map"

    def evaluate(self, approx, golden) -> QorValue:
        return evaluate(self.metric, approx[self.output_buffer] != 0, golden[self.output_buffer] != 0)

    def dumps(self, buffers):
        return {
            "edge_input": ("pgm", buffers["edge_input"]),
            "edge_map": ("pgm", buffers["edge_map"] * np.uint8(255)),
        }
