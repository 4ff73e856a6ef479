from abc import ABC, abstractmethod
from enum import Enum

import numpy as np

from imc_sim.metrics.qor import Metric, QorValue
from imc_sim.runtime.tasks import TaskPipeline


class WorkloadClass(str, Enum):
    SIGNAL = "signal"
    IMAGE_CODEC = "image_codec"
    EDGE = "edge"
    NN_QUANT = "nn_quant"
    NN_FLOAT = "nn_float"
    MICRO = "micro"


def input_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


class Benchmark(ABC):
    """
    Base class for workloads.

    A benchmark turns a seed into input buffers, decomposes the computation into
    transactional tasks, and compares a committed output with the golden one.
    """

    name: str = ""
    workload: WorkloadClass = WorkloadClass.MICRO
    metric: Metric | None = None

    @abstractmethod
    def generate_input(self, seed: int) -> dict[str, np.ndarray]:
        """Input buffers, deterministic in `seed`."""
        pass

    @abstractmethod
    def tasks(self) -> list:
        """Ordered Task list reading the generated inputs."""
        pass

    @property
    @abstractmethod
    def footprint_bytes(self) -> int:
        """Volatile working set of the largest task."""
        pass

    @property
    @abstractmethod
    def output_buffer(self) -> str:
        """Buffer holding the final result."""
        pass

    def pipeline(self, seed: int) -> TaskPipeline:
        return TaskPipeline(
            tasks=self.tasks(),
            initial_buffers=self.generate_input(seed),
            workload=self.workload.value,
        )

    def evaluate(
        self, approx: dict[str, np.ndarray], golden: dict[str, np.ndarray]
    ) -> QorValue | None:
        """QoR of committed buffers against golden buffers; None without a metric."""
        return None

    def dumps(self, buffers: dict[str, np.ndarray]) -> dict[str, tuple[str, np.ndarray]]:
        """Buffers worth writing out for inspection: name -> (kind, array)."""
        return {self.output_buffer: ("text", buffers[self.output_buffer])}
