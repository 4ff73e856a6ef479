import numpy as np

from imc_sim.benchmarks.base import Benchmark, WorkloadClass, input_rng
from imc_sim.runtime.tasks import Task


class OnlyWritesBenchmark(Benchmark):
    """Persists a seeded byte array and nothing else; the storage-only limit."""

    name = "only_writes"
    workload = WorkloadClass.MICRO
    metric = None

    def __init__(self, n_bytes: int = 4096, chunk_bytes: int = 64):
        if n_bytes <= 0:
            raise ValueError(f"n_bytes must be > 0, got {n_bytes}")
        self.n_bytes = n_bytes
        self.chunk_bytes = chunk_bytes

    def generate_input(self, seed: int) -> dict[str, np.ndarray]:
        data = input_rng(seed).integers(0, 256, size=self.n_bytes, dtype=np.uint8)
        return {"only_writes_source": data}

    def tasks(self) -> list[Task]:
        def compute(inputs):
            # no compute ops: cycles come only from k per access
            return {"only_writes_output": np.array(inputs["only_writes_source"])}, {}

        return [Task("write", compute, ("only_writes_source",), ("only_writes_output",))]

    @property
    def footprint_bytes(self) -> int:
        return min(self.chunk_bytes, self.n_bytes)

    @property
    def output_buffer(self) -> str:
        return "only_writes_output"
