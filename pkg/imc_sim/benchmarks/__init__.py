"""
Benchmark registry.

Factories take the benchmark's settings (see config.schemas.BenchmarkSettings).
"""
from collections.abc import Callable

from imc_sim.benchmarks.base import Benchmark, WorkloadClass
from imc_sim.benchmarks.codec import CodecBenchmark
from imc_sim.benchmarks.edge import EdgeBenchmark
from imc_sim.benchmarks.fft import FftBenchmark
from imc_sim.benchmarks.nn import NnBenchmark
from imc_sim.benchmarks.only_writes import OnlyWritesBenchmark
from imc_sim.config.schemas import BenchmarkSettings
from imc_sim.errors import UnknownBenchmark


def _nn(side: int, quantized: bool):
    def factory(s: BenchmarkSettings) -> Benchmark:
        return NnBenchmark(
            input_side=side,
            quantized=quantized,
            batch=s.batch,
            slices=s.slices,
            weights_dir=s.weights_dir,
        )
    return factory


BENCHMARKS: dict[str, Callable[[BenchmarkSettings], Benchmark]] = {
    "fft": lambda s: FftBenchmark(n=s.n),
    "codec": lambda s: CodecBenchmark(width=s.width, height=s.height),
    "edge": lambda s: EdgeBenchmark(width=s.width, height=s.height, threshold=s.threshold),
    "nn_q16": _nn(16, True),
    "nn_q32": _nn(32, True),
    "nn_f16": _nn(16, False),
    "nn_f32": _nn(32, False),
    "only_writes": lambda s: OnlyWritesBenchmark(n_bytes=s.n_bytes),
}


def create_benchmark(name: str, settings: BenchmarkSettings | None = None) -> Benchmark:
    """Build a registered benchmark by name."""
    factory = BENCHMARKS.get(name)
    if factory is None:
        raise UnknownBenchmark(f"unknown benchmark '{name}'; known: {', '.join(BENCHMARKS)}")
    return factory(settings or BenchmarkSettings())


__all__ = [
    "BENCHMARKS",
    "Benchmark",
    "CodecBenchmark",
    "EdgeBenchmark",
    "FftBenchmark",
    "NnBenchmark",
    "OnlyWritesBenchmark",
    "WorkloadClass",
    "create_benchmark",
]
