"""
Fixed-point radix-2 decimation-in-time FFT over Q15 samples.

Data runs at Q31 internally with Q30 twiddles; each stage scales by 1/2 with
rounding, so the Q15 output spectrum is the DFT divided by n.
"""
import numpy as np

from imc_sim.benchmarks.base import Benchmark, WorkloadClass, input_rng
from imc_sim.metrics.qor import ARE_EPSILON, Metric, QorValue, evaluate
from imc_sim.runtime.tasks import Task

Q15 = 1 << 15
TWIDDLE_BITS = 30


def bit_reverse_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def _round_shift(x: np.ndarray, shift: int) -> np.ndarray:
    return (x + (1 << (shift - 1))) >> shift


def fft_q15(samples: np.ndarray) -> tuple[np.ndarray, dict[str, int]]:
    """
    Forward FFT of int16 samples.

    Returns:
        (int16 array of shape (n, 2) holding real/imag Q15 parts of DFT/n, op counts)
    """
    x = np.asarray(samples, dtype=np.int64).reshape(-1)
    n = x.size
    if n < 2 or n & (n - 1):
        raise ValueError(f"FFT size must be a power of two >= 2, got {n}")
    stages = n.bit_length() - 1

    re = x[bit_reverse_indices(n)] << 16   # Q15 -> Q31
    im = np.zeros(n, dtype=np.int64)

    half = 1
    while half < n:
        k = np.arange(half)
        angle = -2.0 * np.pi * k / (2 * half)
        wr = np.round(np.cos(angle) * (1 << TWIDDLE_BITS)).astype(np.int64)
        wi = np.round(np.sin(angle) * (1 << TWIDDLE_BITS)).astype(np.int64)

        re = re.reshape(-1, 2, half)
        im = im.reshape(-1, 2, half)
        ar, ai = re[:, 0, :], im[:, 0, :]
        br, bi = re[:, 1, :], im[:, 1, :]
        tr = _round_shift(br * wr - bi * wi, TWIDDLE_BITS)
        ti = _round_shift(br * wi + bi * wr, TWIDDLE_BITS)
        re = np.stack([_round_shift(ar + tr, 1), _round_shift(ar - tr, 1)], axis=1).reshape(-1)
        im = np.stack([_round_shift(ai + ti, 1), _round_shift(ai - ti, 1)], axis=1).reshape(-1)
        half *= 2

    out = np.stack([_round_shift(re, 16), _round_shift(im, 16)], axis=1)
    out = np.clip(out, -Q15, Q15 - 1).astype(np.int16)
    ops = {"butterfly": (n // 2) * stages, "bitrev": n}
    return out, ops


class FftBenchmark(Benchmark):
    """Single-task FFT of a seeded multi-tone signal with noise."""

    name = "fft"
    workload = WorkloadClass.SIGNAL
    metric = Metric.ARE

    def __init__(self, n: int = 256, tones: int = 3, noise: float = 0.01):
        if n < 2 or n & (n - 1):
            raise ValueError(f"n must be a power of two, got {n}")
        self.n = n
        self.tones = tones
        self.noise = noise

    def generate_input(self, seed: int) -> dict[str, np.ndarray]:
        rng = input_rng(seed)
        t = np.arange(self.n)
        bins = rng.integers(1, self.n // 2, size=self.tones)
        phases = rng.uniform(0, 2 * np.pi, size=self.tones)
        amps = rng.uniform(0.15, 0.25, size=self.tones)
        signal = sum(a * np.cos(2 * np.pi * b * t / self.n + p) for a, b, p in zip(amps, bins, phases))
        signal = signal + rng.normal(0.0, self.noise, size=self.n)
        samples = np.clip(np.round(signal * (Q15 - 1)), -Q15, Q15 - 1).astype(np.int16)
        return {"fft_input": samples}

    def tasks(self) -> list[Task]:
        def compute(inputs):
            spectrum, ops = fft_q15(inputs["fft_input"])
            return {"fft_output": spectrum}, ops

        return [Task("fft", compute, ("fft_input",), ("fft_output",))]

    @property
    def footprint_bytes(self) -> int:
        # in-place complex Q15 working buffer
        return 4 * self.n

    @property
    def output_buffer(self) -> str:
        return "fft_output"

    def evaluate(self, approx, golden) -> QorValue:
        a = approx[self.output_buffer].astype(np.float64) / Q15
        g = golden[self.output_buffer].astype(np.float64) / Q15
        return evaluate(self.metric, a, g, eps=ARE_EPSILON)
