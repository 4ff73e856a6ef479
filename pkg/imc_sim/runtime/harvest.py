"""
Ambient power sources, scripted failure schedules and capacitor charging.

Trace files hold one `time_us, power_pW` pair per line; `#` starts a comment
and surrounding parentheses are ignored.
"""
import logging
from abc import ABC, abstractmethod
from pathlib import Path

import numpy as np

from imc_sim.energy.capacitor import Capacitor
from imc_sim.errors import ConfigError, NeverCharges

logger = logging.getLogger(__name__)


def _read_pairs(path: str | Path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"trace file not found: {path}")
    lines = [
        line.replace("(", " ").replace(")", " ")
        for line in path.read_text(encoding="utf-8").splitlines()
    ]
    try:
        data = np.loadtxt(lines, comments="#", delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError as e:
        raise ConfigError(f"malformed trace file {path}: {e}") from None
    if data.size and data.shape[1] != 2:
        raise ConfigError(f"trace file {path} must have two columns")
    return data.reshape(-1, 2)


class HarvestModel(ABC):
    """Harvested power as a function of simulated time (seconds)."""

    @abstractmethod
    def power_at(self, t_s: float) -> float:
        """Instantaneous power in pW."""

    @abstractmethod
    def time_to_harvest(self, energy_pJ: float, t0_s: float, leak_pW: float) -> float:
        """Seconds from t0 until `energy_pJ` net of leakage has been collected."""

    @abstractmethod
    def energy_between(self, t0_s: float, t1_s: float, leak_pW: float = 0.0) -> float:
        """Net energy (pJ) collected over [t0, t1]; net power is floored at zero."""


class ConstantHarvest(HarvestModel):
    def __init__(self, power_pW: float):
        if power_pW < 0:
            raise ConfigError("harvest power must be >= 0", key="harvest.power_uW")
        self.power_pW = float(power_pW)

    def power_at(self, t_s: float) -> float:
        return self.power_pW

    def time_to_harvest(self, energy_pJ: float, t0_s: float, leak_pW: float) -> float:
        if energy_pJ <= 0:
            return 0.0
        net = self.power_pW - leak_pW
        if not net > 0:
            raise NeverCharges(f"harvest {self.power_pW} pW does not exceed leakage {leak_pW} pW")
        return energy_pJ / net

    def energy_between(self, t0_s: float, t1_s: float, leak_pW: float = 0.0) -> float:
        return max(self.power_pW - leak_pW, 0.0) * max(t1_s - t0_s, 0.0)


class TraceHarvest(HarvestModel):
    """
    Piecewise-constant power from (time_us, power_pW) samples.

    Before the first sample the first power applies; after the last sample the
    last power holds forever.
    """

    def __init__(self, samples):
        data = np.asarray(samples, dtype=np.float64).reshape(-1, 2)
        if data.shape[0] == 0:
            raise ConfigError("harvest trace is empty", key="harvest.trace")
        if np.any(data[:, 1] < 0):
            raise ConfigError("harvest trace has negative power", key="harvest.trace")
        order = np.argsort(data[:, 0], kind="stable")
        self.times_s = data[order, 0] * 1e-6
        self.powers_pW = data[order, 1]

    @classmethod
    def from_file(cls, path: str | Path) -> "TraceHarvest":
        return cls(_read_pairs(path))

    def _index(self, t_s: float) -> int:
        return max(int(np.searchsorted(self.times_s, t_s, side="right")) - 1, 0)

    def power_at(self, t_s: float) -> float:
        return float(self.powers_pW[self._index(t_s)])

    def _segments(self, t0_s: float):
        """Yield (start, end, power) from t0 on; the last segment is open-ended."""
        i = self._index(t0_s)
        start = t0_s
        while i + 1 < len(self.times_s):
            end = self.times_s[i + 1]
            if end > start:
                yield start, end, self.powers_pW[i]
                start = end
            i += 1
        yield start, np.inf, self.powers_pW[-1]

    def time_to_harvest(self, energy_pJ: float, t0_s: float, leak_pW: float) -> float:
        if energy_pJ <= 0:
            return 0.0
        remaining = energy_pJ
        for start, end, power in self._segments(t0_s):
            net = power - leak_pW
            if net <= 0:
                if np.isinf(end):
                    raise NeverCharges(
                        f"trace settles at {power} pW, not above leakage {leak_pW} pW"
                    )
                continue
            span = end - start
            if net * span >= remaining:
                return start + remaining / net - t0_s
            remaining -= net * span
        raise NeverCharges("harvest trace never supplies the requested energy")

    def energy_between(self, t0_s: float, t1_s: float, leak_pW: float = 0.0) -> float:
        total = 0.0
        for start, end, power in self._segments(t0_s):
            if start >= t1_s:
                break
            total += max(power - leak_pW, 0.0) * (min(end, t1_s) - start)
        return total


def charge(
    cap: Capacitor, harvest: HarvestModel, until: float | None = None, t0_s: float = 0.0
) -> float:
    """
    Charge `cap` up to `until` volts (v_on by default); return the simulated seconds it took.
    """
    target = cap.v_on if until is None else until
    if not cap.v_off <= target <= cap.v_on:
        raise ValueError(f"target voltage {target} outside [{cap.v_off}, {cap.v_on}]")
    needed = 0.5 * cap.capacitance_uF * (target**2 - cap.v_now**2) * 1e6
    if needed <= 0:
        return 0.0
    elapsed = harvest.time_to_harvest(needed, t0_s, cap.leak_pW)
    cap.v_now = target
    return elapsed


class FailureSchedule:
    """Scripted brown-out instants, consumed in time order."""

    def __init__(self, times_us=()):
        self.times_s = np.sort(np.asarray(list(times_us), dtype=np.float64)) * 1e-6
        self._next = 0

    @classmethod
    def from_file(cls, path: str | Path) -> "FailureSchedule":
        # Same file format as harvest traces; the power column is ignored.
        return cls(_read_pairs(path)[:, 0])

    def reset(self) -> None:
        self._next = 0

    def next_failure(self, t0_s: float, t1_s: float) -> float | None:
        """Consume and return the first pending failure in [t0, t1), if any."""
        while self._next < len(self.times_s) and self.times_s[self._next] < t0_s:
            self._next += 1
        if self._next < len(self.times_s) and self.times_s[self._next] < t1_s:
            t = float(self.times_s[self._next])
            self._next += 1
            return t
        return None
