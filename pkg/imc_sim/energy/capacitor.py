"""
Energy buffers and their sizing.

Capacitance is in µF, voltage in V, energy in pJ, power in pW (so pJ / pW = s).
"""
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from imc_sim.errors import InvalidVoltages, NeverCharges

CAPACITOR_SIZES = ("small", "medium", "large")

# Rounding slack when comparing a sized capacitor against the energy it was sized for.
_SIZING_RTOL = 1e-12


def _check_voltages(v_on: float, v_off: float) -> None:
    if not (v_on > v_off > 0):
        raise InvalidVoltages(f"need v_on > v_off > 0, got v_on={v_on}, v_off={v_off}")


def _energy_pJ(capacitance_uF: float, volts_sq: float) -> float:
    # 0.5 * C[F] * V^2 [J] -> pJ
    return 0.5 * capacitance_uF * volts_sq * 1e6


@dataclass
class Capacitor:
    capacitance_uF: float
    v_on: float
    v_off: float
    v_now: float | None = None
    leak_pW: float = 0.0

    def __post_init__(self):
        _check_voltages(self.v_on, self.v_off)
        if self.capacitance_uF < 0 or self.leak_pW < 0:
            raise ValueError("capacitance and leakage must be >= 0")
        if self.v_now is None:
            self.v_now = self.v_off
        if not self.v_off <= self.v_now <= self.v_on:
            raise InvalidVoltages(f"v_now={self.v_now} outside [{self.v_off}, {self.v_on}]")

    @property
    def usable_energy_pJ(self) -> float:
        return _energy_pJ(self.capacitance_uF, self.v_on**2 - self.v_off**2)

    @property
    def stored_energy_pJ(self) -> float:
        """Energy available above v_off."""
        return _energy_pJ(self.capacitance_uF, self.v_now**2 - self.v_off**2)

    def covers(self, energy_pJ: float) -> bool:
        return self.usable_energy_pJ >= energy_pJ * (1.0 - _SIZING_RTOL)

    def holds(self, energy_pJ: float) -> bool:
        """Whether the charge stored right now covers `energy_pJ`."""
        return self.stored_energy_pJ >= energy_pJ * (1.0 - _SIZING_RTOL)

    def _set_stored(self, energy_pJ: float) -> None:
        if self.capacitance_uF == 0:
            self.v_now = self.v_off
            return
        energy_pJ = min(max(energy_pJ, 0.0), self.usable_energy_pJ)
        self.v_now = float(np.sqrt(self.v_off**2 + 2.0 * energy_pJ / (self.capacitance_uF * 1e6)))
        self.v_now = min(max(self.v_now, self.v_off), self.v_on)

    def drain(self, energy_pJ: float) -> bool:
        """Remove energy; returns False (and empties the buffer) on brown-out."""
        stored = self.stored_energy_pJ
        if energy_pJ > stored * (1.0 + _SIZING_RTOL):
            self.v_now = self.v_off
            return False
        self._set_stored(stored - energy_pJ)
        return True

    def add_energy(self, energy_pJ: float) -> None:
        """Store harvested energy, saturating at v_on."""
        self._set_stored(self.stored_energy_pJ + energy_pJ)

    def brown_out(self) -> None:
        self.v_now = self.v_off

    def fill(self) -> None:
        self.v_now = self.v_on


def size_capacitor(
    worst_case_energy_pJ: float, v_on: float, v_off: float, margin: float = 1.0
) -> float:
    """
    Smallest capacitance (µF) whose usable energy covers `worst_case_energy_pJ`, times `margin`.
    """
    _check_voltages(v_on, v_off)
    if margin < 1.0:
        raise ValueError(f"margin must be >= 1, got {margin}")
    if worst_case_energy_pJ < 0:
        raise ValueError(f"energy must be >= 0, got {worst_case_energy_pJ}")
    farads = margin * 2.0 * worst_case_energy_pJ * 1e-12 / (v_on**2 - v_off**2)
    return farads * 1e6


@dataclass
class CapacitorPlan:
    capacitors: dict[str, Capacitor]
    assignment: dict[str, str] = field(default_factory=dict)  # task id -> size name

    def __getitem__(self, size: str) -> Capacitor:
        return self.capacitors[size]

    def for_task(self, task_id: str) -> Capacitor:
        return self.capacitors[self.assignment[task_id]]

    def capacitances_uF(self) -> dict[str, float]:
        return {size: cap.capacitance_uF for size, cap in self.capacitors.items()}


def capacitor_sizing_plan(
    per_task_worst_energy: Mapping[str, float],
    v_on: float,
    v_off: float,
    margin: float = 1.0,
    leak_pW_per_uF: float = 0.0,
) -> CapacitorPlan:
    """
    Size small/medium/large buffers from per-task worst-case energies (pJ).

    Large covers the hungriest task, small the lightest, medium the median task.
    Each task gets the smallest buffer that covers it. Only the small buffer is
    leak-free.
    """
    if not per_task_worst_energy:
        raise ValueError("per_task_worst_energy is empty")
    energies = np.array(list(per_task_worst_energy.values()), dtype=np.float64)
    targets = {
        "small": float(energies.min()),
        "medium": float(np.median(energies)),
        "large": float(energies.max()),
    }
    capacitors = {}
    for size in CAPACITOR_SIZES:
        capacitance = size_capacitor(targets[size], v_on, v_off, margin)
        leak = 0.0 if size == "small" else leak_pW_per_uF * capacitance
        capacitors[size] = Capacitor(capacitance, v_on, v_off, leak_pW=leak)

    assignment = {}
    for task_id, energy in per_task_worst_energy.items():
        size = next(s for s in CAPACITOR_SIZES if capacitors[s].covers(energy))
        assignment[task_id] = size
    return CapacitorPlan(capacitors, assignment)


def recharge_time_s(cap: Capacitor, power_pW: float) -> float:
    """Time to refill `cap` from v_off to v_on at constant harvested power."""
    net = power_pW - cap.leak_pW
    if not net > 0:
        raise NeverCharges(f"harvest {power_pW} pW does not exceed leakage {cap.leak_pW} pW")
    return cap.usable_energy_pJ / net
