"""
Transactional execution of task pipelines across power failures.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from imc_sim.energy.capacitor import CapacitorPlan
from imc_sim.energy.mcu import McuProfile, energy_per_cycle
from imc_sim.energy.model import (
    CostModel,
    CostReport,
    EnergyBreakdown,
    attempt_duration_s,
    total_energy,
)
from imc_sim.errors import NonTerminating
from imc_sim.nvm.injection import InjectionMode, WriteStream, write_buffer
from imc_sim.nvm.quality import QualityLevel
from imc_sim.nvm.segments import CONTROL_BUFFERS, SegmentCatalog
from imc_sim.runtime.harvest import FailureSchedule, HarvestModel, charge
from imc_sim.runtime.nvm_image import NvmImage
from imc_sim.runtime.tasks import OpCounts, TaskPipeline

logger = logging.getLogger(__name__)

CONTROL_BUFFER = CONTROL_BUFFERS[0]


class DrainMode(str, Enum):
    UPFRONT = "upfront"  # whole attempt energy leaves the buffer at attempt start
    CYCLE = "cycle"      # energy leaves at a constant rate; harvest is credited meanwhile


class RechargePolicy(str, Enum):
    ATTEMPT = "attempt"    # charge to v_on before every attempt; only the schedule fails tasks
    BROWNOUT = "brownout"  # charge only once empty; an attempt fails when stored energy runs out


@dataclass
class RuntimeContext:
    """Everything a pipeline run needs besides the tasks and the energy buffers."""
    mcu: McuProfile
    segments: SegmentCatalog
    cost_model: CostModel = field(default_factory=CostModel)
    injection_mode: InjectionMode = InjectionMode.FLIP_NEW
    literal_baseline: bool = False
    drain_mode: DrainMode = DrainMode.UPFRONT
    recharge: RechargePolicy = RechargePolicy.ATTEMPT


@dataclass
class TaskStats:
    attempts: int = 0
    completions: int = 0
    cycles: int = 0
    bits_committed: int = 0
    corrupted_bits: int = 0


@dataclass
class ExecutionTrace:
    tasks: dict[str, TaskStats] = field(default_factory=dict)
    power_failures: int = 0
    recharges: int = 0
    recharge_time_s: float = 0.0
    sim_time_s: float = 0.0
    energy: EnergyBreakdown = field(default_factory=EnergyBreakdown.zero)
    cost: CostReport = field(default_factory=CostReport)  # committed attempts only

    @property
    def attempts(self) -> int:
        return sum(s.attempts for s in self.tasks.values())

    @property
    def completions(self) -> int:
        return sum(s.completions for s in self.tasks.values())

    @property
    def corrupted_bits(self) -> int:
        return sum(s.corrupted_bits for s in self.tasks.values())


def task_cost(
    task_ops: OpCounts,
    outputs: dict[str, np.ndarray],
    mcu: McuProfile,
    model: CostModel,
    workload: str,
    quality_of: dict[str, QualityLevel],
) -> tuple[CostReport, EnergyBreakdown]:
    """
    Cost and energy of one attempt of a task.

    Each output buffer is persisted at the quality level of its segment.
    """
    cost = CostReport(cycles=model.cycles(task_ops, mcu, workload))
    energy = EnergyBreakdown(e_mcu_compute_pJ=energy_per_cycle(mcu) * cost.cycles)
    for name, array in outputs.items():
        accesses = model.accesses(array.nbytes * 8, mcu)
        persisted = CostReport(mem_accesses=accesses, bits_written=accesses * mcu.access_width_bits)
        cost = cost + persisted
        energy = energy + total_energy(persisted, mcu, quality_of[name])
    return cost, energy


@dataclass
class GoldenResult:
    buffers: dict[str, np.ndarray]
    cost: CostReport
    task_costs: dict[str, CostReport]
    task_energy_q0: dict[str, EnergyBreakdown]

    def worst_case_energy_pJ(self) -> dict[str, float]:
        return {task_id: e.e_total_pJ for task_id, e in self.task_energy_q0.items()}


def golden_run(
    pipeline: TaskPipeline,
    mcu: McuProfile,
    q0: QualityLevel,
    cost_model: CostModel | None = None,
) -> GoldenResult:
    """
    Run the pipeline with unlimited energy and error-free Q0 persistence.

    The per-task Q0 energies are the worst case used for capacitor sizing.
    """
    cost_model = cost_model or CostModel()
    image = NvmImage(pipeline.initial_buffers)
    total = CostReport()
    task_costs, task_energy = {}, {}
    for task in pipeline.tasks:
        inputs = {b: image.read(b) for b in task.input_buffer_ids}
        outputs, ops = task.run(inputs)
        quality_of = {name: q0 for name in outputs}
        cost, energy = task_cost(ops, outputs, mcu, cost_model, pipeline.workload, quality_of)
        image.commit(outputs)
        task_costs[task.id] = cost
        task_energy[task.id] = energy
        total = total + cost
    return GoldenResult(image.snapshot(), total, task_costs, task_energy)


def run_pipeline(
    pipeline: TaskPipeline,
    caps: CapacitorPlan,
    harvest: HarvestModel,
    ctx: RuntimeContext,
    stream: WriteStream,
    schedule: FailureSchedule | None = None,
) -> tuple[dict[str, np.ndarray], ExecutionTrace]:
    """
    Execute tasks in order under intermittent power.

    Under RechargePolicy.ATTEMPT the task's capacitor charges to v_on before every
    attempt, so failures come only from `schedule`. Under RechargePolicy.BROWNOUT
    it charges only once empty, and an attempt whose energy exceeds the stored
    charge fails when the charge runs out. A failure discards the attempt's
    volatile state; the task then re-runs from the committed NVM image, which
    already holds any errors committed upstream.
    Outputs are written through their segments only when an attempt completes.

    Returns:
        (final committed buffers, execution trace)
    """
    image = NvmImage(pipeline.initial_buffers)
    trace = ExecutionTrace()
    if schedule is not None:
        schedule.reset()
    mcu = ctx.mcu
    drain_mode = DrainMode(ctx.drain_mode)
    recharge = RechargePolicy(ctx.recharge)
    t = 0.0

    for index, task in enumerate(pipeline.tasks):
        cap = caps.for_task(task.id) if task.id in caps.assignment else caps[task.capacitor_assignment]
        stats = trace.tasks.setdefault(task.id, TaskStats())

        inputs = {b: image.read(b) for b in task.input_buffer_ids}
        outputs, ops = task.run(inputs)
        segments = {name: ctx.segments.lookup(name) for name in outputs}
        quality_of = {name: seg.quality for name, seg in segments.items()}
        cost, energy = task_cost(
            ops, outputs, mcu, ctx.cost_model, pipeline.workload, quality_of
        )

        if not cap.covers(energy.e_total_pJ):
            raise NonTerminating(
                f"task '{task.id}' needs {energy.e_total_pJ:.1f} pJ per attempt, "
                f"capacitor holds {cap.usable_energy_pJ:.1f} pJ usable"
            )
        duration = attempt_duration_s(cost, mcu)

        while True:
            if recharge is RechargePolicy.ATTEMPT or cap.stored_energy_pJ <= 0:
                elapsed = charge(cap, harvest, t0_s=t)
                if elapsed > 0:
                    trace.recharges += 1
                    trace.recharge_time_s += elapsed
                    t += elapsed

            stats.attempts += 1
            failure_at = schedule.next_failure(t, t + duration) if schedule is not None else None
            depleted = recharge is RechargePolicy.BROWNOUT and not cap.holds(energy.e_total_pJ)
            if depleted:
                # in-attempt harvest is not credited towards finishing
                empty_at = t + duration * cap.stored_energy_pJ / energy.e_total_pJ
                if failure_at is None or empty_at < failure_at:
                    failure_at = empty_at
                else:
                    depleted = False
            if failure_at is None:
                break

            if drain_mode is DrainMode.CYCLE or depleted:
                fraction = (failure_at - t) / duration if duration > 0 else 0.0
                trace.energy = trace.energy + energy.scaled(fraction)
            else:
                trace.energy = trace.energy + energy
            cap.brown_out()
            trace.power_failures += 1
            t = failure_at
            logger.debug("power failure in task %s at t=%.6fs", task.id, t)

        # Completed attempt: drain, then commit atomically.
        trace.energy = trace.energy + energy
        cap.drain(energy.e_total_pJ)
        if drain_mode is DrainMode.CYCLE:
            cap.add_energy(harvest.energy_between(t, t + duration, cap.leak_pW))
        t += duration

        writes = {}
        for name, array in outputs.items():
            stored, corrupted = write_buffer(
                array,
                image.read_or_none(name),
                segments[name],
                ctx.injection_mode,
                stream,
                literal_baseline=ctx.literal_baseline,
            )
            writes[name] = stored
            stats.corrupted_bits += corrupted
        control, _ = write_buffer(
            np.array([index + 1], dtype=np.uint32),
            image.read_or_none(CONTROL_BUFFER),
            ctx.segments.lookup(CONTROL_BUFFER),
            ctx.injection_mode,
            stream,
        )
        writes[CONTROL_BUFFER] = control
        image.commit(writes)

        stats.completions += 1
        stats.cycles += cost.cycles
        stats.bits_committed += cost.bits_written
        trace.cost = trace.cost + cost

    trace.sim_time_s = t
    committed = image.snapshot()
    committed.pop(CONTROL_BUFFER, None)
    return committed, trace
