from imc_sim.runtime.tasks import OpCounts, Task, TaskPipeline
from imc_sim.runtime.nvm_image import NvmImage
from imc_sim.runtime.harvest import (
    ConstantHarvest,
    FailureSchedule,
    HarvestModel,
    TraceHarvest,
    charge,
)
from imc_sim.runtime.executor import (
    CONTROL_BUFFER,
    DrainMode,
    ExecutionTrace,
    GoldenResult,
    RechargePolicy,
    RuntimeContext,
    TaskStats,
    golden_run,
    run_pipeline,
    task_cost,
)

__all__ = [
    "OpCounts",
    "Task",
    "TaskPipeline",
    "NvmImage",
    "ConstantHarvest",
    "FailureSchedule",
    "HarvestModel",
    "TraceHarvest",
    "charge",
    "CONTROL_BUFFER",
    "DrainMode",
    "ExecutionTrace",
    "GoldenResult",
    "RechargePolicy",
    "RuntimeContext",
    "TaskStats",
    "golden_run",
    "run_pipeline",
    "task_cost",
]
