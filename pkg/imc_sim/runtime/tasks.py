from collections.abc import Callable, Mapping
from dataclasses import dataclass, field

import numpy as np

# Operation name -> count, converted to cycles by a CostModel.
OpCounts = dict[str, int]
TaskCompute = Callable[[Mapping[str, np.ndarray]], tuple[dict[str, np.ndarray], OpCounts]]


@dataclass
class Task:
    """
    A transactional unit of work.

    `compute` maps committed input buffers to output buffers plus the abstract
    operation counts of the run. It must be pure: re-running it on the same
    committed inputs gives the same outputs and counts.
    """
    id: str
    compute: TaskCompute
    input_buffer_ids: tuple[str, ...]
    output_buffer_ids: tuple[str, ...]
    capacitor_assignment: str = "large"

    def run(self, inputs: Mapping[str, np.ndarray]) -> tuple[dict[str, np.ndarray], OpCounts]:
        outputs, ops = self.compute(inputs)
        missing = set(self.output_buffer_ids) - set(outputs)
        if missing:
            raise KeyError(f"task '{self.id}' did not produce {sorted(missing)}")
        return {name: outputs[name] for name in self.output_buffer_ids}, dict(ops)


@dataclass
class TaskPipeline:
    """Ordered tasks plus the buffers preloaded into NVM before the first task."""
    tasks: list[Task]
    initial_buffers: dict[str, np.ndarray] = field(default_factory=dict)
    workload: str = "micro"

    @property
    def task_ids(self) -> list[str]:
        return [t.id for t in self.tasks]

    def output_buffer_ids(self) -> list[str]:
        return [b for t in self.tasks for b in t.output_buffer_ids]
