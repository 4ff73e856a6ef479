"""
Committed non-volatile state with two-version commit.
"""
from collections.abc import Mapping

import numpy as np


class NvmImage:
    """
    Two copies of every buffer: the committed version readers see, and a staging
    version that a commit fills completely before the versions swap.

    A failure before `commit` returns leaves the committed version untouched.
    """

    def __init__(self, initial: Mapping[str, np.ndarray] | None = None):
        self._versions: list[dict[str, np.ndarray]] = [{}, {}]
        self._active = 0
        self.commits = 0
        if initial:
            self.preload(initial)

    @property
    def committed(self) -> dict[str, np.ndarray]:
        return self._versions[self._active]

    def preload(self, buffers: Mapping[str, np.ndarray]) -> None:
        """Place buffers in NVM without going through the write path."""
        for name, array in buffers.items():
            self.committed[name] = np.array(array, copy=True)

    def __contains__(self, buffer_id: str) -> bool:
        return buffer_id in self.committed

    def read(self, buffer_id: str) -> np.ndarray:
        data = self.committed[buffer_id].view()
        data.flags.writeable = False
        return data

    def read_or_none(self, buffer_id: str) -> np.ndarray | None:
        return self.read(buffer_id) if buffer_id in self else None

    def commit(self, writes: Mapping[str, np.ndarray]) -> None:
        staging = 1 - self._active
        self._versions[staging] = dict(self.committed)
        for name, array in writes.items():
            self._versions[staging][name] = np.array(array, copy=True)
        self._active = staging
        self.commits += 1

    def snapshot(self) -> dict[str, np.ndarray]:
        return {name: array.copy() for name, array in self.committed.items()}
