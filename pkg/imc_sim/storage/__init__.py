from imc_sim.storage.outputs import ArtifactStore

__all__ = ["ArtifactStore"]
