import sys
from pathlib import Path

import pytest

# Add project root to path for imports
# tests live under imc_sim/, so go up two levels
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

from imc_sim.config import load_config  # noqa: E402
from imc_sim.config.loader import SEED_ENV  # noqa: E402


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: multi-cell Monte Carlo checks (deselect with -m 'not slow')")


@pytest.fixture(autouse=True)
def _no_seed_env(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)


@pytest.fixture
def sim_config(tmp_path):
    """Default config writing its outputs to a temporary directory."""
    cfg = load_config()
    cfg.campaign.out = str(tmp_path / "results")
    return cfg


def with_campaign(cfg, **values):
    """Copy of `cfg` with campaign fields replaced."""
    campaign = cfg.campaign.model_copy(update=values, deep=True)
    return cfg.model_copy(update={"campaign": campaign}, deep=True)
