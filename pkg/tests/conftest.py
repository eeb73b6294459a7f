import os

import pytest

from hapdc.config import ModelConfig, load_config

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SHIPPED_CONFIG = os.path.join(REPO_ROOT, "configs", "default.yaml")


@pytest.fixture(scope="session")
def shipped_cfg():
    """The study configuration shipped with the repository."""
    return load_config(SHIPPED_CONFIG)


@pytest.fixture()
def default_cfg():
    return ModelConfig()
