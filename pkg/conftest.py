from pathlib import Path

import numpy as np
import pytest
from loguru import logger

from edgeoffload.config import Config
from edgeoffload.data import GenConfig, TaskGraph
from edgeoffload.datagen import generate, load_instance
from edgeoffload.model import build_graph

DATA_DIR = Path(__file__).parent / "data"

SATISFYING = list(Config.Ratios.SATISFYING.values())


@pytest.fixture(autouse=True)
def quiet_logging():
    logger.remove()
    yield


@pytest.fixture
def two_node() -> TaskGraph:
    return build_graph([(2, 1), (3, 2)], [(0, 1, (1, 4, 5, 0))], name="two-node")


@pytest.fixture
def homogeneous_two_node() -> TaskGraph:
    return load_instance(DATA_DIR / "homogeneous.json")


def random_instance(seed: int, max_nodes: int = 12, **overrides) -> TaskGraph:
    """Assumption-satisfying instance; even seeds use a ratio preset, odd ones enforcement."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, max_nodes + 1))
    m = int(rng.integers(0, min(n * (n - 1), 3 * n) + 1))
    ratio = SATISFYING[seed // 2 % len(SATISFYING)] if seed % 2 == 0 else None
    cfg = GenConfig(n=n, m=m, ratio=ratio, seed=seed)
    return generate(cfg.model_copy(update=overrides))
