import os
import random
import sys
from typing import Dict, Optional, Tuple

import numpy as np
from loguru import logger

from edgeoffload.errors import InvalidConfig

Ratio = Tuple[float, float, float, float]


class Config:
    SEED = 42
    LOG_FILE_ENV = "OFFLOAD_LOG_FILE"
    LOG_LEVEL_ENV = "OFFLOAD_LOG_LEVEL"

    class Tolerance:
        ABS = 1e-6
        REL = 1e-9
        DIMINISHING = 1e-9
        STRICT_DECREASE = 1e-9

    class Solver:
        EPS = 1e-10
        MAX_MAJOR_FACTOR = 10  # major cycles <= factor * n^2
        PIVOT_RTOL = 1e-12
        DROP_TOL = 1e-12

    class Oracle:
        MAX_GROUND_SET = 24

    class Reduction:
        MAX_NODES = 16
        MAX_EDGES = 24
        DECISION_SLACK = 1e-9

    class Generator:
        COMP_RANGE = (1.0, 100.0)
        COMM_RANGE = (1.0, 50.0)

    class Ratios:
        SATISFYING: Dict[str, Ratio] = {
            "3:5:4:2": (3.0, 5.0, 4.0, 2.0),
            "3:4:5:2": (3.0, 4.0, 5.0, 2.0),
            "2:4:5:3": (2.0, 4.0, 5.0, 3.0),
        }
        # l_cc is below both cross costs but l_ee is not
        WEAK_ONLY: Dict[str, Ratio] = {
            "8:6:7:5": (8.0, 6.0, 7.0, 5.0),
        }
        VIOLATING: Dict[str, Ratio] = {
            "8:5:6:7": (8.0, 5.0, 6.0, 7.0),
            "7:6:5:8": (7.0, 6.0, 5.0, 8.0),
        }

    class Bench:
        THREADS_ENV = "OFFLOAD_THREADS"
        CSV_HEADER = (
            "instance",
            "n",
            "m",
            "algorithm",
            "total_cost",
            "f_min",
            "wall_time_ms",
            "assumption_strong",
            "certified",
            "seed",
            "status",
        )
        ALGORITHMS = ("sma", "greedy", "mincut", "brute", "ilp-export")


def parse_ratio(text: str) -> Ratio:
    parts = text.split(":")
    if len(parts) != 4:
        raise ValueError(f"ratio must have four components, got {text!r}")
    return tuple(float(p) for p in parts)  # type: ignore[return-value]


def bench_threads(default: Optional[int] = None) -> int:
    value = os.getenv(Config.Bench.THREADS_ENV)
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            raise InvalidConfig(
                f"{Config.Bench.THREADS_ENV} must be an integer, got {value!r}"
            ) from None
    return default or min(4, os.cpu_count() or 1)


def seed_everything(seed: int = Config.SEED):
    random.seed(seed)
    np.random.seed(seed % 2**32)


def configure_logging(sink=sys.stderr):
    config = {
        "handlers": [
            {
                "sink": sink,
                "colorize": True,
                "level": os.getenv(Config.LOG_LEVEL_ENV, "INFO"),
                "format": "<green>{time:YYYY-MM-DD - HH:mm:ss}</green> | <level>{level}</level> | {message}",
            },
        ]
    }
    logger.configure(**config)
    log_file = os.getenv(Config.LOG_FILE_ENV)
    if log_file:
        logger.add(log_file)
