import time

import numpy as np
from loguru import logger

from edgeoffload.config import Config
from edgeoffload.cost import OffloadObjective
from edgeoffload.data import SolveResult, SolveStats, TaskGraph
from edgeoffload.model import check_assumption


def greedy_local_search(g: TaskGraph) -> SolveResult:
    """Greedy baseline: hill-climb single-task side flips from the all-edge placement.

    Each round applies the flip with the largest strict decrease (ties go to the lowest task
    id) and stops once no flip lowers the cost by more than the strict-decrease tolerance.
    """
    start = time.perf_counter()
    obj = OffloadObjective(g)
    side = obj.base_side.copy()
    free = np.zeros(g.n, dtype=bool)
    free[obj.ground] = True

    moves = 0
    while obj.size:
        deltas = obj.all_marginals(side)
        change = np.where(side, -deltas, deltas)
        change[~free] = np.inf
        v = int(np.argmin(change))
        if change[v] >= -Config.Tolerance.STRICT_DECREASE:
            break
        side[v] = not side[v]
        moves += 1

    subset = frozenset(obj.ground[side[obj.ground]].tolist())
    logger.debug(f"Greedy baseline stopped after {moves} flips with {len(subset)} cloud tasks")
    return SolveResult(
        algorithm="greedy",
        partition=obj.partition_of(subset),
        f_min=obj.f_value(subset),
        total_cost=obj.gamma(subset),
        assumption=check_assumption(g),
        optimal_certified=False,
        stats=SolveStats(
            major_iterations=moves,
            oracle_calls=moves + 1,
            wall_time_ms=(time.perf_counter() - start) * 1000.0,
        ),
    )
