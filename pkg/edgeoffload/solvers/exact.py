"""Ground truth for small instances: exhaustive enumeration and an ILP model export."""

import time
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, Union

import pulp
from loguru import logger

from edgeoffload.config import Config
from edgeoffload.cost import OffloadObjective, prefer
from edgeoffload.data import OracleResult, Pin, SolveResult, SolveStats, TaskGraph
from edgeoffload.errors import GroundSetTooLarge, InstanceIOError
from edgeoffload.model import check_assumption

# auxiliary products per directed edge; l_ee takes the remainder
PRODUCT_COLUMNS = ("ec", "ce", "cc")


def brute_force(g: TaskGraph) -> OracleResult:
    """Minimize F over every subset of the free tasks, walking them in Gray-code order."""
    obj = OffloadObjective(g)
    k = obj.size
    if k > Config.Oracle.MAX_GROUND_SET:
        raise GroundSetTooLarge(
            f"{k} free tasks exceed the enumeration guard of {Config.Oracle.MAX_GROUND_SET}"
        )

    ground = obj.ground_set
    side = obj.base_side.tolist()
    f = 0.0
    best: FrozenSet[int] = frozenset()
    best_f = 0.0
    mask = 0
    for i in range(1, 1 << k):
        bit = (i & -i).bit_length() - 1
        v = ground[bit]
        delta = obj.flip_delta(v, side)
        if side[v]:
            f -= delta
        else:
            f += delta
        side[v] = not side[v]
        mask ^= 1 << bit
        if f <= best_f + Config.Tolerance.REL * max(1.0, abs(best_f)):
            candidate = frozenset(ground[b] for b in range(k) if mask >> b & 1)
            if prefer(f, candidate, best_f, best):
                best, best_f = candidate, f

    # incremental sums drift; report the winner's exact value
    best_f = obj.f_value(best)
    logger.debug(f"Enumerated {1 << k} subsets of {g.name or 'graph'}: F* = {best_f}")
    return OracleResult(
        best_set=best,
        best_f=best_f,
        best_total=obj.gamma(best),
        subsets_evaluated=1 << k,
    )


def solve_brute(g: TaskGraph) -> SolveResult:
    start = time.perf_counter()
    result = brute_force(g)
    obj = OffloadObjective(g)
    return SolveResult(
        algorithm="brute",
        partition=obj.partition_of(result.best_set),
        f_min=result.best_f,
        total_cost=result.best_total,
        assumption=check_assumption(g),
        optimal_certified=True,
        stats=SolveStats(
            oracle_calls=result.subsets_evaluated,
            wall_time_ms=(time.perf_counter() - start) * 1000.0,
        ),
    )


def _bounds(pin: Pin):
    if pin == Pin.EDGE:
        return 0, 0
    if pin == Pin.CLOUD:
        return 1, 1
    return 0, 1


def build_ilp(g: TaskGraph) -> pulp.LpProblem:
    """0/1 program whose objective is the total cost of the placement x (1 = cloud).

    Each directed edge gets three auxiliaries for the ec, ce and cc side products, bounded
    above by their factors and below by their sum minus one; the ee indicator is
    1 minus the other three. Constants sit on the variable ``offset``, fixed to 1.
    """
    obj = OffloadObjective(g)
    problem = pulp.LpProblem("offloading", pulp.LpMinimize)
    offset = pulp.LpVariable("offset", lowBound=1, upBound=1)
    x = {}
    for v, pin in enumerate(g.pins):
        low, up = _bounds(pin)
        x[v] = pulp.LpVariable(f"x_{v}", cat=pulp.LpBinary)
        # binaries come with [0, 1]; pins tighten them afterwards
        x[v].lowBound, x[v].upBound = low, up

    constant = float(obj.edge_cost.sum())
    terms = [(x[v], float(obj.modular[v])) for v in range(g.n)]
    for e in g.edges:
        i, j = e.src, e.dst
        l_ee, l_ec, l_ce, l_cc = e.cost.as_tuple()
        y = {
            col: pulp.LpVariable(f"y_{i}_{j}_{k}", lowBound=0, upBound=1)
            for k, col in enumerate(PRODUCT_COLUMNS, start=1)
        }
        # (1 - x_i) x_j
        problem += y["ec"] <= 1 - x[i], f"ec_src_{i}_{j}"
        problem += y["ec"] <= x[j], f"ec_dst_{i}_{j}"
        problem += y["ec"] >= x[j] - x[i], f"ec_low_{i}_{j}"
        # x_i (1 - x_j)
        problem += y["ce"] <= x[i], f"ce_src_{i}_{j}"
        problem += y["ce"] <= 1 - x[j], f"ce_dst_{i}_{j}"
        problem += y["ce"] >= x[i] - x[j], f"ce_low_{i}_{j}"
        # x_i x_j
        problem += y["cc"] <= x[i], f"cc_src_{i}_{j}"
        problem += y["cc"] <= x[j], f"cc_dst_{i}_{j}"
        problem += y["cc"] >= x[i] + x[j] - 1, f"cc_low_{i}_{j}"

        constant += l_ee
        terms += [(y["ec"], l_ec - l_ee), (y["ce"], l_ce - l_ee), (y["cc"], l_cc - l_ee)]

    problem += pulp.LpAffineExpression(terms + [(offset, constant)]), "total_cost"
    return problem


def objective_at(problem: pulp.LpProblem, g: TaskGraph, cloud: Iterable[int]) -> float:
    """Objective of ``problem`` with x set to the placement ``cloud`` and y to its products."""
    cloud = set(cloud)
    values: Dict[str, float] = {"offset": 1.0}
    for v in range(g.n):
        values[f"x_{v}"] = float(v in cloud)
    for e in g.edges:
        a, b = e.src in cloud, e.dst in cloud
        products = {"ec": (not a) and b, "ce": a and not b, "cc": a and b}
        for k, col in enumerate(PRODUCT_COLUMNS, start=1):
            values[f"y_{e.src}_{e.dst}_{k}"] = float(products[col])
    for var in problem.variables():
        var.varValue = values[var.name]
    return float(pulp.value(problem.objective))


def export_ilp(g: TaskGraph, path: Union[str, Path]) -> Path:
    """Write the model of ``build_ilp`` as a CPLEX LP file."""
    path = Path(path)
    problem = build_ilp(g)
    try:
        problem.writeLP(str(path))
    except OSError as e:
        raise InstanceIOError(f"cannot write {path}: {e}") from e
    logger.debug(f"Wrote ILP with {len(problem.variables())} variables to {path}")
    return path
