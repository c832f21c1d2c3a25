import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from loguru import logger

from edgeoffload.config import Config
from edgeoffload.data import (
    AssumptionReport,
    AssumptionViolation,
    EdgeCost,
    NodeCost,
    Partition,
    Pin,
    TaskEdge,
    TaskGraph,
)
from edgeoffload.errors import IndexOutOfRange, InvalidGraphError, PinConflict, PinViolation

NodeLike = Union[NodeCost, Sequence[float]]
EdgeLike = Tuple[int, int, Union[EdgeCost, Sequence[float]]]

WEAK_INEQUALITIES = ("l_cc<=l_ec", "l_cc<=l_ce")
STRONG_INEQUALITIES = ("l_ee<=l_ec", "l_ee<=l_ce")


def _as_node(node: NodeLike) -> NodeCost:
    if isinstance(node, NodeCost):
        return node
    values = [float(x) for x in node]
    if len(values) == 2:
        values.append(0.0)
    w_edge, w_cloud, transfer = values
    return NodeCost(w_edge=w_edge, w_cloud=w_cloud, transfer=transfer)


def _resolve_pin(v: int, node: NodeCost, pin: Pin) -> Pin:
    if math.isinf(node.w_cloud):
        if pin == Pin.CLOUD:
            raise PinConflict(f"node {v} is pinned to the cloud but its cloud cost is infinite")
        return Pin.EDGE
    if math.isinf(node.w_edge):
        if pin == Pin.EDGE:
            raise PinConflict(f"node {v} is pinned to the edge but its edge cost is infinite")
        return Pin.CLOUD
    return pin


def build_graph(
    nodes: Sequence[NodeLike],
    edges: Iterable[EdgeLike] = (),
    pins: Optional[Sequence[Union[Pin, str]]] = None,
    name: str = "",
    latency_set: Iterable[int] = (),
) -> TaskGraph:
    """Normalize raw costs into a TaskGraph.

    Self-loops are dropped, parallel edges are merged by componentwise sum, infinite
    computation costs become pins and every task of ``latency_set`` is pinned to the edge.
    """
    node_costs = [_as_node(node) for node in nodes]
    n = len(node_costs)
    if pins is None:
        pin_labels = [Pin.FREE] * n
    else:
        if len(pins) != n:
            raise InvalidGraphError(f"{len(pins)} pin labels for {n} nodes")
        pin_labels = [Pin(p) for p in pins]

    for v in latency_set:
        if not 0 <= v < n:
            raise IndexOutOfRange(f"latency task {v} out of range for {n} nodes")
        if pin_labels[v] == Pin.CLOUD:
            raise PinConflict(f"latency task {v} is pinned to the cloud")
        pin_labels[v] = Pin.EDGE

    pin_labels = [
        _resolve_pin(v, node, pin) for v, (node, pin) in enumerate(zip(node_costs, pin_labels))
    ]

    merged: Dict[Tuple[int, int], EdgeCost] = {}
    dropped_loops = 0
    for src, dst, cost in edges:
        src, dst = int(src), int(dst)
        if not (0 <= src < n and 0 <= dst < n):
            raise IndexOutOfRange(f"edge ({src}, {dst}) out of range for {n} nodes")
        cost = EdgeCost.of(cost)
        if src == dst:
            dropped_loops += 1
            continue
        key = (src, dst)
        merged[key] = merged[key].merged(cost) if key in merged else cost

    if dropped_loops:
        logger.debug(f"Dropped {dropped_loops} self-loops from {name or 'graph'}")

    return TaskGraph(
        name=name,
        nodes=tuple(node_costs),
        edges=tuple(TaskEdge(src=s, dst=d, cost=c) for (s, d), c in merged.items()),
        pins=tuple(pin_labels),
    )


def check_assumption(g: TaskGraph) -> AssumptionReport:
    violations: List[AssumptionViolation] = []
    weak_ok = True
    for idx, edge in enumerate(g.edges):
        c = edge.cost
        checks = (
            ("l_cc<=l_ec", c.l_cc <= c.l_ec),
            ("l_cc<=l_ce", c.l_cc <= c.l_ce),
            ("l_ee<=l_ec", c.l_ee <= c.l_ec),
            ("l_ee<=l_ce", c.l_ee <= c.l_ce),
        )
        for inequality, ok in checks:
            if not ok:
                violations.append(AssumptionViolation(edge=idx, inequality=inequality))
                if inequality in WEAK_INEQUALITIES:
                    weak_ok = False

    return AssumptionReport(
        holds_weak=weak_ok,
        holds_strong=not violations,
        symmetric=is_symmetric(g),
        violations=violations,
    )


def is_symmetric(g: TaskGraph) -> bool:
    return all(
        approx_equal(e.cost.l_ee, e.cost.l_cc) and approx_equal(e.cost.l_ec, e.cost.l_ce)
        for e in g.edges
    )


def approx_equal(a: float, b: float, abs_tol: float = Config.Tolerance.REL) -> bool:
    return math.isclose(a, b, rel_tol=Config.Tolerance.REL, abs_tol=abs_tol)


def validate_partition(g: TaskGraph, p: Partition):
    for v in p.cloud_set:
        if not 0 <= v < g.n:
            raise IndexOutOfRange(f"cloud task {v} out of range for {g.n} nodes")
        if g.pins[v] == Pin.EDGE:
            raise PinViolation(f"task {v} is pinned to the edge but placed in the cloud")
    missing = [v for v in g.nodes_with(Pin.CLOUD) if v not in p.cloud_set]
    if missing:
        raise PinViolation(f"cloud-pinned tasks {missing} placed on the edge")


def scale_costs(g: TaskGraph, factor: float) -> TaskGraph:
    """Multiply every computation, transfer and communication cost by ``factor``."""
    if factor <= 0:
        raise InvalidGraphError("scale factor must be positive")
    nodes = [
        NodeCost(w_edge=factor * c.w_edge, w_cloud=factor * c.w_cloud, transfer=factor * c.transfer)
        for c in g.nodes
    ]
    edges = [(e.src, e.dst, e.cost.scaled(factor)) for e in g.edges]
    return build_graph(nodes, edges, pins=g.pins, name=g.name)
