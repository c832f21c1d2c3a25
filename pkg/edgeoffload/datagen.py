"""Random instance generation, SNAP edge-list ingestion and the JSON instance format."""

import json
import math
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel, ValidationError

from edgeoffload.data import EdgeCost, GenConfig, NodeCost, Pin, TaskGraph
from edgeoffload.errors import InstanceIOError, ParseError, SchemaError, TooManyEdges
from edgeoffload.model import build_graph

PathLike = Union[str, Path]
Cost = Union[float, Literal["inf"]]


class InstanceNode(BaseModel):
    id: int
    w_edge: Cost
    w_cloud: Cost
    transfer: float = 0.0
    pin: Pin = Pin.FREE


class InstanceEdge(BaseModel):
    src: int
    dst: int
    l: Tuple[float, float, float, float]


class InstanceFile(BaseModel):
    name: str = ""
    nodes: List[InstanceNode]
    edges: List[InstanceEdge]
    metadata: Optional[Dict[str, Any]] = None


def _rounded(values: np.ndarray, cfg: GenConfig) -> np.ndarray:
    return np.rint(values) if cfg.integral else values


def _node_costs(rng: np.random.Generator, cfg: GenConfig, n: int) -> List[NodeCost]:
    w_edge = _rounded(rng.uniform(*cfg.comp_range, size=n), cfg)
    w_cloud = _rounded(rng.uniform(*cfg.comp_range, size=n), cfg)
    transfer = _rounded(rng.uniform(*cfg.transfer_range, size=n), cfg)
    return [
        NodeCost(w_edge=float(a), w_cloud=float(b), transfer=float(t))
        for a, b, t in zip(w_edge, w_cloud, transfer)
    ]


def _edge_costs(rng: np.random.Generator, cfg: GenConfig, m: int) -> np.ndarray:
    """(m, 4) array of (l_ee, l_ec, l_ce, l_cc) rows."""
    lo, hi = cfg.comm_range
    if cfg.ratio is not None:
        base = rng.uniform(lo, hi, size=m)
        costs = base[:, None] * np.asarray(cfg.ratio)[None, :]
    elif cfg.enforce_assumption:
        l_ec = rng.uniform(lo, hi, size=m)
        l_ce = rng.uniform(lo, hi, size=m)
        cap = np.minimum(l_ec, l_ce)
        l_ee = rng.uniform(0.0, 1.0, size=m) * cap
        l_cc = rng.uniform(0.0, 1.0, size=m) * cap
        costs = np.column_stack([l_ee, l_ec, l_ce, l_cc])
    else:
        costs = rng.uniform(lo, hi, size=(m, 4))
    # rounding is monotone, so the ordering between the four entries survives it
    return _rounded(costs.reshape(m, 4) * cfg.comm_scale, cfg)


def _pins(rng: np.random.Generator, cfg: GenConfig, n: int) -> List[Pin]:
    pins = [Pin.FREE] * n
    count = math.floor(cfg.pin_fraction * n)
    for v in rng.choice(n, size=count, replace=False):
        pins[int(v)] = Pin.EDGE
    return pins


def _synthesize(
    cfg: GenConfig, n: int, pairs: Sequence[Tuple[int, int]], name: str
) -> TaskGraph:
    rng = np.random.default_rng(cfg.seed)
    nodes = _node_costs(rng, cfg, n)
    costs = _edge_costs(rng, cfg, len(pairs))
    pins = _pins(rng, cfg, n)
    edges = [(src, dst, costs[idx].tolist()) for idx, (src, dst) in enumerate(pairs)]
    return build_graph(nodes, edges, pins=pins, name=name)


def generate(cfg: GenConfig) -> TaskGraph:
    """Seeded random instance: uniform node costs and ``m`` distinct ordered task pairs."""
    n, m = cfg.n, cfg.m
    if m > n * (n - 1):
        raise TooManyEdges(f"{m} edges requested but only {n * (n - 1)} ordered pairs exist")
    # pairs come from their own stream; cost draws follow the same order as load_snap
    pair_rng = np.random.default_rng([cfg.seed, 1])
    picked = np.sort(pair_rng.choice(n * (n - 1), size=m, replace=False)) if m else []
    pairs = []
    for idx in picked:
        src, rest = divmod(int(idx), n - 1)
        pairs.append((src, rest + (rest >= src)))
    name = f"gen-n{n}-m{m}-s{cfg.seed}"
    g = _synthesize(cfg, n, pairs, name)
    logger.debug(f"Generated {name} ({'ratio' if cfg.ratio else 'uniform'} costs)")
    return g


def parse_edge_list(path: PathLike) -> List[Tuple[int, int]]:
    """Whitespace ``u v`` pairs; blank lines and lines starting with '#' are skipped."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InstanceIOError(f"cannot read {path}: {e}") from e

    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) < 2:
            raise ParseError(lineno, f"expected two node ids, got {line!r}")
        try:
            pairs.append((int(fields[0]), int(fields[1])))
        except ValueError:
            raise ParseError(lineno, f"node ids must be integers, got {line!r}") from None
    return pairs


def load_snap(path: PathLike, take_nodes: int, cfg: GenConfig) -> TaskGraph:
    """Induced subgraph on the first ``take_nodes`` distinct ids of a SNAP edge list.

    Each line becomes one directed edge first -> second; duplicate lines are merged by
    summing their synthesized costs.
    """
    pairs = parse_edge_list(path)
    index: Dict[int, int] = {}
    for u, v in pairs:
        for node in (u, v):
            if node not in index and len(index) < take_nodes:
                index[node] = len(index)
        if len(index) >= take_nodes:
            break

    kept = [(index[u], index[v]) for u, v in pairs if u in index and v in index]
    logger.info(f"Loaded {len(index)} nodes and {len(kept)} edge lines from {path}")
    return _synthesize(cfg, len(index), kept, Path(path).stem)


def _dump_cost(value: float) -> Union[float, str]:
    return "inf" if math.isinf(value) else value


def _load_cost(value: Cost) -> float:
    return math.inf if value == "inf" else float(value)


def save_instance(g: TaskGraph, path: PathLike, metadata: Optional[Dict[str, Any]] = None):
    document: Dict[str, Any] = {
        "name": g.name,
        "nodes": [
            {
                "id": v,
                "w_edge": _dump_cost(c.w_edge),
                "w_cloud": _dump_cost(c.w_cloud),
                "transfer": c.transfer,
                "pin": pin.value,
            }
            for v, (c, pin) in enumerate(zip(g.nodes, g.pins))
        ],
        "edges": [{"src": e.src, "dst": e.dst, "l": list(e.cost.as_tuple())} for e in g.edges],
    }
    if metadata:
        document["metadata"] = metadata
    try:
        Path(path).write_text(json.dumps(document, indent=2) + "\n")
    except OSError as e:
        raise InstanceIOError(f"cannot write {path}: {e}") from e


def schema_error(e: ValidationError) -> SchemaError:
    """JSON pointer and message of the first validation failure."""
    error = e.errors()[0]
    pointer = "/" + "/".join(str(part) for part in error["loc"])
    return SchemaError(pointer, error["msg"])


def _read_document(path: PathLike) -> InstanceFile:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InstanceIOError(f"cannot read {path}: {e}") from e
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.lineno, e.msg) from e
    try:
        return InstanceFile.model_validate(raw)
    except ValidationError as e:
        raise schema_error(e) from None


def load_instance(path: PathLike) -> TaskGraph:
    document = _read_document(path)
    for position, node in enumerate(document.nodes):
        if node.id != position:
            raise SchemaError(f"/nodes/{position}/id", f"expected id {position}, got {node.id}")
    nodes = [
        NodeCost(
            w_edge=_load_cost(node.w_edge),
            w_cloud=_load_cost(node.w_cloud),
            transfer=node.transfer,
        )
        for node in document.nodes
    ]
    edges = [(e.src, e.dst, EdgeCost.of(e.l)) for e in document.edges]
    pins = [node.pin for node in document.nodes]
    return build_graph(nodes, edges, pins=pins, name=document.name)


def load_metadata(path: PathLike) -> Dict[str, Any]:
    return _read_document(path).metadata or {}
