import math
from enum import Enum
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_serializer, model_validator

from edgeoffload.config import Config
from edgeoffload.errors import (
    BothComputationCostsInfinite,
    IndexOutOfRange,
    InvalidConfig,
    InvalidCutInstance,
    InvalidGraphError,
    NegativeCost,
    PinConflict,
)

INF = math.inf


class Pin(str, Enum):
    FREE = "free"
    EDGE = "edge"
    CLOUD = "cloud"


def _check_cost(value: float, label: str, allow_inf: bool = False):
    if math.isnan(value):
        raise InvalidGraphError(f"{label} is NaN")
    if value < 0:
        raise NegativeCost(f"{label} = {value} is negative")
    if math.isinf(value) and not allow_inf:
        raise InvalidGraphError(f"{label} must be finite")


class NodeCost(BaseModel):
    model_config = ConfigDict(frozen=True)

    w_edge: float = Field(..., description="Computation cost on the edge server (or INF)")
    w_cloud: float = Field(..., description="Computation cost in the cloud (or INF)")
    transfer: float = Field(0.0, description="Transfer cost charged on edge-side execution")

    @model_validator(mode="after")
    def check_invariants(self):
        _check_cost(self.w_edge, "w_edge", allow_inf=True)
        _check_cost(self.w_cloud, "w_cloud", allow_inf=True)
        _check_cost(self.transfer, "transfer")
        if math.isinf(self.w_edge) and math.isinf(self.w_cloud):
            raise BothComputationCostsInfinite("w_edge and w_cloud are both infinite")
        return self

    @property
    def edge_side_cost(self) -> float:
        return self.w_edge + self.transfer


class EdgeCost(BaseModel):
    """Communication cost by (source side, target side)."""

    model_config = ConfigDict(frozen=True)

    l_ee: float
    l_ec: float
    l_ce: float
    l_cc: float

    @model_validator(mode="after")
    def check_invariants(self):
        for label, value in zip(("l_ee", "l_ec", "l_ce", "l_cc"), self.as_tuple()):
            _check_cost(value, label)
        return self

    @classmethod
    def of(cls, values: Sequence[float]) -> "EdgeCost":
        if isinstance(values, EdgeCost):
            return values
        l_ee, l_ec, l_ce, l_cc = (float(v) for v in values)
        return cls(l_ee=l_ee, l_ec=l_ec, l_ce=l_ce, l_cc=l_cc)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.l_ee, self.l_ec, self.l_ce, self.l_cc)

    def merged(self, other: "EdgeCost") -> "EdgeCost":
        return EdgeCost.of([a + b for a, b in zip(self.as_tuple(), other.as_tuple())])

    def scaled(self, factor: float) -> "EdgeCost":
        return EdgeCost.of([factor * v for v in self.as_tuple()])


class TaskEdge(BaseModel):
    model_config = ConfigDict(frozen=True)

    src: int
    dst: int
    cost: EdgeCost


class TaskGraph(BaseModel):
    """Normalized offloading instance; build it with ``model.build_graph``."""

    model_config = ConfigDict(frozen=True)

    name: str = ""
    nodes: Tuple[NodeCost, ...]
    edges: Tuple[TaskEdge, ...] = ()
    pins: Tuple[Pin, ...]

    _out_edges: Tuple[Tuple[int, ...], ...] = PrivateAttr(default=())
    _in_edges: Tuple[Tuple[int, ...], ...] = PrivateAttr(default=())

    @model_validator(mode="after")
    def check_invariants(self):
        n = len(self.nodes)
        if len(self.pins) != n:
            raise InvalidGraphError(f"{len(self.pins)} pins for {n} nodes")
        seen = set()
        for e in self.edges:
            if not (0 <= e.src < n and 0 <= e.dst < n):
                raise IndexOutOfRange(f"edge ({e.src}, {e.dst}) out of range for {n} nodes")
            if e.src == e.dst:
                raise InvalidGraphError(f"self-loop on node {e.src}")
            if (e.src, e.dst) in seen:
                raise InvalidGraphError(f"parallel edge ({e.src}, {e.dst}) not merged")
            seen.add((e.src, e.dst))
        for v, (node, pin) in enumerate(zip(self.nodes, self.pins)):
            if math.isinf(node.w_cloud) and pin != Pin.EDGE:
                raise PinConflict(f"node {v} has infinite cloud cost but pin {pin.value}")
            if math.isinf(node.w_edge) and pin != Pin.CLOUD:
                raise PinConflict(f"node {v} has infinite edge cost but pin {pin.value}")
        return self

    def model_post_init(self, __context):
        out_edges: List[List[int]] = [[] for _ in self.nodes]
        in_edges: List[List[int]] = [[] for _ in self.nodes]
        for idx, e in enumerate(self.edges):
            if not (0 <= e.src < self.n and 0 <= e.dst < self.n):
                continue
            out_edges[e.src].append(idx)
            in_edges[e.dst].append(idx)
        self._out_edges = tuple(tuple(x) for x in out_edges)
        self._in_edges = tuple(tuple(x) for x in in_edges)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def m(self) -> int:
        return len(self.edges)

    def out_edges(self, v: int) -> Tuple[int, ...]:
        return self._out_edges[v]

    def in_edges(self, v: int) -> Tuple[int, ...]:
        return self._in_edges[v]

    def nodes_with(self, pin: Pin) -> List[int]:
        return [v for v, p in enumerate(self.pins) if p == pin]

    @property
    def free_nodes(self) -> List[int]:
        return self.nodes_with(Pin.FREE)


class Partition(BaseModel):
    """Cloud-side task set; every other task runs on the edge."""

    model_config = ConfigDict(frozen=True)

    cloud_set: FrozenSet[int] = frozenset()

    @field_serializer("cloud_set")
    def dump_sorted(self, cloud_set: FrozenSet[int]) -> List[int]:
        return sorted(cloud_set)

    @classmethod
    def of(cls, cloud: Iterable[int]) -> "Partition":
        return cls(cloud_set=frozenset(int(v) for v in cloud))

    def edge_set(self, n: int) -> FrozenSet[int]:
        return frozenset(range(n)) - self.cloud_set


class AssumptionViolation(BaseModel):
    edge: int
    inequality: str


class AssumptionReport(BaseModel):
    holds_weak: bool
    holds_strong: bool
    symmetric: bool
    violations: List[AssumptionViolation] = []


class CostBreakdown(BaseModel):
    comp: float
    comm_inter: float
    comm_intra_edge: float
    comm_intra_cloud: float
    total: float


class SolveStats(BaseModel):
    major_iterations: int = 0
    minor_iterations: int = 0
    oracle_calls: int = 0
    wall_time_ms: float = 0.0
    iteration_limited: bool = False


class SolveResult(BaseModel):
    algorithm: str
    partition: Partition
    f_min: float
    total_cost: float
    assumption: AssumptionReport
    optimal_certified: bool
    stats: SolveStats = Field(default_factory=SolveStats)


class OracleResult(BaseModel):
    best_set: FrozenSet[int]
    best_f: float
    best_total: float
    subsets_evaluated: int

    @field_serializer("best_set")
    def dump_sorted(self, best_set: FrozenSet[int]) -> List[int]:
        return sorted(best_set)


class CutInstance(BaseModel):
    """Undirected simple graph with a MAX-CUT target ``k``."""

    model_config = ConfigDict(frozen=True)

    n: int
    edges: Tuple[Tuple[int, int], ...]
    k: int = 0

    @model_validator(mode="after")
    def check_invariants(self):
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InvalidCutInstance(f"edge ({u}, {v}) out of range for {self.n} vertices")
            if u == v:
                raise InvalidCutInstance(f"self-loop on vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InvalidCutInstance(f"duplicate edge {key}")
            seen.add(key)
        if not 0 <= self.k <= len(self.edges):
            raise InvalidCutInstance(f"k = {self.k} outside 0..{len(self.edges)}")
        return self

    @property
    def m(self) -> int:
        return len(self.edges)


class DecisionCheck(BaseModel):
    k: int
    threshold: float
    decided: bool
    cut_feasible: bool


class Lemma2Report(BaseModel):
    n: int
    m: int
    q_star: int
    o_star: float
    expected_cost: float
    equality_holds: bool
    decisions: List[DecisionCheck] = []

    @property
    def passed(self) -> bool:
        return self.equality_holds and all(d.decided == d.cut_feasible for d in self.decisions)


class GenConfig(BaseModel):
    n: int = Field(10, description="Number of tasks")
    m: int = Field(20, description="Number of directed edges")
    ratio: Optional[Tuple[float, float, float, float]] = Field(
        None, description="(r_ee:r_ec:r_ce:r_cc) multiplier of one base draw per edge"
    )
    comp_range: Tuple[float, float] = Config.Generator.COMP_RANGE
    comm_range: Tuple[float, float] = Config.Generator.COMM_RANGE
    transfer_range: Tuple[float, float] = (0.0, 0.0)
    comm_scale: float = Field(1.0, description="Bandwidth multiplier on every communication cost")
    seed: int = 0
    enforce_assumption: bool = True
    pin_fraction: float = 0.0
    integral: bool = Field(False, description="Round every draw to an integer")

    @model_validator(mode="after")
    def check_invariants(self):
        if self.n < 0 or self.m < 0:
            raise InvalidConfig("n and m must be nonnegative")
        if self.ratio is not None and any(r <= 0 for r in self.ratio):
            raise InvalidConfig(f"ratio components must be positive, got {self.ratio}")
        for label, (lo, hi) in (
            ("comp_range", self.comp_range),
            ("comm_range", self.comm_range),
            ("transfer_range", self.transfer_range),
        ):
            if lo < 0 or lo > hi:
                raise InvalidConfig(f"{label} must satisfy 0 <= lo <= hi, got ({lo}, {hi})")
        if self.comm_scale <= 0:
            raise InvalidConfig("comm_scale must be positive")
        if not 0.0 <= self.pin_fraction < 1.0:
            raise InvalidConfig(f"pin_fraction must be in [0, 1), got {self.pin_fraction}")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfig("seed must be a 64-bit unsigned integer")
        return self


class BenchRecord(BaseModel):
    instance: str
    n: int
    m: int
    algorithm: str
    total_cost: Optional[float] = None
    f_min: Optional[float] = None
    wall_time_ms: float = 0.0
    assumption_strong: Optional[bool] = None
    certified: Optional[bool] = None
    seed: Optional[int] = None
    status: str = "ok"

    def to_row(self) -> List[str]:
        def fmt(value) -> str:
            if value is None:
                return ""
            if isinstance(value, bool):
                return "true" if value else "false"
            if isinstance(value, float):
                return repr(value)
            return str(value)

        return [fmt(getattr(self, column)) for column in Config.Bench.CSV_HEADER]


class SnapSource(BaseModel):
    path: str
    take_nodes: int = 500


class SuiteGroup(BaseModel):
    """One benchmark group: a generator or a SNAP file, re-seeded for every repetition."""

    name: str
    generator: GenConfig = Field(default_factory=GenConfig)
    snap: Optional[SnapSource] = None


class SuiteConfig(BaseModel):
    name: str = "suite"
    algorithms: List[str] = Field(["sma", "greedy"], description="Algorithms run on every instance")
    repetitions: int = Field(10, description="Instances per group; seed = generator seed + rep")
    groups: List[SuiteGroup] = []
    eps: float = Config.Solver.EPS
    archive_gap_dir: Optional[str] = Field(
        None, description="Save instances where greedy is strictly worse than sma here"
    )
    lp_dir: Optional[str] = Field(None, description="Where ilp-export writes its LP files")

    @model_validator(mode="after")
    def check_invariants(self):
        unknown = [a for a in self.algorithms if a not in Config.Bench.ALGORITHMS]
        if unknown:
            raise InvalidConfig(f"unknown algorithms {unknown}")
        if self.repetitions < 0:
            raise InvalidConfig("repetitions must be nonnegative")
        return self
