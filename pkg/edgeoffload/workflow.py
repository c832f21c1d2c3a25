import csv
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Union

from loguru import logger
from rich.console import Console
from rich.table import Table

from edgeoffload.config import Config, bench_threads
from edgeoffload.data import BenchRecord, SolveResult, SuiteConfig, SuiteGroup, TaskGraph
from edgeoffload.datagen import generate, load_snap, save_instance
from edgeoffload.errors import InstanceIOError, InvalidConfig, OffloadError
from edgeoffload.solvers import export_ilp, greedy_local_search, solve, solve_brute, solve_mincut

MEAN_SUFFIX = ":mean"

SOLVERS: Dict[str, Callable[..., SolveResult]] = {
    "sma": solve,
    "greedy": greedy_local_search,
    "mincut": solve_mincut,
    "brute": solve_brute,
}


def solve_with(g: TaskGraph, algorithm: str, eps: float = Config.Solver.EPS) -> SolveResult:
    """Run one algorithm; ``stats.wall_time_ms`` covers the solve call only."""
    if algorithm not in SOLVERS:
        raise InvalidConfig(f"unknown algorithm {algorithm!r}; choose from {sorted(SOLVERS)}")
    start = time.perf_counter()
    result = solve(g, eps) if algorithm == "sma" else SOLVERS[algorithm](g)
    result.stats.wall_time_ms = (time.perf_counter() - start) * 1000.0
    logger.debug(f"{algorithm} on {g.name or 'graph'}: total {result.total_cost}")
    return result


@dataclass
class BenchJob:
    group_index: int
    group: SuiteGroup
    rep: int


def build_instance(group: SuiteGroup, rep: int) -> TaskGraph:
    cfg = group.generator.model_copy(update={"seed": group.generator.seed + rep})
    if group.snap is not None:
        return load_snap(group.snap.path, group.snap.take_nodes, cfg)
    return generate(cfg)


def _lp_path(suite: SuiteConfig, job: BenchJob) -> Path:
    lp_dir = Path(suite.lp_dir)
    try:
        lp_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise InstanceIOError(f"cannot create {lp_dir}: {e}") from e
    return lp_dir / f"{job.group.name}-{job.rep}.lp"


def _run_job(suite: SuiteConfig, job: BenchJob, no_timing: bool) -> List[BenchRecord]:
    label = f"{job.group.name}/{job.rep}"
    seed = job.group.generator.seed + job.rep
    try:
        g = build_instance(job.group, job.rep)
    except OffloadError as e:
        logger.warning(f"Cannot build {label}: {e}")
        return [
            BenchRecord(instance=label, n=0, m=0, algorithm=a, seed=seed, status=type(e).__name__)
            for a in suite.algorithms
        ]

    records = []
    results: Dict[str, SolveResult] = {}
    for algorithm in suite.algorithms:
        record = BenchRecord(instance=label, n=g.n, m=g.m, algorithm=algorithm, seed=seed)
        if algorithm == "ilp-export":
            if suite.lp_dir is None:
                record.status = "skipped"
            else:
                try:
                    export_ilp(g, _lp_path(suite, job))
                    record.status = "exported"
                except OffloadError as e:
                    logger.warning(f"ilp-export failed on {label}: {e}")
                    record.status = type(e).__name__
            records.append(record)
            continue
        try:
            result = solve_with(g, algorithm, suite.eps)
        except OffloadError as e:
            logger.warning(f"{algorithm} failed on {label}: {e}")
            record.status = type(e).__name__
            records.append(record)
            continue
        results[algorithm] = result
        record.total_cost = result.total_cost
        record.f_min = result.f_min
        record.wall_time_ms = 0.0 if no_timing else result.stats.wall_time_ms
        record.assumption_strong = result.assumption.holds_strong
        record.certified = result.optimal_certified
        records.append(record)

    if suite.archive_gap_dir and "sma" in results and "greedy" in results:
        sma, greedy = results["sma"].total_cost, results["greedy"].total_cost
        if greedy > sma + Config.Tolerance.ABS:
            path = Path(suite.archive_gap_dir) / f"{job.group.name}-{job.rep}.json"
            try:
                path.parent.mkdir(parents=True, exist_ok=True)
                save_instance(g, path, metadata={"sma_total": sma, "greedy_total": greedy})
            except (OffloadError, OSError) as e:
                logger.warning(f"Cannot archive {label}: {e}")
            else:
                logger.info(f"Archived greedy gap instance {path} ({greedy} > {sma})")
    return records


def _mean_rows(suite: SuiteConfig, records: List[BenchRecord]) -> List[BenchRecord]:
    rows = []
    for group in suite.groups:
        prefix = f"{group.name}/"
        for algorithm in suite.algorithms:
            done = [
                r
                for r in records
                if r.instance.startswith(prefix) and r.algorithm == algorithm and r.status == "ok"
            ]
            if not done:
                continue
            rows.append(
                BenchRecord(
                    instance=group.name,
                    n=done[0].n,
                    m=round(sum(r.m for r in done) / len(done)),
                    algorithm=algorithm + MEAN_SUFFIX,
                    total_cost=sum(r.total_cost for r in done) / len(done),
                    f_min=sum(r.f_min for r in done) / len(done),
                    wall_time_ms=sum(r.wall_time_ms for r in done) / len(done),
                    assumption_strong=all(r.assumption_strong for r in done),
                    certified=all(r.certified for r in done),
                )
            )
    return rows


def run_suite(
    suite: SuiteConfig, no_timing: bool = False, threads: Optional[int] = None
) -> List[BenchRecord]:
    """Every (group, repetition, algorithm) record in that order, then per-group means."""
    jobs = [
        BenchJob(group_index=gi, group=group, rep=rep)
        for gi, group in enumerate(suite.groups)
        for rep in range(suite.repetitions)
    ]
    workers = threads or bench_threads()
    logger.info(f"Running {len(jobs)} instances of {suite.name} on {workers} workers")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map keeps submission order, which is already (group, rep)
        per_job = list(pool.map(lambda job: _run_job(suite, job, no_timing), jobs))
    records = [record for batch in per_job for record in batch]
    return records + _mean_rows(suite, records)


def write_csv(records: Iterable[BenchRecord], path: Union[str, Path]):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(Config.Bench.CSV_HEADER)
        for record in records:
            writer.writerow(record.to_row())


def all_failed(records: List[BenchRecord]) -> bool:
    runs = [r for r in records if not r.algorithm.endswith(MEAN_SUFFIX)]
    return bool(runs) and all(r.status not in ("ok", "exported") for r in runs)


def summary_table(records: List[BenchRecord]) -> Table:
    table = Table(title="Mean total cost per group")
    table.add_column("Group")
    table.add_column("Algorithm")
    table.add_column("Total", justify="right")
    table.add_column("Gap vs sma", justify="right")
    table.add_column("ms", justify="right")
    means = [r for r in records if r.algorithm.endswith(MEAN_SUFFIX)]
    sma = {r.instance: r.total_cost for r in means if r.algorithm == "sma" + MEAN_SUFFIX}
    for r in means:
        reference = sma.get(r.instance)
        gap = "" if not reference else f"{100.0 * (r.total_cost - reference) / reference:+.2f}%"
        table.add_row(
            r.instance,
            r.algorithm.removesuffix(MEAN_SUFFIX),
            f"{r.total_cost:.4f}",
            gap,
            f"{r.wall_time_ms:.2f}",
        )
    return table


def print_summary(records: List[BenchRecord], console: Optional[Console] = None):
    (console or Console()).print(summary_table(records))
