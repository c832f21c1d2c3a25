import argparse
import sys
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv
from loguru import logger
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from edgeoffload.config import Config, configure_logging, parse_ratio, seed_everything
from edgeoffload.cost import OffloadObjective
from edgeoffload.data import GenConfig, SolveResult, SuiteConfig
from edgeoffload.datagen import generate, load_instance, save_instance, schema_error
from edgeoffload.errors import (
    GroundSetTooLarge,
    InstanceIOError,
    NotApplicable,
    OffloadError,
)
from edgeoffload.model import check_assumption
from edgeoffload.reductions import load_cut_instance, maxcut_to_offloading, validate_lemma2
from edgeoffload.workflow import all_failed, print_summary, run_suite, solve_with, write_csv

EXIT_OK = 0
EXIT_IO = 1
EXIT_NOT_APPLICABLE = 2
EXIT_TOO_LARGE = 3
EXIT_VALIDATION_FAILED = 4
EXIT_INVALID_INPUT = 5
EXIT_BENCH_FAILED = 6
EXIT_USAGE = 64
EXIT_INTERNAL = 70

SOLVE_ALGORITHMS = ("sma", "greedy", "mincut", "brute")

console = Console(highlight=False, markup=False, soft_wrap=True)


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _ratio(text: str):
    try:
        return parse_ratio(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _bool(flag: bool) -> str:
    return "true" if flag else "false"


def _summary(result: SolveResult) -> str:
    return (
        f"{result.algorithm} total={result.total_cost:.6g} f_min={result.f_min:.6g} "
        f"certified={_bool(result.optimal_certified)} ms={result.stats.wall_time_ms:.3f}"
    )


def cmd_solve(args) -> int:
    g = load_instance(args.instance)
    result = solve_with(g, args.algo, args.eps)
    if args.out:
        Path(args.out).write_text(result.model_dump_json(indent=2) + "\n")
    console.print(_summary(result))
    return EXIT_OK


def cmd_compare(args) -> int:
    g = load_instance(args.instance)
    results = []
    failures = {}
    for algorithm in args.algos.split(","):
        try:
            results.append(solve_with(g, algorithm, args.eps))
        except (NotApplicable, GroundSetTooLarge) as e:
            failures[algorithm] = type(e).__name__

    best = min((r.total_cost for r in results), default=None)
    table = Table(title=f"{g.name or args.instance} (n={g.n}, m={g.m})")
    for column in ("Algorithm", "Total", "F min", "Certified", "ms", "Gap vs best"):
        table.add_column(column, justify="left" if column == "Algorithm" else "right")
    for r in results:
        gap = r.total_cost - best
        table.add_row(
            r.algorithm,
            f"{r.total_cost:.6g}",
            f"{r.f_min:.6g}",
            _bool(r.optimal_certified),
            f"{r.stats.wall_time_ms:.3f}",
            f"{gap:.6g}",
        )
    console.print(table)
    for algorithm, status in failures.items():
        console.print(f"{algorithm}: {status}")
    return EXIT_OK


def cmd_gen(args) -> int:
    cfg = GenConfig(
        n=args.nodes,
        m=args.edges,
        ratio=args.ratio,
        seed=args.seed,
        pin_fraction=args.pin_fraction,
        comm_scale=args.comm_scale,
        enforce_assumption=not args.no_enforce,
        integral=args.integral,
    )
    g = generate(cfg)
    save_instance(g, args.out, metadata={"generator": cfg.model_dump(mode="json")})
    report = check_assumption(g)
    console.print(
        f"{args.out}: n={g.n} m={g.m} holds_weak={_bool(report.holds_weak)} "
        f"holds_strong={_bool(report.holds_strong)}"
    )
    return EXIT_OK


def cmd_reduce(args) -> int:
    cut = load_cut_instance(args.graph, args.k)
    g, threshold = maxcut_to_offloading(cut)
    metadata = {"reduction": "maxcut", "k": cut.k, "threshold": threshold, "source": args.graph}
    save_instance(g, args.out, metadata=metadata)
    console.print(f"{args.out}: n={g.n} m={g.m} k={cut.k} threshold={threshold:g}")
    return EXIT_OK


def cmd_validate_lemma2(args) -> int:
    report = validate_lemma2(load_cut_instance(args.graph))
    verdict = "PASS" if report.passed else "FAIL"
    console.print(
        f"{verdict} n={report.n} m={report.m} q*={report.q_star} O*={report.o_star:g} "
        f"expected={report.expected_cost:g}"
    )
    for d in report.decisions:
        if d.decided != d.cut_feasible:
            console.print(f"  k={d.k}: threshold {d.threshold:g} decided {_bool(d.decided)}")
    return EXIT_OK if report.passed else EXIT_VALIDATION_FAILED


def cmd_validate_submodularity(args) -> int:
    g = load_instance(args.instance)
    checked, violations = OffloadObjective(g).sample_diminishing_returns(args.samples, args.seed)
    verdict = "PASS" if not violations else "FAIL"
    console.print(f"{verdict} checked={checked} violations={len(violations)}")
    for v in violations[: args.show]:
        console.print(
            f"  v={v.v} |A|={len(v.a)} |B|={len(v.b)} "
            f"marginal(A)={v.marginal_a:.6g} < marginal(B)={v.marginal_b:.6g}"
        )
    return EXIT_OK if not violations else EXIT_VALIDATION_FAILED


def cmd_bench(args) -> int:
    try:
        suite = SuiteConfig.model_validate_json(Path(args.suite).read_text())
    except OSError as e:
        raise InstanceIOError(f"cannot read {args.suite}: {e}") from e
    except ValidationError as e:
        raise schema_error(e) from None
    records = run_suite(suite, no_timing=args.no_timing, threads=args.threads)
    write_csv(records, args.out)
    logger.info(f"Wrote {len(records)} rows to {args.out}")
    if records:
        print_summary(records, console)
    return EXIT_BENCH_FAILED if all_failed(records) else EXIT_OK


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="edgeoffload", description="Edge-cloud offloading optimizer")
    verbs = parser.add_subparsers(dest="verb", required=True)

    solve = verbs.add_parser("solve", help="Solve one instance")
    solve.add_argument("--instance", required=True)
    solve.add_argument("--algo", choices=SOLVE_ALGORITHMS, default="sma")
    solve.add_argument("--eps", type=float, default=Config.Solver.EPS)
    solve.add_argument("--out", help="Write the SolveResult JSON here")
    solve.set_defaults(handler=cmd_solve)

    compare = verbs.add_parser("compare", help="Run several algorithms on one instance")
    compare.add_argument("--instance", required=True)
    compare.add_argument("--algos", default=",".join(SOLVE_ALGORITHMS))
    compare.add_argument("--eps", type=float, default=Config.Solver.EPS)
    compare.set_defaults(handler=cmd_compare)

    gen = verbs.add_parser("gen", help="Generate a random instance")
    gen.add_argument("--nodes", type=int, required=True)
    gen.add_argument("--edges", type=int, required=True)
    gen.add_argument("--ratio", type=_ratio, help="r_ee:r_ec:r_ce:r_cc, e.g. 3:5:4:2")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--pin-fraction", type=float, default=0.0)
    gen.add_argument("--comm-scale", type=float, default=1.0)
    gen.add_argument("--no-enforce", action="store_true", help="Uniform l draws without ratio")
    gen.add_argument("--integral", action="store_true")
    gen.add_argument("--out", required=True)
    gen.set_defaults(handler=cmd_gen)

    reduce = verbs.add_parser("reduce", help="Build offloading instances from other problems")
    reductions = reduce.add_subparsers(dest="problem", required=True)
    maxcut = reductions.add_parser("maxcut", help="MAX-CUT edge list to offloading instance")
    maxcut.add_argument("--graph", required=True)
    maxcut.add_argument("--k", type=int, required=True)
    maxcut.add_argument("--out", required=True)
    maxcut.set_defaults(handler=cmd_reduce)

    validate = verbs.add_parser("validate", help="Empirical checks")
    checks = validate.add_subparsers(dest="check", required=True)
    lemma = checks.add_parser("lemma2", help="MAX-CUT reduction cost identity")
    lemma.add_argument("--graph", required=True)
    lemma.set_defaults(handler=cmd_validate_lemma2)
    submodular = checks.add_parser("submodularity", help="Sample diminishing returns of F")
    submodular.add_argument("--instance", required=True)
    submodular.add_argument("--samples", type=int, default=1000)
    submodular.add_argument("--seed", type=int, default=Config.SEED)
    submodular.add_argument("--show", type=int, default=5)
    submodular.set_defaults(handler=cmd_validate_submodularity)

    bench = verbs.add_parser("bench", help="Run a benchmark suite into a CSV file")
    bench.add_argument("--suite", required=True)
    bench.add_argument("--out", required=True)
    bench.add_argument("--no-timing", action="store_true", help="Write 0 for wall_time_ms")
    bench.add_argument("--threads", type=int)
    bench.set_defaults(handler=cmd_bench)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    configure_logging()
    seed_everything()
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except NotApplicable as e:
        logger.error(str(e))
        return EXIT_NOT_APPLICABLE
    except GroundSetTooLarge as e:
        logger.error(str(e))
        return EXIT_TOO_LARGE
    except InstanceIOError as e:
        logger.error(str(e))
        return EXIT_IO
    except OffloadError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INVALID_INPUT
    except OSError as e:
        logger.error(str(e))
        return EXIT_IO
    except Exception:
        logger.exception("Unexpected error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
