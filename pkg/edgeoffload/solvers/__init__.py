from .exact import brute_force, build_ilp, export_ilp, solve_brute
from .greedy import greedy_local_search
from .mincut import mincut_applicable, solve_mincut
from .sfm import extract_minimizer, greedy_vertex, min_norm_point, solve

__all__ = (
    "brute_force",
    "build_ilp",
    "export_ilp",
    "extract_minimizer",
    "greedy_local_search",
    "greedy_vertex",
    "min_norm_point",
    "mincut_applicable",
    "solve",
    "solve_brute",
    "solve_mincut",
)
