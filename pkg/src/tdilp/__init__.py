"""Exact integer linear programming toolkit.

The package bundles a text-based ILP model, primal-graph structure
analysis (treedepth / tree decompositions), a kernelizer that prunes
interchangeable subtrees of a treedepth decomposition, an exact
bounded-box solver, generators that encode classic NP-hard problems as
narrow ILP families, and naive oracles used to cross-check everything.
"""

from .instance import (
    IlpError,
    IlpInstance,
    IlpSyntaxError,
    InstanceBuilder,
    LinearConstraint,
    LinearObjective,
    VariableId,
    check_feasible,
    evaluate_constraint,
    evaluate_objective,
    max_abs_coefficient,
    omit_variables,
    parse_instance,
    serialize_instance,
)
from .kernelizer import (
    Astronomical,
    EquivalenceWitness,
    KernelBounds,
    KernelError,
    KernelTrace,
    compute_bounds,
    find_equivalent_pair,
    format_bound,
    kernelize,
    lift_solution,
    trace_from_json,
    trace_to_json,
)
from .outcome import SolveOutcome
from .solver import BoxBound, solution_bound, solve, solve_core, solve_pipeline
from .structure import (
    Graph,
    StructureError,
    TreedepthDecomposition,
    TreeDecompositionWitness,
    build_primal_graph,
    compute_treedepth_exact,
    dfs_treedepth_heuristic,
    parse_graph_file,
    serialize_graph,
    treedepth_to_tree_decomposition,
    verify_tree_decomposition,
    verify_treedepth_decomposition,
    witness_from_json,
    witness_to_json,
)

__all__ = [
    "Astronomical",
    "BoxBound",
    "EquivalenceWitness",
    "Graph",
    "IlpError",
    "IlpInstance",
    "IlpSyntaxError",
    "InstanceBuilder",
    "KernelBounds",
    "KernelError",
    "KernelTrace",
    "LinearConstraint",
    "LinearObjective",
    "SolveOutcome",
    "StructureError",
    "TreeDecompositionWitness",
    "TreedepthDecomposition",
    "VariableId",
    "build_primal_graph",
    "check_feasible",
    "compute_bounds",
    "compute_treedepth_exact",
    "dfs_treedepth_heuristic",
    "evaluate_constraint",
    "evaluate_objective",
    "find_equivalent_pair",
    "format_bound",
    "kernelize",
    "lift_solution",
    "max_abs_coefficient",
    "omit_variables",
    "parse_graph_file",
    "parse_instance",
    "serialize_graph",
    "serialize_instance",
    "solution_bound",
    "solve",
    "solve_core",
    "solve_pipeline",
    "trace_from_json",
    "trace_to_json",
    "treedepth_to_tree_decomposition",
    "verify_tree_decomposition",
    "verify_treedepth_decomposition",
    "witness_from_json",
    "witness_to_json",
]
