"""Command-line surface.

Every command is deterministic given identical inputs and flags, and the
exit code is scriptable: 0 success, 1 negative verdict (infeasible
instance, failed witness, "false" oracle answer), 2 usage or input
error, 3 resource cap hit (search box exhausted, oracle budget).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .instance import IlpError, IlpInstance, max_abs_coefficient, parse_instance, serialize_instance
from .kernelizer import (
    KernelTrace,
    compute_bounds,
    format_bound,
    kernelize,
    trace_from_json,
    trace_to_json,
)
from .oracle import (
    OracleBudgetError,
    brute_force_ilp,
    brute_three_coloring,
    brute_vertex_cover,
    subset_sum_dp,
    treedepth_reference,
)
from .outcome import BOUND_EXHAUSTED, INFEASIBLE, SolveOutcome
from .reductions import (
    SubsetSumInstance,
    reduce_subset_sum,
    reduce_three_coloring,
    reduce_vertex_cover,
)
from .solver import solve_pipeline
from .structure import (
    StructureError,
    TreedepthDecomposition,
    TreeDecompositionWitness,
    build_primal_graph,
    compute_treedepth_exact,
    dfs_treedepth_heuristic,
    parse_graph_file,
    verify_tree_decomposition,
    verify_treedepth_decomposition,
    witness_from_json,
    witness_to_json,
)

OK = 0
NO = 1
USAGE = 2
RESOURCE = 3

# graphs above this size get the DFS heuristic instead of exact treedepth
EXACT_TD_LIMIT = 12


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_instance(path: str) -> IlpInstance:
    return parse_instance(_read(path))


def _load_graph(path: str):
    return parse_graph_file(_read(path))


def _decomposition_for(instance: IlpInstance, witness_path: str | None):
    """The decomposition a solve would use: given, exact, or heuristic."""
    if witness_path is not None:
        witness = witness_from_json(_read(witness_path))
        if not isinstance(witness, TreedepthDecomposition):
            raise StructureError("--td expects a treedepth witness")
        return witness, "given"
    graph = build_primal_graph(instance)
    if graph.n <= EXACT_TD_LIMIT:
        _, decomposition = compute_treedepth_exact(graph)
        return decomposition, "exact"
    return dfs_treedepth_heuristic(graph), "dfs"


def _outcome_exit(outcome: SolveOutcome) -> int:
    if outcome.status == INFEASIBLE:
        return NO
    if outcome.status == BOUND_EXHAUSTED:
        return RESOURCE
    return OK


# ---------------------------------------------------------------------------
# subcommands


def _cmd_analyze(args) -> int:
    instance = _load_instance(args.file)
    graph = build_primal_graph(instance)
    print(f"variables: {instance.n_variables}")
    print(f"constraints: {instance.n_constraints}")
    print(f"ell: {max_abs_coefficient(instance)}")
    components = len(graph.connected_components())
    print(f"primal graph: {graph.n} vertices, {graph.n_edges} edges, {components} components")
    if graph.n <= EXACT_TD_LIMIT:
        depth, decomposition = compute_treedepth_exact(graph)
        print(f"treedepth: {depth} (exact)")
    else:
        decomposition = dfs_treedepth_heuristic(graph)
        print(f"treedepth: <= {decomposition.height} (dfs heuristic)")
    if args.witness_out:
        Path(args.witness_out).write_text(witness_to_json(decomposition), encoding="utf-8")
        print(f"witness: {args.witness_out}")
    return OK


def _cmd_solve(args) -> int:
    instance = _load_instance(args.file)
    decomposition = None
    if args.td is not None:
        decomposition, _ = _decomposition_for(instance, args.td)
    outcome, _ = solve_pipeline(
        instance,
        decomposition,
        use_kernel=not args.no_kernel,
        propagate=args.propagate,
        bound=args.bound,
    )
    print(outcome.to_json(name_of=instance.name_of))
    return _outcome_exit(outcome)


def _cmd_kernelize(args) -> int:
    instance = _load_instance(args.file)
    decomposition, _ = _decomposition_for(instance, args.td)
    kernel, _, trace = kernelize(instance, decomposition)
    Path(args.output).write_text(serialize_instance(kernel), encoding="utf-8")
    Path(args.trace).write_text(trace_to_json(trace), encoding="utf-8")
    print(
        f"kernel: {kernel.n_variables} of {instance.n_variables} variables,"
        f" {len(trace)} pruning steps"
    )
    return OK


def _cmd_lift(args) -> int:
    trace: KernelTrace = trace_from_json(_read(args.trace))
    solution = json.loads(_read(args.solution))
    assignment = solution.get("assignment")
    if not isinstance(assignment, dict):
        raise IlpError("solution file has no assignment to lift")
    lifted = dict(assignment)
    for step in reversed(trace.steps):
        for src, dst in step.delta.items():
            src_name, dst_name = step.names[src], step.names[dst]
            if src_name not in lifted:
                raise IlpError(f"solution is missing variable {src_name!r}")
            lifted[dst_name] = lifted[src_name]
    doc = {
        "status": solution.get("status"),
        "value": solution.get("value"),
        "assignment": {name: lifted[name] for name in sorted(lifted)},
        "kernel_vars": len(assignment),
        "original_vars": len(lifted),
    }
    print(json.dumps(doc, indent=2))
    return OK


def _cmd_generate(args) -> int:
    witness_text = None
    if args.kind == "vc":
        instance = reduce_vertex_cover(_load_graph(args.graph), args.k)
    elif args.kind == "3col":
        instance, decomposition = reduce_three_coloring(_load_graph(args.graph))
        witness_text = witness_to_json(decomposition)
    else:
        s = SubsetSumInstance(tuple(args.values), args.target)
        instance, witness = reduce_subset_sum(s)
        witness_text = witness_to_json(witness)
    text = serialize_instance(instance)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        print(f"wrote {args.output}: {instance.n_variables} variables, {instance.n_constraints} constraints")
    else:
        sys.stdout.write(text)
    if getattr(args, "witness", None):
        if witness_text is None:
            raise IlpError("this generator emits no structural witness")
        Path(args.witness).write_text(witness_text, encoding="utf-8")
        print(f"wrote {args.witness}")
    return OK


def _cmd_verify(args) -> int:
    instance = _load_instance(args.file)
    graph = build_primal_graph(instance)
    witness = witness_from_json(_read(args.witness))
    if isinstance(witness, TreedepthDecomposition):
        try:
            good = verify_treedepth_decomposition(graph, witness)
        except StructureError as exc:
            print(f"treedepth witness: INVALID ({exc})")
            return NO
        if good:
            print(f"treedepth witness: valid, height {witness.height}")
            return OK
        print("treedepth witness: INVALID (some edge is not vertical)")
        return NO
    if verify_tree_decomposition(graph, witness):
        print(f"treewidth witness: valid, width {witness.width}")
        return OK
    print("treewidth witness: INVALID")
    return NO


def _cmd_oracle(args) -> int:
    if args.oracle == "ilp":
        instance = _load_instance(args.file)
        outcome = brute_force_ilp(instance, args.box)
        print(outcome.to_json(name_of=instance.name_of))
        return _outcome_exit(outcome)
    if args.oracle == "subsetsum":
        verdict = subset_sum_dp(SubsetSumInstance(tuple(args.values), args.target))
    elif args.oracle == "3col":
        verdict = brute_three_coloring(_load_graph(args.graph))
    elif args.oracle == "vc":
        verdict = brute_vertex_cover(_load_graph(args.graph), args.k)
    else:  # td
        print(treedepth_reference(_load_graph(args.graph)))
        return OK
    print("true" if verdict else "false")
    return OK if verdict else NO


def _cmd_bounds(args) -> int:
    bounds = compute_bounds(args.ell, args.k)
    print(f"ell={bounds.ell} k={bounds.k}")
    print("i  d_i  e_i")
    for i in range(bounds.k, 0, -1):
        print(f"{i}  {format_bound(bounds.d[i])}  {format_bound(bounds.e[i])}")
    print(f"e_1 = {format_bound(bounds.e1())}")
    return OK


# ---------------------------------------------------------------------------
# argument grammar


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tdilp",
        description="Structure-aware exact ILP toolkit: kernelize, solve, generate.",
    )
    parser.add_argument(
        "--threads",
        type=_positive,
        default=1,
        help="cap on internal parallelism (current engines are single-threaded)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="instance and primal-graph statistics")
    p.add_argument("file")
    p.add_argument("--witness-out", help="write the computed treedepth witness here")
    p.set_defaults(handler=_cmd_analyze)

    p = sub.add_parser("solve", help="kernelize, search, lift; prints outcome JSON")
    p.add_argument("file")
    p.add_argument("--td", help="treedepth witness JSON to use instead of computing one")
    p.add_argument("--bound", type=_positive, help="override the certified search box radius")
    p.add_argument("--no-kernel", action="store_true", help="skip subtree pruning")
    p.add_argument("--propagate", action="store_true", help="presolve rewrites + domain-driven branching")
    p.set_defaults(handler=_cmd_solve)

    p = sub.add_parser("kernelize", help="write the pruned instance and its trace")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--td", help="treedepth witness JSON to use instead of computing one")
    p.set_defaults(handler=_cmd_kernelize)

    p = sub.add_parser("lift", help="replay a trace to extend a kernel solution")
    p.add_argument("--trace", required=True)
    p.add_argument("--solution", required=True, help="outcome JSON from solving the kernel")
    p.set_defaults(handler=_cmd_lift)

    p = sub.add_parser("generate", help="emit a hardness-reduction instance")
    gen = p.add_subparsers(dest="kind", required=True)
    g = gen.add_parser("3col", help="prime-encoding 3-coloring instance")
    g.add_argument("--graph", required=True)
    g.add_argument("-o", "--output")
    g.add_argument("--witness", help="write the height-8 treedepth witness here")
    g = gen.add_parser("vc", help="vertex-cover budget instance")
    g.add_argument("--graph", required=True)
    g.add_argument("--k", type=_positive, required=True, help="cover budget")
    g.add_argument("-o", "--output")
    g = gen.add_parser("subsetsum", help="doubling-gadget chain instance")
    g.add_argument("--values", type=_int_list, required=True)
    g.add_argument("--target", type=_positive, required=True)
    g.add_argument("-o", "--output")
    g.add_argument("--witness", help="write the width-2 tree-decomposition witness here")
    p.set_defaults(handler=_cmd_generate)

    p = sub.add_parser("verify", help="check a structural witness against an instance")
    p.add_argument("file")
    p.add_argument("--witness", required=True)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("oracle", help="brute-force references for spot checks")
    orc = p.add_subparsers(dest="oracle", required=True)
    o = orc.add_parser("ilp", help="enumerate a box exhaustively")
    o.add_argument("file")
    o.add_argument("--box", type=_positive, required=True, help="coordinate radius to sweep")
    o = orc.add_parser("subsetsum")
    o.add_argument("--values", type=_int_list, required=True)
    o.add_argument("--target", type=_positive, required=True)
    o = orc.add_parser("3col")
    o.add_argument("--graph", required=True)
    o = orc.add_parser("vc")
    o.add_argument("--graph", required=True)
    o.add_argument("--k", type=_positive, required=True)
    o = orc.add_parser("td")
    o.add_argument("--graph", required=True)
    p.set_defaults(handler=_cmd_oracle)

    p = sub.add_parser("bounds", help="kernel size bounds d_i, e_i for given ell and k")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--k", type=_positive, required=True)
    p.set_defaults(handler=_cmd_bounds)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage or help
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except OracleBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return RESOURCE
    except (IlpError, StructureError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
