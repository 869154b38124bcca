"""Primal graphs, treedepth decompositions, tree-decomposition witnesses.

The solver pipeline only ever consumes a treedepth decomposition: a
rooted forest over the instance's variables whose ancestor-descendant
closure contains every primal edge.  Tree decompositions (bags) appear
as verifiable side artifacts of the generators.
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping

from .instance import IlpError, IlpInstance

ROOT = -1


class StructureError(IlpError):
    """Malformed graph, decomposition or witness."""


class Graph:
    """Simple loopless undirected graph over an explicit integer vertex set.

    Immutable by convention; adjacency is precomputed and sorted so that
    every traversal in the package is deterministic.
    """

    __slots__ = ("vertices", "edges", "_adj")

    def __init__(self, vertices: Iterable[int], edges: Iterable[tuple[int, int]] = ()):
        vs = tuple(sorted(set(vertices)))
        known = set(vs)
        norm: set[tuple[int, int]] = set()
        for u, v in edges:
            if u == v:
                raise StructureError(f"loop at vertex {u}")
            if u not in known or v not in known:
                raise StructureError(f"edge ({u}, {v}) uses an undeclared vertex")
            norm.add((u, v) if u < v else (v, u))
        self.vertices = vs
        self.edges = frozenset(norm)
        adj: dict[int, set[int]] = {v: set() for v in vs}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        self._adj = {v: tuple(sorted(ns)) for v, ns in adj.items()}

    @staticmethod
    def dense(n: int, edges: Iterable[tuple[int, int]] = ()) -> "Graph":
        """Graph on vertices 0..n-1."""
        return Graph(range(n), edges)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges or (v, u) in self.edges

    def subgraph(self, keep: Iterable[int]) -> "Graph":
        kept = set(keep)
        unknown = kept - set(self.vertices)
        if unknown:
            raise StructureError(f"unknown vertices {sorted(unknown)}")
        return Graph(kept, [(u, v) for u, v in self.edges if u in kept and v in kept])

    def connected_components(self) -> list[tuple[int, ...]]:
        seen: set[int] = set()
        out: list[tuple[int, ...]] = []
        for s in self.vertices:
            if s in seen:
                continue
            comp = [s]
            seen.add(s)
            queue = [s]
            while queue:
                v = queue.pop()
                for w in self._adj[v]:
                    if w not in seen:
                        seen.add(w)
                        comp.append(w)
                        queue.append(w)
            out.append(tuple(sorted(comp)))
        return out

    def is_connected(self) -> bool:
        return len(self.connected_components()) <= 1

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.n_edges})"


class TreedepthDecomposition:
    """Rooted forest over integer nodes; ``parent[v] == ROOT`` marks a root.

    height counts vertices on the longest root-to-node path, so a single
    root has height 1 and the empty forest height 0.
    """

    __slots__ = ("parent", "height", "_children", "_depth", "_roots")

    def __init__(self, parent: Mapping[int, int]):
        par = dict(parent)
        nodes = set(par)
        for v, p in par.items():
            if p == v:
                raise StructureError(f"node {v} is its own parent")
            if p != ROOT and p not in nodes:
                raise StructureError(f"parent {p} of node {v} is not a node")
        depth: dict[int, int] = {}
        for v in par:
            chain: list[int] = []
            u = v
            while u not in depth:
                if u in chain:
                    raise StructureError(f"parent cycle through node {u}")
                chain.append(u)
                p = par[u]
                if p == ROOT:
                    depth[u] = 1
                    break
                u = p
            base = depth[chain[-1]] if chain and chain[-1] in depth else depth[u]
            for node in reversed(chain):
                if node not in depth:
                    base += 1
                    depth[node] = base
                else:
                    base = depth[node]
        self.parent = par
        self._depth = depth
        self.height = max(depth.values(), default=0)
        kids: dict[int, list[int]] = {v: [] for v in par}
        roots: list[int] = []
        for v, p in par.items():
            if p == ROOT:
                roots.append(v)
            else:
                kids[p].append(v)
        self._children = {v: tuple(sorted(cs)) for v, cs in kids.items()}
        self._roots = tuple(sorted(roots))

    def nodes(self) -> tuple[int, ...]:
        return tuple(sorted(self.parent))

    @property
    def n(self) -> int:
        return len(self.parent)

    def roots(self) -> tuple[int, ...]:
        return self._roots

    def children(self, v: int) -> tuple[int, ...]:
        return self._children[v]

    def depth_of(self, v: int) -> int:
        return self._depth[v]

    def nodes_at_depth(self, d: int) -> tuple[int, ...]:
        return tuple(sorted(v for v, dv in self._depth.items() if dv == d))

    def subtree(self, x: int) -> tuple[int, ...]:
        """x and all its descendants."""
        if x not in self.parent:
            raise StructureError(f"unknown node {x}")
        out = [x]
        queue = [x]
        while queue:
            v = queue.pop()
            for c in self._children[v]:
                out.append(c)
                queue.append(c)
        return tuple(sorted(out))

    def path_to_root(self, v: int) -> tuple[int, ...]:
        """Vertices from the root down to v, inclusive."""
        path = []
        u = v
        while u != ROOT:
            path.append(u)
            u = self.parent[u]
        return tuple(reversed(path))

    def is_ancestor(self, a: int, d: int) -> bool:
        """True iff a == d or a lies on d's root path."""
        u = d
        while u != ROOT:
            if u == a:
                return True
            u = self.parent[u]
        return False

    def drop_nodes(self, gone: Iterable[int]) -> "TreedepthDecomposition":
        """Remove a union of whole subtrees; survivors keep their parents."""
        dead = set(gone)
        kept = {}
        for v, p in self.parent.items():
            if v in dead:
                continue
            if p != ROOT and p in dead:
                raise StructureError(f"removal of {p} orphans surviving node {v}")
            kept[v] = p
        return TreedepthDecomposition(kept)

    def __eq__(self, other):
        if not isinstance(other, TreedepthDecomposition):
            return NotImplemented
        return self.parent == other.parent

    def __hash__(self):
        return hash(tuple(sorted(self.parent.items())))

    def __repr__(self):
        return f"TreedepthDecomposition(n={self.n}, height={self.height})"


class TreeDecompositionWitness:
    """Bags over a rooted tree (or forest), the usual (P1)-(P3) object."""

    __slots__ = ("tree", "bags", "width")

    def __init__(self, tree: Mapping[int, int], bags: Mapping[int, Iterable[int]]):
        skeleton = TreedepthDecomposition(tree)  # reuse the forest validation
        self.tree = dict(skeleton.parent)
        self.bags = {node: frozenset(bag) for node, bag in bags.items()}
        if set(self.bags) != set(self.tree):
            raise StructureError("bag nodes and tree nodes differ")
        self.width = max((len(b) for b in self.bags.values()), default=0) - 1

    def __repr__(self):
        return f"TreeDecompositionWitness(bags={len(self.bags)}, width={self.width})"


# ---------------------------------------------------------------------------
# primal graph


def build_primal_graph(instance: IlpInstance) -> Graph:
    """Variables adjacent iff they share a constraint or both sit in the objective."""
    edges: set[tuple[int, int]] = set()
    for c in instance.constraints:
        vs = c.variables()
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                edges.add((vs[i], vs[j]))
    support = instance.objective.variables()
    for i in range(len(support)):
        for j in range(i + 1, len(support)):
            edges.add((support[i], support[j]))
    return Graph(instance.ids(), edges)


# ---------------------------------------------------------------------------
# treedepth computation


def dfs_treedepth_heuristic(graph: Graph) -> TreedepthDecomposition:
    """DFS forest: valid because every non-tree edge of an undirected DFS
    joins an ancestor-descendant pair.  Height may be far from optimal.

    Each tree is rooted at its component's max-degree vertex (ties by
    vertex order), which keeps hub-and-spoke graphs flat.
    """
    parent: dict[int, int] = {}
    visited: set[int] = set()
    starts = sorted(graph.vertices, key=lambda v: (-len(graph.neighbors(v)), v))
    for s in starts:
        if s in visited:
            continue
        parent[s] = ROOT
        visited.add(s)
        stack = [(s, iter(graph.neighbors(s)))]
        while stack:
            v, it = stack[-1]
            for w in it:
                if w not in visited:
                    visited.add(w)
                    parent[w] = v
                    stack.append((w, iter(graph.neighbors(w))))
                    break
            else:
                stack.pop()
    return TreedepthDecomposition(parent)


def _components_within(vset: frozenset[int], graph: Graph) -> list[frozenset[int]]:
    seen: set[int] = set()
    comps: list[frozenset[int]] = []
    for s in sorted(vset):
        if s in seen:
            continue
        comp = {s}
        seen.add(s)
        queue = [s]
        while queue:
            v = queue.pop()
            for w in graph.neighbors(v):
                if w in vset and w not in seen:
                    seen.add(w)
                    comp.add(w)
                    queue.append(w)
        comps.append(frozenset(comp))
    return comps


def compute_treedepth_exact(graph: Graph, cap: int = 25) -> tuple[int, TreedepthDecomposition]:
    """Optimal treedepth with a witness, by the standard recursion:
    1 for a single vertex, 1 + min over deleted vertices when connected,
    max over components otherwise.  Memoized on vertex subsets; deletion
    candidates are tried in ascending id and the first optimum is kept.
    """
    if graph.n > cap:
        raise StructureError(
            f"exact treedepth is capped at {cap} vertices, got {graph.n}"
        )
    memo: dict[frozenset[int], tuple[int, dict[int, int]]] = {}

    def solve_connected(vset: frozenset[int], beat: int | None) -> tuple[int, dict[int, int]]:
        if len(vset) == 1:
            (v,) = vset
            return 1, {v: ROOT}
        hit = memo.get(vset)
        if hit is not None:
            return hit
        best = beat if beat is not None else len(vset) + 1
        best_wit: dict[int, int] | None = None
        for v in sorted(vset):
            rest = vset - {v}
            partial = 0
            parts: list[dict[int, int]] = []
            viable = True
            for comp in _components_within(rest, graph):
                h, wit = solve_connected(comp, None)
                partial = max(partial, h)
                parts.append(wit)
                if partial + 1 >= best:
                    viable = False
                    break
            if viable and partial + 1 < best:
                best = partial + 1
                merged = {v: ROOT}
                for wit in parts:
                    for u, p in wit.items():
                        merged[u] = v if p == ROOT else p
                best_wit = merged
        assert best_wit is not None
        memo[vset] = (best, best_wit)
        return memo[vset]

    forest: dict[int, int] = {}
    height = 0
    for comp in graph.connected_components():
        seed = dfs_treedepth_heuristic(graph.subgraph(comp)).height + 1
        h, wit = solve_connected(frozenset(comp), seed)
        forest.update(wit)
        height = max(height, h)
    decomposition = TreedepthDecomposition(forest)
    return height, decomposition


def verify_treedepth_decomposition(graph: Graph, decomposition: TreedepthDecomposition) -> bool:
    """True iff the forest covers exactly V(G) and every edge is vertical."""
    if set(decomposition.parent) != set(graph.vertices):
        raise StructureError("decomposition nodes differ from graph vertices")
    for u, v in graph.edges:
        if not (decomposition.is_ancestor(u, v) or decomposition.is_ancestor(v, u)):
            return False
    return True


# ---------------------------------------------------------------------------
# tree decompositions


def treedepth_to_tree_decomposition(
    decomposition: TreedepthDecomposition,
) -> TreeDecompositionWitness:
    """Bag of each node = its root path; width ≤ height - 1 by construction."""
    bags = {v: decomposition.path_to_root(v) for v in decomposition.parent}
    return TreeDecompositionWitness(decomposition.parent, bags)


def verify_tree_decomposition(graph: Graph, witness: TreeDecompositionWitness) -> bool:
    covered: set[int] = set()
    for bag in witness.bags.values():
        covered.update(bag)
    if covered != set(graph.vertices):
        return False
    for u, v in graph.edges:
        if not any(u in bag and v in bag for bag in witness.bags.values()):
            return False
    # occurrences of each vertex must induce a connected subtree
    skeleton = TreedepthDecomposition(witness.tree)
    for x in graph.vertices:
        holders = [node for node, bag in witness.bags.items() if x in bag]
        if not holders:
            return False
        holder_set = set(holders)
        seen = {holders[0]}
        queue = [holders[0]]
        while queue:
            node = queue.pop()
            near = list(skeleton.children(node))
            p = skeleton.parent[node]
            if p != ROOT:
                near.append(p)
            for other in near:
                if other in holder_set and other not in seen:
                    seen.add(other)
                    queue.append(other)
        if seen != holder_set:
            return False
    return True


# ---------------------------------------------------------------------------
# file formats


def witness_to_json(witness: TreedepthDecomposition | TreeDecompositionWitness) -> str:
    if isinstance(witness, TreedepthDecomposition):
        nodes = witness.nodes()
        if nodes != tuple(range(len(nodes))):
            raise StructureError("treedepth witness JSON needs dense nodes 0..n-1")
        return json.dumps(
            {"kind": "treedepth", "parent": [witness.parent[v] for v in nodes]}
        )
    if isinstance(witness, TreeDecompositionWitness):
        nodes = tuple(sorted(witness.tree))
        if nodes != tuple(range(len(nodes))):
            raise StructureError("treewidth witness JSON needs dense bag nodes 0..k-1")
        return json.dumps(
            {
                "kind": "treewidth",
                "parent": [witness.tree[v] for v in nodes],
                "bags": [sorted(witness.bags[v]) for v in nodes],
            }
        )
    raise StructureError(f"not a witness: {witness!r}")


def witness_from_json(text: str) -> TreedepthDecomposition | TreeDecompositionWitness:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureError(f"witness is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "kind" not in doc:
        raise StructureError("witness JSON must be an object with a 'kind' field")
    kind = doc["kind"]
    parent_list = doc.get("parent")
    if not isinstance(parent_list, list) or not all(isinstance(p, int) for p in parent_list):
        raise StructureError("witness 'parent' must be a list of integers")
    parent = {i: p for i, p in enumerate(parent_list)}
    if kind == "treedepth":
        return TreedepthDecomposition(parent)
    if kind == "treewidth":
        bag_list = doc.get("bags")
        if not isinstance(bag_list, list) or len(bag_list) != len(parent_list):
            raise StructureError("witness 'bags' must be a list matching 'parent'")
        bags = {i: frozenset(b) for i, b in enumerate(bag_list)}
        return TreeDecompositionWitness(parent, bags)
    raise StructureError(f"unknown witness kind {kind!r}")


def parse_graph_file(text: str) -> Graph:
    """First line: vertex count n.  Each further line: an edge "u v", 1-indexed."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise StructureError("empty graph file")
    try:
        n = int(lines[0])
    except ValueError:
        raise StructureError("first line must be the vertex count") from None
    if n < 0:
        raise StructureError("vertex count must be non-negative")
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise StructureError(f"expected 'u v', got {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise StructureError(f"non-integer endpoint in {ln!r}") from None
        if not (1 <= u <= n and 1 <= v <= n):
            raise StructureError(f"edge ({u}, {v}) out of range 1..{n}")
        edges.append((u, v))
    return Graph(range(1, n + 1), edges)


def serialize_graph(graph: Graph) -> str:
    if graph.vertices != tuple(range(1, graph.n + 1)):
        raise StructureError("graph file format needs vertices 1..n")
    lines = [str(graph.n)]
    lines.extend(f"{u} {v}" for u, v in sorted(graph.edges))
    return "\n".join(lines) + "\n"
