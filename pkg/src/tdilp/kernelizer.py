"""Pruning of interchangeable sibling subtrees of a treedepth decomposition.

Two sibling subtrees T_x, T_y are equivalent when some bijective renaming
delta of T_x's variables onto T_y's maps the set of constraints touching
T_x exactly onto the set touching T_y (ancestor variables stay fixed).
If neither subtree carries an objective variable, T_y can be dropped
without changing feasibility or the optimal value, and any solution of
the smaller instance lifts back by copying values through delta.

The search for a renaming runs in two stages: cheap renaming-invariant
signatures group the candidates (equivalent subtrees always hash alike),
then a backtracking bijection search certifies or refutes each pair.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from .instance import IlpError, IlpInstance, LinearConstraint, omit_variables
from .structure import (
    ROOT,
    TreedepthDecomposition,
    build_primal_graph,
    verify_treedepth_decomposition,
)


class KernelError(IlpError):
    """Invalid decomposition, siblinghood violation or trace mismatch."""


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class EquivalenceWitness:
    """delta maps T_x's variables bijectively onto T_y's."""

    x: int
    y: int
    delta: dict[int, int]


@dataclass(frozen=True)
class TraceStep:
    """One prune: the omitted subtree, its kept twin, and the renaming.

    delta runs keeper -> omitted so that lifting is a straight copy.
    names snapshots the labels of every id the step mentions; the trace
    alone must suffice to lift a name-keyed solution.
    """

    omitted: tuple[int, ...]
    keeper_root: int
    delta: dict[int, int]
    names: dict[int, str]


class KernelTrace:
    """Ordered prune log; replaying it on the original reproduces the kernel."""

    __slots__ = ("steps",)

    def __init__(self, steps: Iterable[TraceStep] = ()):
        self.steps = tuple(steps)

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)

    def __eq__(self, other):
        if not isinstance(other, KernelTrace):
            return NotImplemented
        return self.steps == other.steps

    def omitted_total(self) -> int:
        return sum(len(s.omitted) for s in self.steps)


# ---------------------------------------------------------------------------
# touching sets and signatures


def constraints_touching(instance: IlpInstance, Y: Iterable[int]) -> tuple[LinearConstraint, ...]:
    """All constraints with at least one variable in Y."""
    ys = set(Y)
    return tuple(c for c in instance.constraints if ys & set(c.variables()))


def _constraint_view(constraint: LinearConstraint, inside: set[int]):
    """What a constraint looks like when the inside variables lose their names."""
    outside = tuple((v, k) for v, k in constraint.terms if v not in inside)
    inner = tuple(sorted(k for v, k in constraint.terms if v in inside))
    return (outside, inner, constraint.rhs)


def subtree_signature(instance: IlpInstance, nodes: Iterable[int]) -> tuple:
    """Renaming-invariant fingerprint of a subtree: equivalent subtrees
    always collide; the converse is settled by test_equivalence."""
    inside = set(nodes)
    views = sorted(
        _constraint_view(c, inside) for c in constraints_touching(instance, inside)
    )
    return (len(inside), tuple(views))


def _variable_signatures(
    instance: IlpInstance, inside: set[int]
) -> dict[int, tuple]:
    """Per-variable renaming-invariant fingerprints within one subtree."""
    rows: dict[int, list] = {v: [] for v in inside}
    for c in constraints_touching(instance, inside):
        view = _constraint_view(c, inside)
        for v, coeff in c.terms:
            if v in inside:
                rows[v].append((coeff, view))
    return {v: tuple(sorted(entries)) for v, entries in rows.items()}


def _renamed_key(c: LinearConstraint, delta: Mapping[int, int]):
    """sort_key of the renamed constraint, or None if the rename
    cancelled every term (never a match, but not an error either)."""
    try:
        return c.renamed(delta).sort_key()
    except IlpError:
        return None


# ---------------------------------------------------------------------------
# equivalence testing


def test_equivalence(
    instance: IlpInstance,
    decomposition: TreedepthDecomposition,
    x: int,
    y: int,
) -> EquivalenceWitness | None:
    """Certified equivalence check for two distinct siblings.

    Returns a witness whose delta maps the constraints touching T_x
    exactly onto those touching T_y, or None.
    """
    if x == y:
        raise KernelError("x and y must be distinct")
    if decomposition.parent.get(x, None) is None or decomposition.parent.get(y, None) is None:
        raise KernelError("x and y must be nodes of the decomposition")
    if decomposition.parent[x] != decomposition.parent[y]:
        raise KernelError(f"{x} and {y} are not siblings")

    X = decomposition.subtree(x)
    Y = decomposition.subtree(y)
    if len(X) != len(Y):
        return None
    inside_x, inside_y = set(X), set(Y)
    fx = constraints_touching(instance, inside_x)
    fy = constraints_touching(instance, inside_y)
    if len(fx) != len(fy):
        return None
    if subtree_signature(instance, X) != subtree_signature(instance, Y):
        return None

    sig_x = _variable_signatures(instance, inside_x)
    sig_y = _variable_signatures(instance, inside_y)
    candidates: dict[int, tuple[int, ...]] = {}
    by_sig_y: dict[tuple, list[int]] = {}
    for w in sorted(Y):
        by_sig_y.setdefault(sig_y[w], []).append(w)
    for v in X:
        pool = by_sig_y.get(sig_x[v])
        if not pool:
            return None
        candidates[v] = tuple(pool)

    target_keys = {c.sort_key() for c in fy}
    inside_vars_of = [tuple(v for v, _ in c.terms if v in inside_x) for c in fx]
    var_to_rows: dict[int, list[int]] = {v: [] for v in X}
    pending = []
    for ci, vs in enumerate(inside_vars_of):
        pending.append(len(vs))
        for v in vs:
            var_to_rows[v].append(ci)

    order = sorted(X)
    delta: dict[int, int] = {}
    used: set[int] = set()

    def place(k: int) -> bool:
        if k == len(order):
            image = {_renamed_key(c, delta) for c in fx}
            return None not in image and image == target_keys
        v = order[k]
        for w in candidates[v]:
            if w in used:
                continue
            delta[v] = w
            used.add(w)
            completed = []
            for ci in var_to_rows[v]:
                pending[ci] -= 1
                if pending[ci] == 0:
                    completed.append(ci)
            ok = all(
                _renamed_key(fx[ci], delta) in target_keys for ci in completed
            )
            if ok and place(k + 1):
                return True
            for ci in var_to_rows[v]:
                pending[ci] += 1
            used.discard(w)
            del delta[v]
        return False

    if not place(0):
        return None
    return EquivalenceWitness(x=x, y=y, delta=dict(delta))


def witness_is_sound(
    instance: IlpInstance,
    decomposition: TreedepthDecomposition,
    witness: EquivalenceWitness,
) -> bool:
    """Re-derive the defining property of a witness from scratch."""
    X = decomposition.subtree(witness.x)
    Y = decomposition.subtree(witness.y)
    delta = witness.delta
    if sorted(delta) != sorted(X) or sorted(delta.values()) != sorted(Y):
        return False
    fx = constraints_touching(instance, set(X))
    fy = constraints_touching(instance, set(Y))
    image = {_renamed_key(c, delta) for c in fx}
    return None not in image and image == {c.sort_key() for c in fy}


# ---------------------------------------------------------------------------
# pruning


def _eligible_children(
    instance: IlpInstance,
    decomposition: TreedepthDecomposition,
    z: int | None,
) -> list[int]:
    """Children of z (forest roots for z=None) whose subtree is objective-free."""
    kids = decomposition.roots() if z is None else decomposition.children(z)
    support = set(instance.objective.variables())
    out = []
    for c in kids:
        if not (support & set(decomposition.subtree(c))):
            out.append(c)
    return out


def find_equivalent_pair(
    instance: IlpInstance,
    decomposition: TreedepthDecomposition,
    z: int | None,
) -> EquivalenceWitness | None:
    """First equivalent objective-free pair of children of z, in (min id,
    max id) order; z=None addresses the virtual root above all trees."""
    kids = _eligible_children(instance, decomposition, z)
    if len(kids) < 2:
        return None
    groups: dict[tuple, list[int]] = {}
    for c in kids:
        groups.setdefault(subtree_signature(instance, decomposition.subtree(c)), []).append(c)
    pairs = []
    for members in groups.values():
        members.sort()
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                pairs.append((members[i], members[j]))
    for a, b in sorted(pairs):
        witness = test_equivalence(instance, decomposition, a, b)
        if witness is not None:
            return witness
    return None


def prune_step(
    instance: IlpInstance,
    decomposition: TreedepthDecomposition,
    z: int | None,
) -> tuple[IlpInstance, TreedepthDecomposition, TraceStep] | None:
    """Omit one equivalent sibling subtree under z, if any; None otherwise."""
    witness = find_equivalent_pair(instance, decomposition, z)
    if witness is None:
        return None
    gone = decomposition.subtree(witness.y)
    step = TraceStep(
        omitted=gone,
        keeper_root=witness.x,
        delta=dict(witness.delta),
        names={
            v: instance.name_of(v)
            for v in sorted(set(gone) | set(witness.delta))
        },
    )
    pruned = omit_variables(instance, gone)
    shrunk = decomposition.drop_nodes(gone)
    return pruned, shrunk, step


def kernelize(
    instance: IlpInstance,
    decomposition: TreedepthDecomposition,
    virtual_root: bool = True,
) -> tuple[IlpInstance, TreedepthDecomposition, KernelTrace]:
    """Exhaustive bottom-up pruning.

    Processes parents from the deepest level up to the roots and then,
    when enabled, a virtual root over the forest so that duplicated whole
    components collapse too.  Each step removes at least one variable, so
    at most n steps run.
    """
    if set(decomposition.parent) != set(instance.ids()):
        raise KernelError("decomposition nodes differ from instance variables")
    if not verify_treedepth_decomposition(build_primal_graph(instance), decomposition):
        raise KernelError("decomposition closure misses a primal edge")

    cur_i, cur_t = instance, decomposition
    steps: list[TraceStep] = []
    for depth in range(cur_t.height - 1, 0, -1):
        for z in cur_t.nodes_at_depth(depth):
            while True:
                hit = prune_step(cur_i, cur_t, z)
                if hit is None:
                    break
                cur_i, cur_t, step = hit
                steps.append(step)

    if virtual_root:
        support = set(cur_i.objective.variables())
        holders = sum(
            1 for r in cur_t.roots() if support & set(cur_t.subtree(r))
        )
        if holders <= 1:
            while True:
                hit = prune_step(cur_i, cur_t, None)
                if hit is None:
                    break
                cur_i, cur_t, step = hit
                steps.append(step)

    return cur_i, cur_t, KernelTrace(steps)


def lift_solution(trace: KernelTrace, assignment: Mapping[int, int]) -> dict[int, int]:
    """Replay the prune log backwards, copying keeper values onto twins."""
    lifted = dict(assignment)
    for step in reversed(trace.steps):
        for src, dst in step.delta.items():
            if src not in lifted:
                raise KernelError(f"trace mismatch: no value for variable id {src}")
            lifted[dst] = lifted[src]
    return lifted


# ---------------------------------------------------------------------------
# kernel-size bounds


MAX_EXACT_BITS = 1_000_000


class Astronomical:
    """Placeholder for an exact integer too large to materialize.

    bits is a lower bound on floor(log2(value)) when that is itself small
    enough to hold; note is a printable form.  Instances compare larger
    than any materialized integer (they only arise past 2^1e6).
    """

    __slots__ = ("bits", "note")

    def __init__(self, bits: int | None, note: str):
        self.bits = bits
        self.note = note

    def _shorten(self) -> str:
        return self.note if len(self.note) <= 80 else "astronomically large"

    def __repr__(self):
        return f"Astronomical({self._shorten()})"

    def __str__(self):
        return self._shorten()

    # comparisons: anything materialized is smaller
    def __gt__(self, other):
        if isinstance(other, int):
            return True
        if isinstance(other, Astronomical):
            if self.bits is not None and other.bits is not None:
                return self.bits > other.bits
            return other.bits is not None
        return NotImplemented

    def __ge__(self, other):
        if isinstance(other, int):
            return True
        if isinstance(other, Astronomical):
            return not (other > self)
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, (int, Astronomical)):
            return not (self >= other)
        return NotImplemented

    def __le__(self, other):
        if isinstance(other, (int, Astronomical)):
            return not (self > other)
        return NotImplemented

    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return id(self)

    # arithmetic keeps lower bounds honest
    def __add__(self, other):
        if isinstance(other, int) and other >= 0:
            return Astronomical(self.bits, f"({self._shorten()} + {other})")
        if isinstance(other, Astronomical):
            bits = max(self.bits or 0, other.bits or 0) or None
            return Astronomical(bits, f"({self._shorten()} + {other._shorten()})")
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, int) and other >= 1:
            bits = None if self.bits is None else self.bits + other.bit_length() - 1
            return Astronomical(bits, f"({self._shorten()} * {other})")
        if isinstance(other, Astronomical):
            bits = (
                None
                if self.bits is None or other.bits is None
                else self.bits + other.bits
            )
            return Astronomical(bits, f"({self._shorten()} * {other._shorten()})")
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, exponent):
        if isinstance(exponent, int) and exponent >= 1:
            bits = None if self.bits is None else self.bits * exponent
            return Astronomical(bits, f"({self._shorten()})^{exponent}")
        return NotImplemented


def _pow2(exponent) -> int | Astronomical:
    """2**exponent, materialized only while it stays printable."""
    if isinstance(exponent, int):
        if exponent <= MAX_EXACT_BITS:
            return 1 << exponent
        return Astronomical(exponent, f"2^{exponent}")
    bits = None
    if exponent.bits is not None and exponent.bits <= 30:
        bits = 1 << exponent.bits
    return Astronomical(bits, f"2^{exponent._shorten()}")


@dataclass(frozen=True)
class KernelBounds:
    """The worst-case kernel-size ladder for coefficient bound ell and
    decomposition height k: d_i bounds sibling counts at depth i, e_i
    bounds subtree sizes; a kernelized tree has at most e_1 variables.
    """

    ell: int
    k: int
    d: dict[int, int | Astronomical]
    e: dict[int, int | Astronomical]

    def num_classes(self, i: int, m) -> int | Astronomical:
        factor = (2 * self.ell + 1) ** (self.k + 1)
        return _pow2(factor * (m**i))

    def e1(self) -> int | Astronomical:
        return self.e[1]


def compute_bounds(ell: int, k: int) -> KernelBounds:
    """Exact evaluation of the d_i / e_i recurrences, top of the ladder
    e_k = 1, d_k = 0, then d_i = #classes(i, e_{i+1}) + 1 and
    e_i = d_i * e_{i+1} + 1 going down to i = 1."""
    if ell < 0:
        raise ValueError("ell must be non-negative")
    if k < 1:
        raise ValueError("k must be at least 1")
    factor = (2 * ell + 1) ** (k + 1)
    d: dict[int, int | Astronomical] = {k: 0}
    e: dict[int, int | Astronomical] = {k: 1}
    for i in range(k - 1, 0, -1):
        d[i] = _pow2(factor * (e[i + 1] ** i)) + 1
        e[i] = d[i] * e[i + 1] + 1
    return KernelBounds(ell=ell, k=k, d=d, e=e)


def format_bound(value: int | Astronomical) -> str:
    """Small ints in decimal, big ones as a power-of-two estimate."""
    if isinstance(value, int):
        if value.bit_length() <= 128:
            return str(value)
        return f"~2^{value.bit_length() - 1} ({value.bit_length()} bits)"
    return str(value)


# ---------------------------------------------------------------------------
# trace file format


def trace_to_json(trace: KernelTrace) -> str:
    doc = [
        {
            "omitted": list(step.omitted),
            "keeper_root": step.keeper_root,
            "delta": {str(src): dst for src, dst in sorted(step.delta.items())},
            "names": {str(v): name for v, name in sorted(step.names.items())},
        }
        for step in trace.steps
    ]
    return json.dumps(doc, indent=2)


def trace_from_json(text: str) -> KernelTrace:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise KernelError(f"trace is not valid JSON: {exc}") from None
    if not isinstance(doc, list):
        raise KernelError("trace JSON must be a list of steps")
    steps = []
    for item in doc:
        try:
            steps.append(
                TraceStep(
                    omitted=tuple(int(v) for v in item["omitted"]),
                    keeper_root=int(item["keeper_root"]),
                    delta={int(src): int(dst) for src, dst in item["delta"].items()},
                    names={int(v): str(name) for v, name in item.get("names", {}).items()},
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise KernelError(f"malformed trace step: {exc}") from None
    return KernelTrace(steps)
