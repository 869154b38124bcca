"""Data model and text format for integer linear programs.

An instance is a finite set of "less or equal" constraints with integer
coefficients over integer variables, plus an objective that is always
maximized.  Equalities and ">=" rows are normalized away at the border,
so everything downstream reasons about a single row shape.

Text format (UTF-8, ``#`` starts a comment):

    max: <linexpr>          first content line, objective
    <linexpr> <= <int>      one constraint per line; >=, =, < and > are
                            accepted and rewritten into <= rows

A ``linexpr`` is a +/- separated sequence of terms ``<int> <name>`` (the
coefficient 1 may be dropped, ``2x`` and ``2 x`` both work).  Variables
are declared implicitly on first use.  A bare integer term is folded
into the right-hand side.  A zero-coefficient term declares a variable
without contributing anything; the serializer uses this to keep
variables alive that appear in no constraint.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping


class IlpError(Exception):
    """Base error for instance handling."""


class IlpSyntaxError(IlpError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MissingVariableError(IlpError):
    """An assignment lacks a value for a variable that is being evaluated."""


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_TOKEN_RE = re.compile(r"\s*(\d+|[A-Za-z_][A-Za-z0-9_']*|[+\-*])")


@dataclass(frozen=True)
class VariableId:
    """A variable: dense non-negative index plus a human-readable name."""

    id: int
    name: str


@dataclass(frozen=True)
class LinearConstraint:
    """A single row  sum(coeff * var) <= rhs  in canonical form.

    ``terms`` holds (variable id, coefficient) pairs sorted by id with no
    zero coefficients; ``terms`` is never empty.
    """

    terms: tuple[tuple[int, int], ...]
    rhs: int

    @staticmethod
    def make(terms: Mapping[int, int] | Iterable[tuple[int, int]], rhs: int) -> "LinearConstraint":
        if isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = list(terms)
        merged: dict[int, int] = {}
        for var, coeff in items:
            merged[var] = merged.get(var, 0) + coeff
        cleaned = tuple(sorted((v, c) for v, c in merged.items() if c != 0))
        if not cleaned:
            raise IlpError("constraint has no variables after dropping zero coefficients")
        return LinearConstraint(cleaned, rhs)

    def variables(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.terms)

    def coefficient(self, var: int) -> int:
        for v, c in self.terms:
            if v == var:
                return c
        return 0

    def evaluate(self, assignment: Mapping[int, int]) -> int:
        total = 0
        for v, c in self.terms:
            if v not in assignment:
                raise MissingVariableError(f"no value for variable id {v}")
            total += c * assignment[v]
        return total

    def is_satisfied(self, assignment: Mapping[int, int]) -> bool:
        return self.evaluate(assignment) <= self.rhs

    def renamed(self, mapping: Mapping[int, int]) -> "LinearConstraint":
        """Rewrite variable ids through ``mapping`` (identity off its domain)."""
        return LinearConstraint.make(
            [(mapping.get(v, v), c) for v, c in self.terms], self.rhs
        )

    def sort_key(self):
        return (self.terms, self.rhs)


@dataclass(frozen=True)
class LinearObjective:
    """Objective terms; the sense is always "maximize"."""

    terms: tuple[tuple[int, int], ...] = ()

    @staticmethod
    def make(terms: Mapping[int, int] | Iterable[tuple[int, int]]) -> "LinearObjective":
        if isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = list(terms)
        merged: dict[int, int] = {}
        for var, coeff in items:
            merged[var] = merged.get(var, 0) + coeff
        return LinearObjective(tuple(sorted((v, c) for v, c in merged.items() if c != 0)))

    def variables(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.terms)

    def coefficient(self, var: int) -> int:
        for v, c in self.terms:
            if v == var:
                return c
        return 0

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, assignment: Mapping[int, int]) -> int:
        total = 0
        for v, c in self.terms:
            if v not in assignment:
                raise MissingVariableError(f"no value for variable id {v}")
            total += c * assignment[v]
        return total

    def without(self, drop: frozenset[int] | set[int]) -> "LinearObjective":
        return LinearObjective(tuple((v, c) for v, c in self.terms if v not in drop))


class IlpInstance:
    """An immutable ILP: declared variables, constraint set, objective.

    Constraints are deduplicated and stored in a canonical order.  Two
    instances compare equal when they have the same variable names, the
    same name-keyed constraint set and the same name-keyed objective;
    the internal id numbering does not participate in equality.
    """

    __slots__ = ("variables", "constraints", "objective", "_name_by_id", "_id_by_name")

    def __init__(
        self,
        variables: Iterable[VariableId],
        constraints: Iterable[LinearConstraint] = (),
        objective: LinearObjective | None = None,
    ):
        vs = tuple(sorted(variables, key=lambda v: v.id))
        ids = [v.id for v in vs]
        if len(set(ids)) != len(ids):
            raise IlpError("duplicate variable ids")
        names = [v.name for v in vs]
        if len(set(names)) != len(names):
            raise IlpError("duplicate variable names")
        for v in vs:
            if v.id < 0:
                raise IlpError("variable ids must be non-negative")
            if not _NAME_RE.fullmatch(v.name):
                raise IlpError(f"invalid variable name {v.name!r}")
        self.variables = vs
        self._name_by_id = {v.id: v.name for v in vs}
        self._id_by_name = {v.name: v.id for v in vs}
        declared = set(self._name_by_id)
        seen: dict[tuple, LinearConstraint] = {}
        for c in constraints:
            for var in c.variables():
                if var not in declared:
                    raise IlpError(f"constraint uses undeclared variable id {var}")
            seen[c.sort_key()] = c
        self.constraints = tuple(seen[k] for k in sorted(seen))
        obj = objective if objective is not None else LinearObjective()
        for var in obj.variables():
            if var not in declared:
                raise IlpError(f"objective uses undeclared variable id {var}")
        self.objective = obj

    # -- introspection -------------------------------------------------

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    def ids(self) -> tuple[int, ...]:
        return tuple(v.id for v in self.variables)

    def name_of(self, var: int) -> str:
        return self._name_by_id[var]

    def id_of(self, name: str) -> int:
        return self._id_by_name[name]

    def has_name(self, name: str) -> bool:
        return name in self._id_by_name

    # -- structural equality (name keyed) ------------------------------

    def _name_form(self):
        cons = frozenset(
            (tuple(sorted((self._name_by_id[v], c) for v, c in A.terms)), A.rhs)
            for A in self.constraints
        )
        obj = tuple(sorted((self._name_by_id[v], c) for v, c in self.objective.terms))
        return (frozenset(self._id_by_name), cons, obj)

    def __eq__(self, other):
        if not isinstance(other, IlpInstance):
            return NotImplemented
        return self._name_form() == other._name_form()

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    __hash__ = None  # mutable-free but identity hashing would be misleading

    def __repr__(self):
        return (
            f"IlpInstance(n={self.n_variables}, m={self.n_constraints}, "
            f"objective_terms={len(self.objective.terms)})"
        )


# ---------------------------------------------------------------------------
# module-level operations


def evaluate_constraint(constraint: LinearConstraint, assignment: Mapping[int, int]) -> int:
    """Exact left-hand-side value of a row under an assignment."""
    return constraint.evaluate(assignment)


def evaluate_objective(instance: IlpInstance, assignment: Mapping[int, int]) -> int:
    return instance.objective.evaluate(assignment)


def check_feasible(instance: IlpInstance, assignment: Mapping[int, int]) -> bool:
    """True iff every constraint holds; raises if a needed value is missing."""
    return all(c.is_satisfied(assignment) for c in instance.constraints)


def max_abs_coefficient(instance: IlpInstance) -> int:
    """Largest |coefficient| or |rhs| over the constraint set (0 if empty).

    Objective coefficients deliberately do not count.
    """
    best = 0
    for c in instance.constraints:
        for _, coeff in c.terms:
            best = max(best, abs(coeff))
        best = max(best, abs(c.rhs))
    return best


def omit_variables(instance: IlpInstance, drop: Iterable[int]) -> IlpInstance:
    """Delete a variable set together with every constraint touching it.

    Surviving variables keep their ids and names so that traces recorded
    against the original instance stay meaningful.
    """
    gone = frozenset(drop)
    declared = set(instance.ids())
    unknown = gone - declared
    if unknown:
        raise IlpError(f"cannot omit undeclared variable ids {sorted(unknown)}")
    keep_vars = [v for v in instance.variables if v.id not in gone]
    keep_cons = [
        c for c in instance.constraints if not (gone & set(c.variables()))
    ]
    return IlpInstance(keep_vars, keep_cons, instance.objective.without(gone))


# ---------------------------------------------------------------------------
# parsing


def _tokenize_expr(text: str, line_no: int) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise IlpSyntaxError(f"unexpected character {text[pos:].strip()[0]!r}", line_no)
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


def _parse_linexpr(text: str, line_no: int, declare) -> tuple[dict[str, int], int]:
    """Return (name -> coefficient, constant).  ``declare`` registers names."""
    tokens = _tokenize_expr(text, line_no)
    if not tokens:
        raise IlpSyntaxError("empty expression", line_no)
    terms: dict[str, int] = {}
    constant = 0
    i = 0
    sign = 1
    expect_term = True
    while i < len(tokens):
        tok = tokens[i]
        if tok in "+-":
            if expect_term and tok == "-":
                sign = -sign
                i += 1
                continue
            if expect_term:
                raise IlpSyntaxError("misplaced '+'", line_no)
            sign = -1 if tok == "-" else 1
            expect_term = True
            i += 1
            continue
        if not expect_term:
            raise IlpSyntaxError(f"expected '+' or '-' before {tok!r}", line_no)
        if tok.isdigit():
            coeff = sign * int(tok)
            i += 1
            if i < len(tokens) and tokens[i] == "*":
                i += 1
                if i >= len(tokens) or not _NAME_RE.fullmatch(tokens[i]):
                    raise IlpSyntaxError("expected variable name after '*'", line_no)
            if i < len(tokens) and _NAME_RE.fullmatch(tokens[i]):
                name = tokens[i]
                declare(name)
                terms[name] = terms.get(name, 0) + coeff
                i += 1
            else:
                constant += coeff
        elif _NAME_RE.fullmatch(tok):
            declare(tok)
            terms[tok] = terms.get(tok, 0) + sign
            i += 1
        else:
            raise IlpSyntaxError(f"unexpected token {tok!r}", line_no)
        sign = 1
        expect_term = False
    if expect_term:
        raise IlpSyntaxError("dangling sign at end of expression", line_no)
    return terms, constant


def _parse_int(text: str, line_no: int) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise IlpSyntaxError(f"expected an integer, got {text.strip()!r}", line_no) from None


_REL_RE = re.compile(r"(<=|>=|==|=|<|>)")


def parse_instance(text: str) -> IlpInstance:
    """Parse the text format into a normalized instance.

    Ids are assigned by the lexicographic rank of the variable name, so
    parsing is insensitive to the order in which lines mention variables
    and ``parse(serialize(i))`` reproduces ``i`` exactly for any instance
    that came out of this function.
    """
    order: list[str] = []
    known: set[str] = set()

    def declare(name: str):
        if name not in known:
            known.add(name)
            order.append(name)

    objective_terms: dict[str, int] | None = None
    raw_rows: list[tuple[dict[str, int], str, int, int]] = []

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if objective_terms is None:
            m = re.match(r"max\s*:\s*(.*)$", line)
            if not m:
                raise IlpSyntaxError("first line must be 'max: <expression>'", line_no)
            terms, constant = _parse_linexpr(m.group(1), line_no, declare)
            if constant != 0:
                raise IlpSyntaxError("objective must not contain a constant term", line_no)
            objective_terms = terms
            continue
        rel = _REL_RE.search(line)
        if not rel:
            raise IlpSyntaxError("constraint needs one of <=, >=, =, <, >", line_no)
        lhs_text, op, rhs_text = line[: rel.start()], rel.group(1), line[rel.end() :]
        terms, constant = _parse_linexpr(lhs_text, line_no, declare)
        rhs = _parse_int(rhs_text, line_no) - constant
        raw_rows.append((terms, op, rhs, line_no))

    if objective_terms is None:
        raise IlpSyntaxError("missing objective line", 1)

    ranked = sorted(known)
    id_by_name = {name: i for i, name in enumerate(ranked)}
    variables = [VariableId(i, name) for name, i in id_by_name.items()]

    constraints: list[LinearConstraint] = []

    def add_le(terms: dict[str, int], rhs: int, line_no: int):
        mapped = {id_by_name[n]: c for n, c in terms.items() if c != 0}
        if not mapped:
            raise IlpSyntaxError("constraint has no variables", line_no)
        constraints.append(LinearConstraint.make(mapped, rhs))

    for terms, op, rhs, line_no in raw_rows:
        neg = {n: -c for n, c in terms.items()}
        if op == "<=":
            add_le(terms, rhs, line_no)
        elif op == "<":
            add_le(terms, rhs - 1, line_no)
        elif op == ">=":
            add_le(neg, -rhs, line_no)
        elif op == ">":
            add_le(neg, -rhs - 1, line_no)
        elif op in ("=", "=="):
            add_le(terms, rhs, line_no)
            add_le(neg, -rhs, line_no)

    objective = LinearObjective.make(
        {id_by_name[n]: c for n, c in objective_terms.items() if c != 0}
    )
    return IlpInstance(variables, constraints, objective)


# ---------------------------------------------------------------------------
# serialization


def _format_terms(pairs: list[tuple[str, int]]) -> str:
    if not pairs:
        return "0"
    chunks: list[str] = []
    for idx, (name, coeff) in enumerate(pairs):
        mag = abs(coeff)
        body = name if mag == 1 else f"{mag} {name}"
        if coeff == 0:
            body = f"0 {name}"
        if idx == 0:
            chunks.append(body if coeff >= 0 else f"-{body}")
        else:
            chunks.append(("+ " if coeff >= 0 else "- ") + body)
    return " ".join(chunks)


def serialize_instance(instance: IlpInstance) -> str:
    """Canonical text: objective first, constraint lines sorted, terms by id.

    Variables that occur in no constraint and not in the objective are
    kept alive as zero-coefficient objective terms.
    """
    used: set[int] = set()
    for c in instance.constraints:
        used.update(c.variables())
    used.update(instance.objective.variables())

    obj_pairs: list[tuple[str, int]] = []
    coeffs = dict(instance.objective.terms)
    for v in instance.variables:
        if v.id in coeffs:
            obj_pairs.append((v.name, coeffs[v.id]))
        elif v.id not in used:
            obj_pairs.append((v.name, 0))
    lines = [f"max: {_format_terms(obj_pairs)}"]

    rendered = []
    for c in instance.constraints:
        pairs = [(instance.name_of(v), coeff) for v, coeff in c.terms]
        rendered.append(f"{_format_terms(pairs)} <= {c.rhs}")
    lines.extend(sorted(rendered))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# programmatic construction


class InstanceBuilder:
    """Accumulates rows keyed by variable name, then builds a normalized instance.

    ``build`` assigns ids by name rank, exactly like the parser, so built
    instances serialize and reload without surprises.
    """

    def __init__(self):
        self._names: list[str] = []
        self._known: set[str] = set()
        self._rows: list[tuple[dict[str, int], int]] = []
        self._objective: dict[str, int] = {}
        self._built: IlpInstance | None = None

    def var(self, name: str) -> str:
        if not _NAME_RE.fullmatch(name):
            raise IlpError(f"invalid variable name {name!r}")
        if name not in self._known:
            self._known.add(name)
            self._names.append(name)
        return name

    def add_le(self, terms: Mapping[str, int], rhs: int):
        cleaned = {self.var(n): c for n, c in terms.items() if c != 0}
        if not cleaned:
            raise IlpError("constraint has no variables")
        self._rows.append((cleaned, rhs))

    def add_ge(self, terms: Mapping[str, int], rhs: int):
        self.add_le({n: -c for n, c in terms.items()}, -rhs)

    def add_eq(self, terms: Mapping[str, int], rhs: int):
        self.add_le(terms, rhs)
        self.add_ge(terms, rhs)

    def set_objective(self, terms: Mapping[str, int]):
        self._objective = {self.var(n): c for n, c in terms.items() if c != 0}

    def build(self) -> IlpInstance:
        ranked = sorted(self._known)
        ids = {name: i for i, name in enumerate(ranked)}
        variables = [VariableId(i, n) for n, i in ids.items()]
        constraints = [
            LinearConstraint.make({ids[n]: c for n, c in terms.items()}, rhs)
            for terms, rhs in self._rows
        ]
        objective = LinearObjective.make({ids[n]: c for n, c in self._objective.items()})
        self._built = IlpInstance(variables, constraints, objective)
        return self._built

    def id_of(self, name: str) -> int:
        if self._built is None:
            raise IlpError("build() has not been called yet")
        return self._built.id_of(name)


def assignment_by_name(instance: IlpInstance, values: Mapping[str, int]) -> dict[int, int]:
    return {instance.id_of(name): value for name, value in values.items()}


def assignment_named(instance: IlpInstance, assignment: Mapping[int, int]) -> dict[str, int]:
    return {instance.name_of(v): value for v, value in assignment.items()}
