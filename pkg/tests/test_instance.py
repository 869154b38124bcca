"""Text model: parsing, canonical serialization, and the instance type."""

import pytest
from hypothesis import given, strategies as st

from tdilp.instance import (
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


def test_parse_minimal():
    ins = parse_instance("max: x\nx <= 5\n")
    assert ins.n_variables == 1
    assert ins.n_constraints == 1
    assert ins.objective.coefficient(ins.id_of("x")) == 1
    (c,) = ins.constraints
    assert c.terms == ((ins.id_of("x"), 1),) and c.rhs == 5


def test_parse_assigns_ids_by_name_rank():
    ins = parse_instance("max: zeta + alpha\nzeta + alpha <= 1\nmid <= 2\n")
    assert [v.name for v in ins.variables] == ["alpha", "mid", "zeta"]
    assert ins.id_of("alpha") == 0 and ins.id_of("zeta") == 2


def test_parse_relations():
    ins = parse_instance("max: 0 x\nx >= 2\nx < 9\nx > -4\n")
    keys = {(c.terms, c.rhs) for c in ins.constraints}
    x = ins.id_of("x")
    # >= negates, strict relations narrow by one
    assert (((x, -1),), -2) in keys
    assert (((x, 1),), 8) in keys
    assert (((x, -1),), 3) in keys


def test_parse_equality_becomes_two_rows():
    ins = parse_instance("max: 0 x\nx = 3\n")
    assert ins.n_constraints == 2
    ins2 = parse_instance("max: 0 x\nx == 3\n")
    assert ins2.n_constraints == 2


def test_parse_folds_constants_and_star():
    ins = parse_instance("max: 2*x\n3 x + 1 <= 5\n")
    (c,) = ins.constraints
    assert c.rhs == 4  # additive constants move to the right-hand side
    assert c.coefficient(ins.id_of("x")) == 3


def test_parse_duplicate_rows_dedup():
    ins = parse_instance("max: 0 x\nx <= 1\nx <= 1\n2 x <= 2\n")
    # dedup is per canonical row; 2x <= 2 is a different row than x <= 1
    assert ins.n_constraints == 2


def test_parse_comments_and_blank_lines():
    ins = parse_instance("# heading\nmax: x  # trailing\n\nx <= 1\n")
    assert ins.n_constraints == 1


def test_parse_errors_carry_line_numbers():
    with pytest.raises(IlpSyntaxError) as e:
        parse_instance("max: x\nx <=\n")
    assert e.value.line == 2
    with pytest.raises(IlpSyntaxError):
        parse_instance("x <= 1\n")  # objective line must come first
    with pytest.raises(IlpSyntaxError) as e:
        parse_instance("max: x\n0 x <= 5\n")
    assert e.value.line == 2


def test_serialize_objective_first_and_sorted_rows():
    text = serialize_instance(parse_instance("max: y + 2x\nyy + x <= 3\nx <= 1\n"))
    lines = text.splitlines()
    assert lines[0].startswith("max:")
    assert lines[1:] == sorted(lines[1:])
    assert text.endswith("\n")


def test_serialize_declares_isolated_variables():
    # a variable with no constraints and no objective must still round-trip
    b = InstanceBuilder()
    b.var("lonely")
    b.add_le({"busy": 1}, 2)
    ins = b.build()
    text = serialize_instance(ins)
    again = parse_instance(text)
    assert again == ins
    assert "lonely" in text


def test_serialize_empty_objective():
    assert serialize_instance(parse_instance("max: 0\n")) == "max: 0\n"


def test_roundtrip_is_identity_on_canonical_text():
    text = serialize_instance(parse_instance("max: 2a - b\na + b <= 4\n-a <= 0\nb' <= 9\n"))
    assert serialize_instance(parse_instance(text)) == text


def test_instance_equality_is_name_based():
    a = parse_instance("max: x\nx + y <= 2\n")
    b = parse_instance("max: x\ny + x <= 2\n")
    assert a == b
    assert parse_instance("max: x\nx + y <= 3\n") != a


def test_constraint_normal_form():
    c = LinearConstraint.make({3: 1, 1: 2, 2: 0}, 5)
    assert c.terms == ((1, 2), (3, 1))  # zero coefficients dropped, id-sorted
    assert c.evaluate({1: 1, 3: 1}) == 3
    assert c.is_satisfied({1: 1, 3: 3})
    with pytest.raises(IlpError):
        LinearConstraint.make({}, 0)


def test_objective_can_be_empty():
    o = LinearObjective.make({})
    assert o.is_zero()
    assert o.evaluate({}) == 0


def test_max_abs_coefficient_ignores_objective():
    ins = parse_instance("max: 9 x\nx <= 2\n")
    assert max_abs_coefficient(ins) == 2
    assert max_abs_coefficient(parse_instance("max: 7 x\n")) == 0
    assert max_abs_coefficient(parse_instance("max: 0 x\n-3 x <= -4\n")) == 4


def test_check_feasible_and_evaluate():
    ins = parse_instance("max: x + 2y\nx + y <= 3\n-x <= 0\n")
    a = {ins.id_of("x"): 1, ins.id_of("y"): 2}
    assert check_feasible(ins, a)
    assert evaluate_objective(ins, a) == 5
    assert not check_feasible(ins, {ins.id_of("x"): -1, ins.id_of("y"): 0})


def test_omit_variables_drops_touching_rows_and_keeps_ids():
    ins = parse_instance("max: a\na <= 1\na + b <= 2\nc <= 3\n")
    trimmed = omit_variables(ins, [ins.id_of("b")])
    assert {v.name for v in trimmed.variables} == {"a", "c"}
    assert trimmed.id_of("a") == ins.id_of("a")
    assert trimmed.id_of("c") == ins.id_of("c")
    kept = {(c.terms, c.rhs) for c in trimmed.constraints}
    assert kept <= {(c.terms, c.rhs) for c in ins.constraints}
    assert trimmed.n_constraints == 2


def test_duplicate_names_rejected():
    with pytest.raises(IlpError):
        IlpInstance([VariableId(0, "x"), VariableId(1, "x")], [], LinearObjective.make({}))


def test_builder_matches_parser():
    b = InstanceBuilder()
    b.set_objective({"x": 1})
    b.add_le({"x": 1, "y": 1}, 4)
    b.add_ge({"y": 1}, 0)
    built = b.build()
    parsed = parse_instance("max: x\nx + y <= 4\ny >= 0\n")
    assert built == parsed
    assert b.id_of("x") == parsed.id_of("x")


names = st.sampled_from(["a", "b", "c", "d", "e"])
coeffs = st.integers(min_value=-3, max_value=3)


@st.composite
def instances(draw):
    b = InstanceBuilder()
    nrows = draw(st.integers(min_value=0, max_value=5))
    for _ in range(nrows):
        terms = draw(st.dictionaries(names, coeffs, min_size=1, max_size=3))
        if not any(terms.values()):
            terms["a"] = 1
        b.add_le(terms, draw(coeffs))
    obj = draw(st.dictionaries(names, coeffs, max_size=3))
    b.set_objective(obj)
    if not b._known:
        b.var("a")
    return b.build()


@given(instances())
def test_serialize_parse_roundtrip(ins):
    text = serialize_instance(ins)
    again = parse_instance(text)
    assert again == ins
    assert serialize_instance(again) == text


@given(instances(), st.dictionaries(st.integers(0, 4), st.integers(-4, 4)))
def test_evaluate_constraint_matches_sum(ins, partial):
    a = {v.id: partial.get(v.id, 0) for v in ins.variables}
    for c in ins.constraints:
        assert evaluate_constraint(c, a) == sum(coef * a[var] for var, coef in c.terms)
